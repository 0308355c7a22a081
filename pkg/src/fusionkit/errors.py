"""Exception taxonomy shared across the package.

Every error raised on purpose derives from :class:`FusionKitError`, so CLI
code can map "our" failures to exit codes without catching bare Exception.
"""

from __future__ import annotations


class FusionKitError(Exception):
    """Base class for all errors raised deliberately by this package."""


class InvalidLabel(FusionKitError):
    """A label is not a basis label of the ring at hand."""


class SizeCapExceeded(FusionKitError):
    """An enumeration (ball, window, search) outgrew its element cap."""


class NonProbability(FusionKitError):
    """Measure weights are negative or do not sum to one."""


class NonSymmetricMeasure(FusionKitError):
    """A symmetric measure was required but mu(conj(x)) != mu(x) somewhere."""


class NoConvergence(FusionKitError):
    """An iterative eigenvalue computation hit its iteration cap."""


class NotNormalized(FusionKitError):
    """A vector expected to be a unit vector is not (within tolerance)."""


class InvalidSpec(FusionKitError):
    """A builder or file description of a ring/action is malformed."""


class InconsistentRelations(FusionKitError):
    """Supplied generator data contradicts the ring's fusion relations."""


class NotUnitary(FusionKitError):
    """A matrix expected to be unitary is not (within tolerance)."""


class UnreachableLabel(FusionKitError):
    """A label cannot be reached from the generators by fusion recursion."""


class NoAlphaMap(FusionKitError):
    """The action has no matrix-coefficient form for the requested check."""


class AlgebraMismatch(FusionKitError):
    """Two operands live over different algebras (or rings)."""


class NotConverged(FusionKitError):
    """An averaging/search loop exhausted its inputs above tolerance.

    Carries the defect trace seen so far in ``trace``.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace if trace is not None else []


class ParseError(FusionKitError):
    """Malformed CLI argument or input file."""


class InvariantViolation(FusionKitError):
    """A checked mathematical invariant failed at runtime.

    This signals a bug (ours or the caller's data), not a user mistake.
    """
