"""Core structures: based rings with involution and dimension, measures, balls.

A *fusion ring* here is a unital ring with a distinguished basis, nonnegative
integer structure constants, an involution permuting the basis, and a
multiplicative dimension weight ``d >= 1`` on basis labels.  Everything else
in the package (spectral compressions, boundary ratios, module actions) is
built on the four primitives exposed by :class:`FusionRing`: ``dim``,
``conj``, ``fuse`` and label validation.

Basis labels are ordinary hashable Python values (ints, strings, tuples);
ring *elements* are plain dicts mapping labels to coefficients, and
probability measures on the basis get a thin wrapper class so that
normalization is checked exactly once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping

from .errors import InvalidLabel, NonProbability, SizeCapExceeded

Label = Hashable
Element = dict  # finitely supported Label -> coefficient

#: Default cap on enumerated ball sizes (number of labels).
BALL_CAP = 2_000_000

#: Default cap on memoized fusion products (entries, not bytes).
FUSE_CACHE_SIZE = 1 << 17


def label_key(label):
    """Sort key giving a total order across labels of mixed shape.

    Ints come first (numeric order), then strings, then tuples ordered by
    length and recursively by entries.  Rings can install a cheaper
    special-purpose key; this is the safe fallback.
    """
    if isinstance(label, bool):
        return (0, int(label))
    if isinstance(label, int):
        return (0, label)
    if isinstance(label, float):
        return (0, label)
    if isinstance(label, str):
        return (1, label)
    if isinstance(label, tuple):
        return (2, len(label), tuple(label_key(x) for x in label))
    return (3, repr(label))


class FusionRing:
    """A based unital ring with involution and dimension weight.

    The ring is described by callables so that infinite families (free
    groups, quantum-rotation label sets) and finite tables share one type:

    - ``dim(label)`` returns the dimension weight (int or float, ``>= 1``),
    - ``conj(label)`` returns the conjugate basis label,
    - ``fuse(a, b)`` returns the structure constants of the product of two
      basis labels as a dict ``{label: positive int}``.

    ``fuse`` results are memoized (up to ``cache_size`` entries) and the
    returned dicts are shared — treat them as read-only.

    Parameters
    ----------
    name:
        Human-readable identifier used in error messages and reports.
    unit:
        The label of the multiplicative unit.
    generators:
        Labels whose conjugate-closed set generates the ring under fusion;
        used for balls, boundaries and word actions.
    validate:
        Optional predicate deciding label membership.  When omitted, a
        finite ``basis`` is used for membership; with neither, every
        hashable is accepted.
    basis:
        Full label list for finite rings (in canonical order); ``None``
        for infinite ones.
    sort_key:
        Optional total-order key for labels; defaults to :func:`label_key`.
    builder:
        Optional provenance record (see :mod:`fusionkit.catalog`) kept so
        rings can be serialized compactly.
    """

    def __init__(
        self,
        name: str,
        unit: Label,
        generators: Iterable[Label],
        *,
        dim: Callable[[Label], Any],
        conj: Callable[[Label], Label],
        fuse: Callable[[Label, Label], Mapping[Label, int]],
        validate: Callable[[Label], bool] | None = None,
        basis: Iterable[Label] | None = None,
        sort_key: Callable[[Label], Any] | None = None,
        builder=None,
        cache_size: int = FUSE_CACHE_SIZE,
    ):
        self.name = name
        self.unit = unit
        self.generators = tuple(generators)
        self._dim_fn = dim
        self._conj_fn = conj
        self._fuse_fn = fuse
        self._validate_fn = validate
        self.basis = tuple(basis) if basis is not None else None
        self._basis_set = frozenset(self.basis) if self.basis is not None else None
        self.sort_key = sort_key if sort_key is not None else label_key
        self.builder = builder
        self._cache: dict = {}
        self._cache_size = cache_size

        self.check_label(self.unit)
        gens_all = list(self.generators)
        for g in self.generators:
            self.check_label(g)
            gb = self._conj_fn(g)
            if gb not in gens_all:
                gens_all.append(gb)
        #: generators plus their conjugates, declaration order, deduplicated
        self.generators_and_conjugates = tuple(gens_all)

    # -- label primitives ------------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self.basis is not None

    def is_label(self, label) -> bool:
        if self._validate_fn is not None:
            try:
                return bool(self._validate_fn(label))
            except (TypeError, ValueError):
                return False
        if self._basis_set is not None:
            return label in self._basis_set
        return True

    def check_label(self, label) -> None:
        if not self.is_label(label):
            raise InvalidLabel(
                f"{label!r} is not a basis label of ring {self.name!r}"
            )

    def dim(self, label):
        """Dimension weight of a basis label (>= 1)."""
        self.check_label(label)
        return self._dim_fn(label)

    def conj(self, label):
        """Conjugate basis label."""
        self.check_label(label)
        return self._conj_fn(label)

    def fuse(self, a, b) -> dict:
        """Structure constants of the product of two basis labels.

        Returns ``{label: N}`` with positive integer ``N``; the dict is
        cached and shared, so callers must not mutate it.
        """
        key = (a, b)
        try:
            hit = self._cache.get(key)
        except TypeError as exc:  # labels must be hashable to be valid
            raise InvalidLabel(f"unhashable label in {key!r}") from exc
        if hit is not None:
            return hit
        self.check_label(a)
        self.check_label(b)
        if a == self.unit:
            out = {b: 1}
        elif b == self.unit:
            out = {a: 1}
        else:
            out = {c: int(n) for c, n in self._fuse_fn(a, b).items() if n}
        if len(self._cache) < self._cache_size:
            self._cache[key] = out
        return out

    def __repr__(self):
        kind = "finite" if self.is_finite else "infinite"
        return f"FusionRing({self.name!r}, {kind}, generators={list(self.generators)!r})"


# -- ring-element arithmetic ---------------------------------------------


def delta(label) -> Element:
    """The basis element at ``label`` as a one-entry dict."""
    return {label: 1}


def multiply(ring: FusionRing, x: Element, y: Element) -> Element:
    """Product of two finitely supported elements in the based ring."""
    out: dict = {}
    for a, ca in x.items():
        if not ca:
            continue
        for b, cb in y.items():
            if not cb:
                continue
            c = ca * cb
            for g, n in ring.fuse(a, b).items():
                out[g] = out.get(g, 0) + c * n
    return {g: c for g, c in out.items() if c}


def involute(ring: FusionRing, x: Element) -> Element:
    """Star involution: coefficients conjugated, labels conjugated."""
    # basis conjugation is a bijection, so there are no collisions
    return {ring.conj(a): c.conjugate() for a, c in x.items()}


# -- probability measures -------------------------------------------------


class Measure:
    """A finitely supported probability measure on basis labels.

    Normalization (weights nonnegative, summing to one within ``tol``) is
    enforced at construction; a violation raises
    :class:`~fusionkit.errors.NonProbability`.
    """

    __slots__ = ("weights",)

    def __init__(self, weights: Mapping[Label, float], *, tol: float = 1e-9):
        w = {}
        total = 0.0
        for lab, value in weights.items():
            v = float(value)
            if v < -tol:
                raise NonProbability(f"negative weight {v!r} at {lab!r}")
            if v <= 0.0:
                continue
            w[lab] = v
            total += v
        if abs(total - 1.0) > tol:
            raise NonProbability(f"weights sum to {total!r}, not 1")
        self.weights = w

    # construction helpers

    @classmethod
    def point(cls, label) -> "Measure":
        return cls({label: 1.0})

    @classmethod
    def uniform(cls, labels: Iterable[Label]) -> "Measure":
        labs = list(dict.fromkeys(labels))
        if not labs:
            raise NonProbability("uniform measure on empty label set")
        return cls({lab: 1.0 / len(labs) for lab in labs})

    @classmethod
    def symmetrized_point(cls, ring: FusionRing, label) -> "Measure":
        """(delta at label + delta at its conjugate) / 2."""
        lb = ring.conj(label)
        if lb == label:
            return cls.point(label)
        return cls({label: 0.5, lb: 0.5})

    @classmethod
    def uniform_on_generators(cls, ring: FusionRing) -> "Measure":
        """Uniform on generators and their conjugates (always symmetric)."""
        return cls.uniform(ring.generators_and_conjugates)

    # queries

    def __call__(self, label) -> float:
        return self.weights.get(label, 0.0)

    def items(self):
        return self.weights.items()

    def support(self):
        return list(self.weights)

    def __len__(self):
        return len(self.weights)

    def is_symmetric(self, ring: FusionRing, tol: float = 1e-12) -> bool:
        """Whether mu(conj(x)) == mu(x) for all x (within tol)."""
        for lab, v in self.weights.items():
            if abs(self.weights.get(ring.conj(lab), 0.0) - v) > tol:
                return False
        return True

    def __repr__(self):
        inner = ", ".join(f"{lab!r}: {v:.6g}" for lab, v in sorted(
            self.weights.items(), key=lambda kv: label_key(kv[0])))
        return f"Measure({{{inner}}})"


def as_measure(obj) -> Measure:
    """Coerce a Measure or plain mapping into a validated Measure."""
    if isinstance(obj, Measure):
        return obj
    if isinstance(obj, Mapping):
        return Measure(obj)
    raise TypeError(f"cannot interpret {type(obj).__name__} as a measure")


def dirac_convolve(ring: FusionRing, xi, eta) -> Measure:
    """Convolution of two point masses in the weighted ell^1 algebra.

    ``delta_xi * delta_eta`` has weight ``d(a) N^a_{xi,eta} / (d(xi) d(eta))``
    at ``a``; the dimension identity makes the weights sum to one, so the
    result is again a probability measure.
    """
    dxy = ring.dim(xi) * ring.dim(eta)
    out = {}
    for a, n in ring.fuse(xi, eta).items():
        out[a] = n * ring.dim(a) / dxy
    return Measure(out)


def measure_convolve(ring: FusionRing, mu, nu) -> Measure:
    """Convolution of two finitely supported probability measures."""
    mu = as_measure(mu)
    nu = as_measure(nu)
    out: dict = {}
    for x, wx in mu.items():
        dx = ring.dim(x)
        for y, wy in nu.items():
            scale = wx * wy / (dx * ring.dim(y))
            for a, n in ring.fuse(x, y).items():
                out[a] = out.get(a, 0.0) + scale * n * ring.dim(a)
    return Measure(out)


def convolution_power(ring: FusionRing, mu, k: int) -> Measure:
    """k-fold convolution power of a measure (k >= 1)."""
    if k < 1:
        raise ValueError("convolution power needs k >= 1")
    mu = as_measure(mu)
    out = mu
    for _ in range(k - 1):
        out = measure_convolve(ring, out, mu)
    return out


# -- balls ------------------------------------------------------------------


def ball_shells(ring: FusionRing, radius: int, cap: int = BALL_CAP) -> list:
    """Fusion-distance shells around the unit, each sorted canonically.

    Shell ``r`` holds the labels first reachable by ``r`` fusions with
    generators (or their conjugates).  Enumeration stops early when a shell
    comes out empty (finite rings); exceeding ``cap`` total labels raises
    :class:`~fusionkit.errors.SizeCapExceeded`.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    shells = [[ring.unit]]
    known = {ring.unit}
    total = 1
    gens = ring.generators_and_conjugates
    for r in range(1, radius + 1):
        new = set()
        for b in shells[-1]:
            for g in gens:
                for c in ring.fuse(g, b):
                    if c not in known:
                        new.add(c)
        if not new:
            break
        total += len(new)
        if total > cap:
            raise SizeCapExceeded(
                f"ball of radius {radius} in {ring.name!r} exceeds "
                f"{cap} labels at shell {r}"
            )
        known.update(new)
        shells.append(sorted(new, key=ring.sort_key))
    return shells


def ball(ring: FusionRing, radius: int, cap: int = BALL_CAP) -> list:
    """All labels at fusion distance <= radius, sorted canonically."""
    labels = [lab for shell in ball_shells(ring, radius, cap) for lab in shell]
    labels.sort(key=ring.sort_key)
    return labels


# -- axiom checking ----------------------------------------------------------


@dataclass
class AxiomCheck:
    """Outcome of one axiom family on the probe set."""

    name: str
    passed: bool
    count: int                  # elementary comparisons performed
    max_residual: float = 0.0   # worst numeric residual (0 for exact checks)
    witnesses: list = field(default_factory=list)  # up to 5 offending inputs


@dataclass
class AxiomReport:
    """Per-axiom results of :func:`check_axioms` on one probe set."""

    ring_name: str
    probe_size: int
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        lines = [f"axioms[{self.ring_name}] probe={self.probe_size}"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            line = f"  {status} {c.name}: {c.count} checks"
            if c.max_residual:
                line += f", max residual {c.max_residual:.3e}"
            if c.witnesses:
                line += f", e.g. {c.witnesses[0]!r}"
            lines.append(line)
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "ring": self.ring_name,
            "probe_size": self.probe_size,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "passed": c.passed,
                    "count": c.count,
                    "max_residual": c.max_residual,
                    "witnesses": [repr(w) for w in c.witnesses[:5]],
                }
                for c in self.checks
            ],
        }


def _record(check: AxiomCheck, ok: bool, residual: float, witness) -> None:
    check.count += 1
    if residual > check.max_residual:
        check.max_residual = residual
    if not ok:
        check.passed = False
        if len(check.witnesses) < 5:
            check.witnesses.append(witness)


def check_axioms(
    ring: FusionRing,
    probe: Iterable[Label],
    *,
    dim_tol: float = 1e-9,
    assoc_cap: int = 200_000,
) -> AxiomReport:
    """Verify the ring axioms on a finite probe set of labels.

    Families checked (all quantified over the probe set):

    - unit laws and ``dim(unit) == 1``, ``conj(unit) == unit``;
    - involution: ``conj`` is an involution preserving ``dim``;
    - structure constants are positive integers, and
      ``N^c_{a,b} == N^{conj c}_{conj b, conj a}``;
    - Frobenius reciprocity ``N^c_{a,b} == N^a_{c, conj b} == N^b_{conj a, c}``;
    - dimension identity ``sum_c N^c_{a,b} d(c) == d(a) d(b)`` (relative
      tolerance ``dim_tol`` when dims are floats, exact for ints);
    - ``d >= 1`` on the probe;
    - associativity of ``multiply`` on probe triples (capped at
      ``assoc_cap`` triples by deterministic subsampling).

    Returns an :class:`AxiomReport`; nothing is raised on failure.
    """
    probe = list(dict.fromkeys(probe))
    for lab in probe:
        ring.check_label(lab)

    unit_chk = AxiomCheck("unit-laws", True, 0)
    invol_chk = AxiomCheck("involution", True, 0)
    ints_chk = AxiomCheck("integer-constants", True, 0)
    frob_chk = AxiomCheck("frobenius-reciprocity", True, 0)
    dimid_chk = AxiomCheck("dimension-identity", True, 0)
    dimge_chk = AxiomCheck("dimension-at-least-one", True, 0)
    assoc_chk = AxiomCheck("associativity", True, 0)

    du = ring.dim(ring.unit)
    _record(unit_chk, abs(du - 1) <= dim_tol, abs(du - 1), ring.unit)
    _record(unit_chk, ring.conj(ring.unit) == ring.unit, 0.0, ring.unit)

    for a in probe:
        _record(unit_chk, ring.fuse(ring.unit, a) == {a: 1}, 0.0, a)
        _record(unit_chk, ring.fuse(a, ring.unit) == {a: 1}, 0.0, a)
        ab = ring.conj(a)
        _record(invol_chk, ring.conj(ab) == a, 0.0, a)
        da, dab = ring.dim(a), ring.dim(ab)
        _record(invol_chk, abs(da - dab) <= dim_tol * max(1.0, abs(da)),
                abs(da - dab), a)
        _record(dimge_chk, da >= 1 - dim_tol, max(0.0, 1 - da), a)

    for a in probe:
        da = ring.dim(a)
        ab = ring.conj(a)
        for b in probe:
            fab = ring.fuse(a, b)
            bb = ring.conj(b)
            # positive integers
            ok = all(isinstance(n, int) and n > 0 for n in fab.values())
            _record(ints_chk, ok, 0.0, (a, b))
            # conjugation symmetry of constants
            fconj = ring.fuse(bb, ab)
            ok = {ring.conj(c): n for c, n in fab.items()} == fconj
            _record(ints_chk, ok, 0.0, (a, b))
            # dimension identity
            target = da * ring.dim(b)
            total = sum(n * ring.dim(c) for c, n in fab.items())
            res = abs(total - target) / abs(target)
            _record(dimid_chk, res <= dim_tol, res, (a, b))
            # Frobenius reciprocity, both forms
            for c, n in fab.items():
                left = ring.fuse(c, bb).get(a, 0)
                right = ring.fuse(ab, c).get(b, 0)
                _record(frob_chk, n == left == right, 0.0, (a, b, c))

    # associativity on (subsampled) probe triples
    sub = probe
    if len(probe) ** 3 > assoc_cap:
        step = math.ceil(len(probe) / max(2, round(assoc_cap ** (1 / 3))))
        sub = probe[::step]
    for a in sub:
        for b in sub:
            ab_elt = multiply(ring, delta(a), delta(b))
            for c in sub:
                lhs = multiply(ring, ab_elt, delta(c))
                rhs = multiply(ring, delta(a), multiply(ring, delta(b), delta(c)))
                _record(assoc_chk, lhs == rhs, 0.0, (a, b, c))

    return AxiomReport(
        ring_name=ring.name,
        probe_size=len(probe),
        checks=[unit_chk, invol_chk, ints_chk, frob_chk, dimid_chk,
                dimge_chk, assoc_chk],
    )
