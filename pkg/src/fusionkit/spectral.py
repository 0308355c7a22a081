"""Finite-window compressions of averaged convolution operators.

The averaged left-convolution operator of a symmetric probability measure
``mu``, written in the orthonormalized weighted basis of the label set, has
matrix entries

    M[a, e] = sum_xi mu(xi) N^a_{xi, e} / d(xi)

over any finite window of labels.  Windowed (hard-truncation) compressions
of a self-adjoint contraction are themselves contractions and are monotone
in the window, so each window's top eigenvalue is a certified lower bound
for the full operator norm; the norm equals 1 for every symmetric measure
exactly when the ring is amenable.  This module assembles those
compressions, extracts their top eigenvalues, and packages radius-indexed
profiles of lower bounds.

A note on weights: the matrix above needs only ``N / d(xi)`` for ``xi`` in
the (small) support of ``mu`` — window label dimensions never enter, so
windows whose dimension weights are thousands of digits long (the
free-orthogonal family) pose no overflow problem.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import LinearOperator, eigsh
from scipy.sparse.linalg import ArpackNoConvergence

from .errors import (
    InvariantViolation,
    NoConvergence,
    NonSymmetricMeasure,
    NotNormalized,
)
from .rings import BALL_CAP, FusionRing, Measure, as_measure, ball_shells


@dataclass(frozen=True)
class Window:
    """A finite, canonically ordered label set with fast index lookup."""

    ring: FusionRing
    labels: tuple
    radius: int | None = None

    @classmethod
    def from_ball(cls, ring: FusionRing, radius: int, cap: int = BALL_CAP) -> "Window":
        shells = ball_shells(ring, radius, cap)
        labels = sorted((lab for sh in shells for lab in sh), key=ring.sort_key)
        return cls(ring, tuple(labels), radius)

    @classmethod
    def from_labels(cls, ring: FusionRing, labels: Iterable) -> "Window":
        labs = list(dict.fromkeys(labels))
        for lab in labs:
            ring.check_label(lab)
        labs.sort(key=ring.sort_key)
        return cls(ring, tuple(labs), None)

    def __post_init__(self):
        object.__setattr__(
            self, "index", {lab: i for i, lab in enumerate(self.labels)}
        )

    def __len__(self):
        return len(self.labels)

    def __contains__(self, label):
        return label in self.index

    def weights(self) -> list:
        """Squared dimension weights d(a)^2, exact (ints stay ints)."""
        return [self.ring.dim(lab) ** 2 for lab in self.labels]

    def weighted_cardinality(self):
        return sum(self.weights())


@dataclass
class WeightedVector:
    """A vector over a window, with the weighted norm built in."""

    window: Window
    entries: np.ndarray  # complex or float, aligned with window.labels

    @classmethod
    def from_dict(cls, window: Window, coeffs: Mapping) -> "WeightedVector":
        v = np.zeros(len(window), dtype=complex)
        for lab, c in coeffs.items():
            i = window.index.get(lab)
            if i is None:
                raise KeyError(f"label {lab!r} outside the window")
            v[i] = c
        return cls(window, v)

    def as_dict(self) -> dict:
        return {
            lab: self.entries[i]
            for i, lab in enumerate(self.window.labels)
            if self.entries[i] != 0
        }

    def weighted_norm(self) -> float:
        """Norm in which the basis vector at label a has length d(a)."""
        ring = self.window.ring
        total = 0.0
        for i, lab in enumerate(self.window.labels):
            c = self.entries[i]
            if c != 0:
                total += abs(c) ** 2 * float(ring.dim(lab)) ** 2
        return math.sqrt(total)


@dataclass
class CompressedOperator:
    """A sparse windowed compression, flagged if known self-adjoint."""

    window: Window
    matrix: csr_matrix
    self_adjoint: bool

    @property
    def shape(self):
        return self.matrix.shape

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec


def _assemble(ring: FusionRing, weights_by_label: Mapping, window: Window) -> csr_matrix:
    """Sparse matrix with entries sum_xi w(xi) N^{row}_{xi, col} / d(xi)."""
    rows, cols, vals = [], [], []
    index = window.index
    fuse = ring.fuse
    for xi, w in weights_by_label.items():
        dxi = ring.dim(xi)
        try:
            scale = float(w) / float(dxi)
        except OverflowError:
            # d(xi) beyond float range: the contribution underflows to zero
            continue
        if scale == 0.0:
            continue
        for j, lab in enumerate(window.labels):
            for c, n in fuse(xi, lab).items():
                i = index.get(c)
                if i is not None:
                    rows.append(i)
                    cols.append(j)
                    vals.append(scale * n)
    n = len(window)
    return csr_matrix(
        (np.asarray(vals), (np.asarray(rows, dtype=np.int64),
                            np.asarray(cols, dtype=np.int64))),
        shape=(n, n),
    )


def l_operator(ring: FusionRing, xi, window: Window) -> CompressedOperator:
    """Compression of the left action of the single label xi (normalized).

    Self-adjoint exactly when xi is self-conjugate (Frobenius reciprocity
    turns the transpose entry into the conjugate label's entry).
    """
    ring.check_label(xi)
    matrix = _assemble(ring, {xi: 1.0}, window)
    return CompressedOperator(window, matrix, ring.conj(xi) == xi)


def lambda_operator(ring: FusionRing, mu, window: Window) -> CompressedOperator:
    """Compression of the mu-averaged left action for a probability measure.

    Requires mu symmetric (mu(conj x) = mu(x)); the compression is then a
    self-adjoint contraction and its top eigenvalue is a lower bound for
    the operator norm of the full averaged action.  Raises
    NonSymmetricMeasure otherwise — the numerical-range machinery for the
    non-self-adjoint case is out of scope here.
    """
    mu = as_measure(mu)
    if not mu.is_symmetric(ring):
        raise NonSymmetricMeasure(
            "lambda_operator needs a symmetric measure; "
            "symmetrize first (e.g. Measure.symmetrized_point)"
        )
    matrix = _assemble(ring, mu.weights, window)
    return CompressedOperator(window, matrix, True)


def top_eigenvalue(
    op: CompressedOperator,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> tuple:
    """Largest eigenvalue of a self-adjoint compression.

    Runs a Lanczos iteration on (op + I) — the shift keeps the target
    eigenvalue at the top of the spectrum's absolute values even when the
    bottom of the spectrum is close to -1 — and subtracts the shift.
    Returns ``(value, iterations)`` where iterations counts operator
    applications.  Small windows are solved densely (iterations = 1).
    Raises NoConvergence if the matvec budget ``max_iter`` is exhausted.
    """
    if not op.self_adjoint:
        raise ValueError("top_eigenvalue requires a self-adjoint compression")
    n = op.shape[0]
    if n == 0:
        raise ValueError("empty window")
    if n < 8:
        dense = op.matrix.toarray()
        vals = np.linalg.eigvalsh((dense + dense.T) / 2)
        return float(vals[-1]), 1

    matrix = op.matrix
    count = [0]

    def matvec(x):
        count[0] += 1
        if count[0] > max_iter:
            raise NoConvergence(
                f"top_eigenvalue exhausted {max_iter} operator applications"
            )
        return matrix @ x + x

    shifted = LinearOperator((n, n), matvec=matvec, dtype=float)
    v0 = np.full(n, 1.0 / math.sqrt(n))
    try:
        vals = eigsh(
            shifted, k=1, which="LA", tol=tol, v0=v0,
            maxiter=max_iter, return_eigenvectors=False,
        )
    except ArpackNoConvergence as exc:
        raise NoConvergence(
            f"Lanczos did not converge within {max_iter} iterations"
        ) from exc
    return float(vals[0] - 1.0), count[0]


# -- radius profiles ----------------------------------------------------------


@dataclass
class ProfileRow:
    radius: int
    window_size: int
    lower_bound: float
    iterations: int
    seconds: float


@dataclass
class KestenProfile:
    """Certified lower bounds for the averaged action's norm, by radius."""

    ring_name: str
    mu_weights: dict
    rows: list = field(default_factory=list)

    def bounds(self) -> list:
        return [row.lower_bound for row in self.rows]

    @property
    def final_bound(self) -> float:
        return self.rows[-1].lower_bound

    def to_dict(self) -> dict:
        return {
            "ring": self.ring_name,
            "rows": [
                {
                    "radius": r.radius,
                    "window_size": r.window_size,
                    "lower_bound": r.lower_bound,
                    "iterations": r.iterations,
                    "seconds": r.seconds,
                }
                for r in self.rows
            ],
        }


def kesten_profile(
    ring: FusionRing,
    mu,
    radii: Sequence[int],
    *,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    cap: int = BALL_CAP,
) -> KestenProfile:
    """Lower-bound profile over nested ball windows.

    Each row's bound is the top eigenvalue of the radius-r compression;
    nesting makes the sequence monotone nondecreasing (checked, along with
    the contraction bound <= 1) and every row is a certified lower bound
    for the full operator norm.
    """
    mu = as_measure(mu)
    if not mu.is_symmetric(ring):
        raise NonSymmetricMeasure("kesten_profile needs a symmetric measure")
    radii = sorted(set(int(r) for r in radii))
    if not radii or radii[0] < 0:
        raise ValueError("radii must be nonnegative integers")

    shells = ball_shells(ring, radii[-1], cap)
    profile = KestenProfile(ring.name, dict(mu.weights))
    prev = -math.inf
    for r in radii:
        start = time.perf_counter()
        labels = [lab for sh in shells[: r + 1] for lab in sh]
        window = Window(ring, tuple(sorted(labels, key=ring.sort_key)), r)
        op = lambda_operator(ring, mu, window)
        value, iterations = top_eigenvalue(op, tol=tol, max_iter=max_iter)
        seconds = time.perf_counter() - start
        if value > 1.0 + 1e-8:
            raise InvariantViolation(
                f"compression norm {value} exceeds 1 at radius {r}"
            )
        if value < prev - 1e-9:
            raise InvariantViolation(
                f"lower bounds decreased at radius {r}: {prev} -> {value}"
            )
        prev = value
        profile.rows.append(
            ProfileRow(r, len(window), value, iterations, seconds)
        )
    return profile


def extrapolated_limit(profile: KestenProfile) -> float | None:
    """Two-point 1/r^2 extrapolation of the profile's tail.

    Hard-truncation bounds for these operators typically converge like
    L - c/r^2; fitting the last two rungs gives an *estimate* of L.  This
    is a diagnostic, not a bound — it is never monotone-safe and is kept
    out of the lower_bound column on purpose.  Returns None with fewer
    than two rows.
    """
    if len(profile.rows) < 2:
        return None
    a, b = profile.rows[-2], profile.rows[-1]
    r1, v1 = a.radius, a.lower_bound
    r2, v2 = b.radius, b.lower_bound
    if r1 <= 0 or r2 <= r1:
        return None
    c = (v2 - v1) / (1.0 / r1**2 - 1.0 / r2**2)
    return v2 + c / r2**2


@dataclass(frozen=True)
class Verdict:
    """Outcome of the plateau/gap heuristic on a profile."""

    kind: str  # "ApproachingOne" | "GapEvidence" | "Inconclusive"
    value: float


def amenability_verdict(
    profile: KestenProfile,
    plateau_window: int = 3,
    gap_tol: float = 1e-3,
) -> Verdict:
    """Classify a profile: bounds reaching 1, a visible plateau below 1, or
    neither.

    "ApproachingOne" if the final bound is within gap_tol of 1 (the
    amenability signature — recall each bound is certified from below).
    "GapEvidence" if the last plateau_window bounds agree within gap_tol
    but sit below 1 by more than gap_tol; the plateau level is reported.
    Anything else is "Inconclusive".  Heuristic by design: a plateau can
    in principle resume climbing at radii we never looked at.
    """
    if not profile.rows:
        return Verdict("Inconclusive", math.nan)
    last = profile.final_bound
    if last >= 1.0 - gap_tol:
        return Verdict("ApproachingOne", last)
    if len(profile.rows) >= plateau_window:
        tail = profile.bounds()[-plateau_window:]
        if max(tail) - min(tail) <= gap_tol:
            return Verdict("GapEvidence", last)
    return Verdict("Inconclusive", last)


# -- almost-invariant vectors -------------------------------------------------


def almost_invariant_defect(
    ring: FusionRing,
    f,
    gamma,
    *,
    norm_tol: float = 1e-9,
) -> float:
    """Weighted-norm defect || lambda_gamma f - f || for a unit vector f.

    ``f`` may be a WeightedVector or a plain {label: coefficient} mapping;
    it must have weighted norm 1 within norm_tol (NotNormalized otherwise).
    The image is computed exactly on the enlarged support — no window
    truncation — so the defect is 0 precisely when f is a fixed vector of
    the label's normalized action.
    """
    ring.check_label(gamma)
    if isinstance(f, WeightedVector):
        coeffs = f.as_dict()
    else:
        coeffs = {lab: c for lab, c in f.items() if c != 0}
    for lab in coeffs:
        ring.check_label(lab)

    dims = {lab: float(ring.dim(lab)) for lab in coeffs}
    norm_sq = sum(abs(c) ** 2 * dims[lab] ** 2 for lab, c in coeffs.items())
    if abs(norm_sq - 1.0) > 2 * norm_tol:
        raise NotNormalized(
            f"weighted norm is {math.sqrt(norm_sq)}, expected 1"
        )

    dg = float(ring.dim(gamma))
    image: dict = {}
    for alpha, c in coeffs.items():
        scale = c * dims[alpha] / dg
        for eta, n in ring.fuse(gamma, alpha).items():
            image[eta] = image.get(eta, 0.0) + scale * n / float(ring.dim(eta))

    total = 0.0
    for lab in set(image) | set(coeffs):
        diff = image.get(lab, 0.0) - coeffs.get(lab, 0.0)
        if diff != 0:
            total += abs(diff) ** 2 * float(ring.dim(lab)) ** 2
    return math.sqrt(total)
