"""Weighted boundaries, invariance ratios, and almost-invariant set search.

The boundary of a finite label set F in direction gamma collects the labels
whose fusion with gamma crosses the frontier of F — members that can exit
and outsiders that can enter:

    bd_gamma(F) = {a in F : fuse(a, gamma) meets the complement}
               U  {a not in F : fuse(a, gamma) meets F}

Sets are sized by the weighted cardinality sum of d(a)^2; the invariance
quality of F in direction gamma is |bd_gamma(F)|_w / |F|_w.  Vanishing
ratios along a sequence of sets witness amenability.

Ratios are exact `Fraction`s whenever every dimension involved is an int
(dimension weights in the free-orthogonal family have thousands of digits,
so floats are not an option); rings with irrational dims fall back to
floats.

Boundaries are computed against the ring's generators and their conjugates
only.  For every catalog family the declared generators generate, so ball
profiles are meaningful; reports still carry a `generators_only` marker as
a reminder that other directions were not examined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import SizeCapExceeded
from .rings import BALL_CAP, FusionRing, ball_shells


@dataclass(frozen=True)
class FolnerSet:
    """A finite label set with its exact weighted cardinality."""

    ring: FusionRing
    labels: tuple  # canonically sorted, deduplicated

    @classmethod
    def from_labels(cls, ring: FusionRing, labels: Iterable) -> "FolnerSet":
        labs = list(dict.fromkeys(labels))
        if not labs:
            raise ValueError("a Folner set must be nonempty")
        for lab in labs:
            ring.check_label(lab)
        labs.sort(key=ring.sort_key)
        return cls(ring, tuple(labs))

    def __post_init__(self):
        object.__setattr__(self, "_set", frozenset(self.labels))

    def __len__(self):
        return len(self.labels)

    def __contains__(self, label):
        return label in self._set

    def __iter__(self):
        return iter(self.labels)

    @property
    def weighted_card(self):
        """Sum of d(a)^2 over the set — exact for integer dims."""
        return sum(self.ring.dim(a) ** 2 for a in self.labels)


def boundary(ring: FusionRing, F, gamma) -> set:
    """Labels whose fusion with gamma crosses the frontier of F.

    The outer part is found without scanning the complement: by Frobenius
    reciprocity, a outside F can reach b in F through gamma exactly when a
    lies in the support of fuse(b, conj(gamma)).
    """
    ring.check_label(gamma)
    inside = F._set if isinstance(F, FolnerSet) else frozenset(F)
    gbar = ring.conj(gamma)
    out = set()
    for a in inside:
        if any(c not in inside for c in ring.fuse(a, gamma)):
            out.add(a)
    for b in inside:
        for a in ring.fuse(b, gbar):
            if a not in inside:
                out.add(a)
    return out


def _weight(ring: FusionRing, labels) -> object:
    return sum(ring.dim(a) ** 2 for a in labels)


def folner_ratio(ring: FusionRing, F, gamma):
    """Weighted boundary-to-bulk ratio of F in direction gamma.

    Returns a Fraction when both weights are ints, else a float.
    """
    inside = F.labels if isinstance(F, FolnerSet) else list(F)
    bw = _weight(ring, boundary(ring, F, gamma))
    fw = _weight(ring, inside)
    if isinstance(bw, int) and isinstance(fw, int):
        return Fraction(bw, fw)
    return bw / fw


def max_generator_ratio(ring: FusionRing, F):
    """Worst folner_ratio over the generators and their conjugates."""
    return max(folner_ratio(ring, F, g) for g in ring.generators_and_conjugates)


@dataclass
class FolnerRow:
    n: int
    size: int
    weighted_card: object         # int (exact) or float
    ratios: dict                  # generator label -> Fraction | float
    max_ratio: object             # Fraction | float


@dataclass
class FolnerProfile:
    """Invariance ratios along a sequence of sets (balls or explicit)."""

    ring_name: str
    generators: tuple
    kind: str                     # "balls" | "explicit"
    rows: list = field(default_factory=list)
    eps: float | None = None
    generators_only: bool = True

    @property
    def max_ratios(self) -> list:
        return [row.max_ratio for row in self.rows]

    @property
    def is_decreasing(self) -> bool:
        """Strictly decreasing max ratios (the healthy profile shape)."""
        m = self.max_ratios
        return all(b < a for a, b in zip(m, m[1:]))

    def passes(self, eps=None) -> bool:
        """Final max ratio at or below the requested threshold."""
        threshold = self.eps if eps is None else eps
        if threshold is None:
            raise ValueError("no epsilon given")
        return bool(self.rows) and self.rows[-1].max_ratio <= threshold

    def to_dict(self) -> dict:
        return {
            "ring": self.ring_name,
            "kind": self.kind,
            "generators_only": self.generators_only,
            "rows": [
                {
                    "n": row.n,
                    "size": row.size,
                    "weighted_card": row.weighted_card
                    if isinstance(row.weighted_card, int)
                    else float(row.weighted_card),
                    "ratios": {str(g): float(v) for g, v in row.ratios.items()},
                    "max_ratio": float(row.max_ratio),
                }
                for row in self.rows
            ],
        }


def _profile_row(ring: FusionRing, n: int, F: FolnerSet) -> FolnerRow:
    ratios = {g: folner_ratio(ring, F, g) for g in ring.generators_and_conjugates}
    return FolnerRow(
        n=n,
        size=len(F),
        weighted_card=F.weighted_card,
        ratios=ratios,
        max_ratio=max(ratios.values()),
    )


def ball_profile(ring: FusionRing, n_max: int, cap: int = BALL_CAP) -> FolnerProfile:
    """Ratios for the ball sequence B_1 .. B_{n_max}."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    shells = ball_shells(ring, n_max, cap)
    profile = FolnerProfile(ring.name, ring.generators_and_conjugates, "balls")
    labels: list = []
    for r, shell in enumerate(shells):
        labels.extend(shell)
        if r == 0:
            continue
        F = FolnerSet.from_labels(ring, labels)
        profile.rows.append(_profile_row(ring, r, F))
    # finite rings close early; repeat the saturated ball for the missing rows
    while profile.rows and len(profile.rows) < n_max:
        last = profile.rows[-1]
        profile.rows.append(
            FolnerRow(last.n + 1, last.size, last.weighted_card,
                      dict(last.ratios), last.max_ratio)
        )
    return profile


def verify_sequence(
    ring: FusionRing,
    sets: Sequence,
    eps: float,
    generators: Sequence | None = None,
) -> FolnerProfile:
    """Ratio rows for an explicit sequence of sets; passes() checks the
    final set against eps.

    `generators` overrides the direction set (defaults to the ring's
    generators and conjugates).
    """
    gens = tuple(generators) if generators is not None else ring.generators_and_conjugates
    for g in gens:
        ring.check_label(g)
    profile = FolnerProfile(
        ring.name, gens, "explicit", eps=eps,
        generators_only=(generators is None),
    )
    for i, F in enumerate(sets, start=1):
        if not isinstance(F, FolnerSet):
            F = FolnerSet.from_labels(ring, F)
        ratios = {g: folner_ratio(ring, F, g) for g in gens}
        profile.rows.append(
            FolnerRow(i, len(F), F.weighted_card, ratios, max(ratios.values()))
        )
    return profile


# -- search -------------------------------------------------------------------


@dataclass(frozen=True)
class NotFound:
    """Search outcome when no set met the target within budget."""

    best_ratio: float
    evaluations: int
    best_labels: tuple


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def spend(self) -> bool:
        if self.used >= self.limit:
            return False
        self.used += 1
        return True


def greedy_search(
    ring: FusionRing,
    target_ratio: float,
    budget: int = 10_000,
    cap: int = 200_000,
    refine_size_cap: int = 512,
):
    """Look for a set with max generator ratio <= target_ratio.

    Strategy: grow balls while they keep improving, then — if the best set
    is small enough to make single-label moves meaningful (at most
    `refine_size_cap` labels) — try additions from the outer boundary and
    removals from the inner boundary, applying the best strictly improving
    move.  Every ratio evaluation counts against `budget`; candidate sets
    never exceed `cap` labels.  Returns a FolnerSet on success, else a
    NotFound record carrying the best ratio seen.  Deterministic:
    candidates are visited in canonical label order.
    """
    budget_ = _Budget(budget)

    def ratio_of(labels) -> float:
        return float(max(
            folner_ratio(ring, labels, g)
            for g in ring.generators_and_conjugates
        ))

    best_labels: tuple = (ring.unit,)
    best = math.inf

    def improved(labels) -> float | None:
        """Evaluate, track the global best; None when budget is gone."""
        nonlocal best, best_labels
        if not budget_.spend():
            return None
        r = ratio_of(labels)
        if r < best:
            best, best_labels = r, tuple(labels)
        return r

    def grow(labels) -> list | None:
        """One-ring enlargement, abandoned early if it would exceed cap."""
        grown = set(labels)
        for b in labels:
            for g in ring.generators_and_conjugates:
                for c in ring.fuse(g, b):
                    grown.add(c)
            if len(grown) > cap:
                return None
        if len(grown) == len(labels):
            return None  # finite ring saturated
        return sorted(grown, key=ring.sort_key)

    # phase 1: balls, while they improve meaningfully
    labels: list = [ring.unit]
    current = improved(labels)
    if current is None:
        return NotFound(best, budget_.used, best_labels)
    while current > target_ratio:
        bigger = grow(labels)
        if bigger is None:
            break
        prev, labels = current, bigger
        current = improved(labels)
        if current is None:
            return NotFound(best, budget_.used, best_labels)
        if current > prev - abs(prev) * 1e-9:
            break  # stalled: growth no longer helps

    # phase 2: greedy single-label moves from the best set so far
    labels = list(best_labels)
    while best > target_ratio and len(labels) <= refine_size_cap:
        inside = frozenset(labels)
        adds = set()
        removes = set()
        for g in ring.generators_and_conjugates:
            for a in boundary(ring, inside, g):
                (removes if a in inside else adds).add(a)
        moves = []
        for a in sorted(adds, key=ring.sort_key):
            moves.append(labels + [a])
        if len(labels) > 1:
            for a in sorted(removes, key=ring.sort_key):
                moves.append([x for x in labels if x != a])
        best_move, best_move_ratio = None, best
        for cand in moves:
            r = improved(cand)
            if r is None:
                return NotFound(best, budget_.used, best_labels)
            if r < best_move_ratio:
                best_move, best_move_ratio = cand, r
        if best_move is None:
            break  # local minimum
        labels = best_move

    if best <= target_ratio:
        return FolnerSet.from_labels(ring, best_labels)
    return NotFound(best, budget_.used, best_labels)
