"""Module actions of fusion rings on finite-dimensional C*-algebras.

An action assigns to every basis label a *character operator* chi(label) on
the algebra — a linear map satisfying the fusion relations

    chi(a) chi(b) = sum_c N^c_{a,b} chi(c),      chi(unit) = id,

with chi(label) unital up to scale: chi(label)(1) = d(label) 1.  The
normalized maps sigma(label) = chi(label) / d(label) are the transfer
operators the averaging arguments run on.

Only the generator operators are supplied; everything else is derived by
solving the fusion relations along the ball BFS order (each new label's
operator is pinned by the relation that first discovers it).  Relations
that are fully determined are *checked* instead, so inconsistent generator
data fails fast at construction.

The module-vector layer (`ActionVector`, `inner_A`, `twisted_convolve`,
`canonical_xi`) represents finitely supported algebra-valued vectors with a
deferred normalization denominator, which keeps the canonical almost-
invariant vectors bit-exactly normalized even for irrational dimension
weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import (
    AlgebraElement,
    FiniteDimCStarAlgebra,
    State,
    check_unitary,
)
from .errors import (
    AlgebraMismatch,
    InconsistentRelations,
    InvalidLabel,
    InvalidSpec,
    InvariantViolation,
    NoAlphaMap,
    NotConverged,
    UnreachableLabel,
)
from .folner import FolnerSet, folner_ratio
from .rings import BALL_CAP, FusionRing, label_key


class ModuleAction:
    """A fusion-ring action on a finite-dimensional C*-algebra.

    ``generator_ops`` maps every generator and conjugate-generator label to
    the matrix of its character operator over the algebra's flattening.
    ``kind`` is one of "trivial", "permutation", "conjugation", "custom";
    it controls whether the matrix-coefficient (alpha) form of invariance
    is available.
    """

    def __init__(
        self,
        ring: FusionRing,
        algebra: FiniteDimCStarAlgebra,
        generator_ops: Mapping,
        kind: str = "custom",
        *,
        probe_depth: int = 3,
        relation_tol: float = 1e-9,
    ):
        self.ring = ring
        self.algebra = algebra
        self.kind = kind
        self.relation_tol = relation_tol
        D = algebra.total_dim
        self._ops: dict = {ring.unit: np.eye(D, dtype=complex)}
        for g in ring.generators_and_conjugates:
            if g == ring.unit:
                continue
            if g not in generator_ops:
                raise InvalidSpec(f"no character operator supplied for generator {g!r}")
        for g, m in generator_ops.items():
            ring.check_label(g)
            mat = np.asarray(m, dtype=complex)
            if mat.shape != (D, D):
                raise InvalidSpec(
                    f"character operator for {g!r} has shape {mat.shape}, "
                    f"expected ({D}, {D})"
                )
            self._ops[g] = mat
        # BFS state: shells of labels with resolved operators
        self._shells: list = [[ring.unit]]
        self._resolved_radius = 0
        # fail fast on inconsistent generator data
        self.ensure_radius(probe_depth)

    # -- fusion recursion --------------------------------------------------

    def _relation_residual(self, g, b, supp) -> float:
        lhs = self._ops[g] @ self._ops[b]
        for c, n in supp.items():
            lhs = lhs - n * self._ops[c]
        scale = max(1.0, float(self.ring.dim(g)) * float(self.ring.dim(b)))
        return float(np.max(np.abs(lhs))) / scale

    def ensure_radius(self, radius: int) -> None:
        """Resolve character operators for every label in ball(radius).

        Labels are discovered shell by shell; a label with exactly one
        unknown in its discovering relation is solved, fully known
        relations are checked (InconsistentRelations on failure), and a
        shell that cannot be fully resolved raises UnreachableLabel.
        """
        ring = self.ring
        gens = ring.generators_and_conjugates
        while self._resolved_radius < radius:
            frontier = self._shells[-1]
            pending: list = []  # (g, b, supp) with unknowns
            discovered: set = set()
            for b in frontier:
                for g in gens:
                    supp = ring.fuse(g, b)
                    unknown = [c for c in supp if c not in self._ops]
                    if not unknown:
                        resid = self._relation_residual(g, b, supp)
                        if resid > self.relation_tol:
                            raise InconsistentRelations(
                                f"relation at ({g!r}, {b!r}) has residual "
                                f"{resid:.3e} (tol {self.relation_tol:.0e})"
                            )
                        continue
                    discovered.update(unknown)
                    pending.append((g, b, supp))
            # solve: repeat passes until no single-unknown relation remains
            progress = True
            while pending and progress:
                progress = False
                still: list = []
                for g, b, supp in pending:
                    unknown = [c for c in supp if c not in self._ops]
                    if not unknown:
                        resid = self._relation_residual(g, b, supp)
                        if resid > self.relation_tol:
                            raise InconsistentRelations(
                                f"relation at ({g!r}, {b!r}) has residual "
                                f"{resid:.3e} (tol {self.relation_tol:.0e})"
                            )
                        progress = True
                        continue
                    if len(unknown) > 1:
                        still.append((g, b, supp))
                        continue
                    target = unknown[0]
                    acc = self._ops[g] @ self._ops[b]
                    for c, n in supp.items():
                        if c != target:
                            acc = acc - n * self._ops[c]
                    self._ops[target] = acc / supp[target]
                    progress = True
                pending = still
            if pending:
                stuck = sorted(
                    {c for _, _, supp in pending for c in supp
                     if c not in self._ops},
                    key=ring.sort_key,
                )
                raise UnreachableLabel(
                    f"cannot resolve character operators for {stuck!r}"
                )
            new_shell = sorted(discovered, key=ring.sort_key)
            self._resolved_radius += 1
            if not new_shell:
                # finite ring: everything reachable is resolved
                self._resolved_radius = max(self._resolved_radius, radius)
                self._shells.append([])
                break
            self._shells.append(new_shell)

    def char_op(self, label) -> np.ndarray:
        """Matrix of chi(label) over the algebra flattening."""
        self.ring.check_label(label)
        op = self._ops.get(label)
        if op is not None:
            return op
        # extend the recursion until the label appears (or provably cannot)
        radius = self._resolved_radius
        while label not in self._ops:
            radius += 1
            before = len(self._ops)
            self.ensure_radius(radius)
            if len(self._ops) == before:
                raise UnreachableLabel(
                    f"label {label!r} is not reachable from the generators"
                )
        return self._ops[label]

    # -- applying the action ----------------------------------------------

    def char_apply(self, label, a: AlgebraElement) -> AlgebraElement:
        """chi(label) applied to an element."""
        if a.algebra != self.algebra:
            raise AlgebraMismatch("element lives over a different algebra")
        return self.algebra.from_flat(self.char_op(label) @ a.flatten())

    def sigma_apply(self, label, a: AlgebraElement) -> AlgebraElement:
        """Normalized action sigma(label) = chi(label) / d(label)."""
        if a.algebra != self.algebra:
            raise AlgebraMismatch("element lives over a different algebra")
        d = float(self.ring.dim(label))
        return self.algebra.from_flat((self.char_op(label) @ a.flatten()) / d)

    # -- matrix-coefficient (alpha) form ------------------------------------

    def alpha_matrix(self, label, a: AlgebraElement) -> list:
        """The d(label) x d(label) matrix of elements implementing the label.

        Available for the shipped kinds: dimension-one labels act through
        their character, and the trivial action embeds diagonally.  Raises
        NoAlphaMap otherwise.
        """
        d = self.ring.dim(label)
        if self.kind == "trivial":
            if not isinstance(d, int):
                raise NoAlphaMap(
                    f"label {label!r} has non-integer dimension {d!r}"
                )
            zero = self.algebra.zero()
            return [
                [a if i == j else zero for j in range(d)] for i in range(d)
            ]
        if self.kind in ("permutation", "conjugation"):
            if d != 1:
                raise NoAlphaMap(
                    f"label {label!r} has dimension {d!r}; only dimension-one "
                    f"labels have a matrix form for {self.kind} actions"
                )
            return [[self.char_apply(label, a)]]
        raise NoAlphaMap(f"no matrix-coefficient form for kind {self.kind!r}")

    def __repr__(self):
        return (
            f"ModuleAction({self.kind!r}, ring={self.ring.name!r}, "
            f"algebra={list(self.algebra.block_sizes)!r})"
        )


# -- constructors --------------------------------------------------------------


def make_trivial_action(ring: FusionRing, algebra: FiniteDimCStarAlgebra) -> ModuleAction:
    """chi(label) = d(label) * identity; every state is invariant."""
    D = algebra.total_dim
    ops = {}
    for g in ring.generators_and_conjugates:
        ops[g] = float(ring.dim(g)) * np.eye(D, dtype=complex)
    return ModuleAction(ring, algebra, ops, kind="trivial")


def _permutation_matrix(perm: Sequence[int], m: int) -> np.ndarray:
    seen = set(perm)
    if len(perm) != m or seen != set(range(m)):
        raise InvalidSpec(f"{list(perm)!r} is not a permutation of 0..{m - 1}")
    p = np.zeros((m, m), dtype=complex)
    for src, dst in enumerate(perm):
        p[dst, src] = 1.0
    return p


def make_permutation_action(
    group_ring: FusionRing,
    m: int,
    generator_permutations: Mapping,
) -> ModuleAction:
    """Action on functions over m points: each generator permutes the points.

    Needs a group-like ring (all generator dims 1).  Permutations are given
    as sequences `perm` with perm[i] = image of point i; conjugate
    generators default to the inverse permutation when not supplied.
    """
    algebra = FiniteDimCStarAlgebra.commutative(m)
    ops = {}
    perms = dict(generator_permutations)
    for g in group_ring.generators:
        if group_ring.dim(g) != 1:
            raise InvalidSpec(
                f"permutation actions need dimension-one generators; "
                f"{g!r} has dim {group_ring.dim(g)!r}"
            )
        if g not in perms:
            raise InvalidSpec(f"no permutation supplied for generator {g!r}")
    for g, perm in perms.items():
        group_ring.check_label(g)
        ops[g] = _permutation_matrix(perm, m)
    for g in group_ring.generators_and_conjugates:
        if g not in ops:
            gbar = group_ring.conj(g)
            if gbar in ops:
                ops[g] = ops[gbar].T.conj()
    return ModuleAction(group_ring, algebra, ops, kind="permutation")


def make_conjugation_action(
    group_ring: FusionRing,
    unitaries: Mapping,
) -> ModuleAction:
    """Action on a full matrix block by unitary conjugation, T -> U T U*.

    Over the row-major flattening this is the matrix kron(U, conj(U)).
    Conjugate generators default to the adjoint unitary.  NotUnitary is
    raised for non-unitary input.
    """
    mats = {}
    n = None
    for g, u in unitaries.items():
        group_ring.check_label(g)
        if group_ring.dim(g) != 1:
            raise InvalidSpec(
                f"conjugation actions need dimension-one generators; "
                f"{g!r} has dim {group_ring.dim(g)!r}"
            )
        mats[g] = check_unitary(u)
        if n is None:
            n = mats[g].shape[0]
        elif mats[g].shape[0] != n:
            raise InvalidSpec("unitaries must share one size")
    if n is None:
        raise InvalidSpec("no unitaries supplied")
    for g in group_ring.generators:
        if g not in mats:
            raise InvalidSpec(f"no unitary supplied for generator {g!r}")
    for g in group_ring.generators_and_conjugates:
        if g not in mats:
            gbar = group_ring.conj(g)
            if gbar in mats:
                mats[g] = mats[gbar].T.conj()
    algebra = FiniteDimCStarAlgebra.full_matrix(n)
    ops = {g: np.kron(u, u.conj()) for g, u in mats.items()}
    return ModuleAction(group_ring, algebra, ops, kind="conjugation")


# -- word application and axioms ------------------------------------------------


def cfa_apply(action: ModuleAction, word: Sequence, a: AlgebraElement) -> AlgebraElement:
    """Apply a word of (conjugate-)generators: sigma(w[0]) o ... o sigma(w[-1]).

    The word composes right-to-left, matching the operator product of the
    normalized character maps.
    """
    allowed = set(action.ring.generators_and_conjugates)
    allowed.add(action.ring.unit)
    for lab in word:
        if lab not in allowed:
            raise InvalidLabel(
                f"{lab!r} is not a generator (or conjugate) of {action.ring.name!r}"
            )
    out = a
    for lab in reversed(list(word)):
        out = action.sigma_apply(lab, out)
    return out


@dataclass
class ActionCheck:
    name: str
    max_residual: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol


@dataclass
class ActionCheckReport:
    kind: str
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "max_residual": c.max_residual,
                 "tol": c.tol, "passed": c.passed}
                for c in self.checks
            ],
        }


def check_action_axioms(
    action: ModuleAction,
    sample_elements: Sequence | None = None,
    sample_words: Sequence | None = None,
    *,
    seed: int = 0,
    tol: float = 1e-9,
) -> ActionCheckReport:
    """Verify the action laws on sample elements.

    Checked: the unit label acts as the identity; every (conjugate-)
    generator is unital (sigma(1) = 1) and contractive on the samples;
    the star relation chi(g)(a)* = chi(conj g)(a*); and the fusion
    relations chi(g) chi(h) = sum N chi(k) as operators on the samples,
    for all pairs from sample_words (defaults to all generator pairs).
    """
    ring, algebra = action.ring, action.algebra
    if sample_elements is None:
        rng = np.random.default_rng(seed)
        sample_elements = [
            algebra.unit(),
            algebra.random_hermitian(rng),
            algebra.random_element(rng),
        ]
    gens = ring.generators_and_conjugates
    if sample_words is None:
        sample_words = [(g, h) for g in gens for h in gens]

    unit_chk = ActionCheck("unit-label-identity", 0.0, tol)
    unital_chk = ActionCheck("generators-unital", 0.0, tol)
    star_chk = ActionCheck("star-compatibility", 0.0, tol)
    fusion_chk = ActionCheck("fusion-relations", 0.0, tol)
    contract_chk = ActionCheck("normalized-contractive", 0.0, tol)

    one = algebra.unit()
    for a in sample_elements:
        resid = (action.char_apply(ring.unit, a) - a).norm()
        unit_chk.max_residual = max(unit_chk.max_residual, resid)
        for g in gens:
            image = action.sigma_apply(g, a)
            star = (
                action.char_apply(g, a).adjoint()
                - action.char_apply(ring.conj(g), a.adjoint())
            ).norm()
            star_chk.max_residual = max(star_chk.max_residual, star)
            over = image.norm() - a.norm()
            contract_chk.max_residual = max(contract_chk.max_residual, over)
    for g in gens:
        resid = (action.sigma_apply(g, one) - one).norm()
        unital_chk.max_residual = max(unital_chk.max_residual, resid)

    for g, h in sample_words:
        for a in sample_elements:
            lhs = action.char_apply(g, action.char_apply(h, a))
            rhs = algebra.zero()
            for c, n in ring.fuse(g, h).items():
                rhs = rhs + n * action.char_apply(c, a)
            scale = max(1.0, float(ring.dim(g)) * float(ring.dim(h)) * a.norm())
            fusion_chk.max_residual = max(
                fusion_chk.max_residual, (lhs - rhs).norm() / scale
            )

    return ActionCheckReport(
        action.kind,
        [unit_chk, unital_chk, star_chk, fusion_chk, contract_chk],
    )


# -- invariance defects ----------------------------------------------------------


def fa_invariance_defect(action: ModuleAction, phi: State, gamma) -> float:
    """max_e |phi(chi(gamma) e) - d(gamma) phi(e)| / d(gamma) over matrix units.

    Zero exactly when phi is invariant for the label in the fusion-algebraic
    sense.  Computed over the functional vector, so one matrix-vector
    product covers all the matrix units at once.
    """
    if phi.algebra != action.algebra:
        raise AlgebraMismatch("state lives over a different algebra")
    d = float(action.ring.dim(gamma))
    w = phi.functional_vector()
    pushed = action.char_op(gamma).T @ w
    return float(np.max(np.abs(pushed - d * w))) / d


def usual_invariance_defect(action: ModuleAction, phi: State, gamma) -> float:
    """max over matrix units of || (phi(alpha(gamma)(e)_ij))_ij - phi(e) I ||_max.

    The entrywise matrix-coefficient form of invariance; needs the alpha
    form (NoAlphaMap otherwise).
    """
    if phi.algebra != action.algebra:
        raise AlgebraMismatch("state lives over a different algebra")
    worst = 0.0
    for _, e in action.algebra.matrix_units():
        mat = action.alpha_matrix(gamma, e)
        base = complex(phi(e))
        for i, row in enumerate(mat):
            for j, entry in enumerate(row):
                target = base if i == j else 0.0
                worst = max(worst, abs(complex(phi(entry)) - target))
    return worst


# -- averaging ---------------------------------------------------------------


def average_state(
    action: ModuleAction,
    phi: State,
    F,
    *,
    check_bound: bool = True,
) -> State:
    """Average a state over a finite label set with dimension weights.

    phi_F(a) = (1/|F|_w) sum_{alpha in F} d(alpha) phi(chi(alpha) a);
    the result is again a state (re-validated, with tolerances scaled to
    the summation length).  When check_bound is set, the averaged state's
    generator defects are checked against the boundary-ratio bound

        |phi_F(chi(beta) a) - d(beta) phi_F(a)| <= d(beta) |bd F|_w / |F|_w

    for unit-norm matrix units a; a violation raises InvariantViolation
    (it would mean the action or the boundary computation is broken).
    """
    ring, algebra = action.ring, action.algebra
    if phi.algebra != algebra:
        raise AlgebraMismatch("state lives over a different algebra")
    if not isinstance(F, FolnerSet):
        F = FolnerSet.from_labels(ring, F)
    weight = F.weighted_card  # exact when dims are ints
    D = algebra.total_dim
    mean = np.zeros((D, D), dtype=complex)
    for alpha in F.labels:
        d = ring.dim(alpha)
        if isinstance(d, int) and isinstance(weight, int):
            scale = float(Fraction(d, weight))
        else:
            scale = float(d) / float(weight)
        mean += scale * action.char_op(alpha)
    w = phi.functional_vector()
    averaged = mean.T @ w
    slack = max(1e-12, len(F) * 8e-16)
    out = State.from_functional(
        algebra, averaged, pos_tol=max(1e-10, slack), mass_tol=slack
    )
    if check_bound:
        wv = out.functional_vector()
        for beta in ring.generators_and_conjugates:
            ratio = float(folner_ratio(ring, F, beta))
            d = float(ring.dim(beta))
            measured = float(
                np.max(np.abs(action.char_op(beta).T @ wv - d * wv))
            )
            if measured > d * ratio + 1e-9:
                raise InvariantViolation(
                    f"averaging bound violated in direction {beta!r}: "
                    f"defect {measured:.6e} > {d * ratio:.6e}"
                )
    return out


def invariant_state_search(
    action: ModuleAction,
    phi0: State,
    folner_sets: Sequence,
    tol: float = 1e-9,
):
    """Average phi0 over successive sets until the generator defect meets tol.

    Returns (state, trace) where trace rows are (set index, defect).
    Raises NotConverged (carrying the trace) when the sets run out first.
    """
    ring = action.ring
    trace: list = []
    for i, F in enumerate(folner_sets, start=1):
        phi = average_state(action, phi0, F)
        defect = max(
            fa_invariance_defect(action, phi, g)
            for g in ring.generators_and_conjugates
        )
        trace.append((i, defect))
        if defect <= tol:
            return phi, trace
    raise NotConverged(
        f"defect stayed above {tol:g} after {len(trace)} sets "
        f"(best {min(t[1] for t in trace):.3e})" if trace else "no sets supplied",
        trace=trace,
    )


# -- algebra-valued vectors ------------------------------------------------------


@dataclass
class ActionVector:
    """Finitely supported algebra-valued vector with deferred normalization.

    The vector represented is entries / sqrt(denom).  Keeping the
    denominator symbolic lets the canonical vectors normalize exactly:
    <xi|xi> divides a sum by itself instead of multiplying by a rounded
    reciprocal.
    """

    algebra: FiniteDimCStarAlgebra
    entries: dict  # label -> AlgebraElement (raw, i.e. scaled by sqrt(denom))
    denom: float = 1.0

    def support(self):
        return sorted(self.entries, key=label_key)

    def __sub__(self, other: "ActionVector") -> "ActionVector":
        if self.algebra != other.algebra:
            raise AlgebraMismatch("vectors live over different algebras")
        if self.denom == other.denom:
            out = dict(self.entries)
            for lab, e in other.entries.items():
                out[lab] = (out[lab] - e) if lab in out else (-1.0) * e
            return ActionVector(self.algebra, out, self.denom)
        a, b = self._unscaled(), other._unscaled()
        return a - b

    def _unscaled(self) -> "ActionVector":
        if self.denom == 1.0:
            return self
        s = 1.0 / math.sqrt(self.denom)
        return ActionVector(
            self.algebra,
            {lab: s * e for lab, e in self.entries.items()},
            1.0,
        )


def inner_A(f: ActionVector, g: ActionVector) -> AlgebraElement:
    """Algebra-valued pairing <f|g> = sum_a f(a) g(a)^*.

    Labels are accumulated in canonical order; when both vectors share a
    denominator the sum is divided by it exactly.
    """
    if f.algebra != g.algebra:
        raise AlgebraMismatch("vectors live over different algebras")
    total = f.algebra.zero()
    for lab in sorted(set(f.entries) & set(g.entries), key=label_key):
        total = total + f.entries[lab] @ g.entries[lab].adjoint()
    if f.denom == g.denom:
        scale = f.denom
    else:
        scale = math.sqrt(f.denom) * math.sqrt(g.denom)
    return AlgebraElement(
        f.algebra, tuple(blk / scale for blk in total.blocks)
    )


def module_norm(f: ActionVector) -> float:
    """|| <f|f> ||^(1/2), the Hilbert-module norm."""
    return math.sqrt(max(0.0, inner_A(f, f).norm()))


def twisted_convolve(action: ModuleAction, f: ActionVector, g: ActionVector) -> ActionVector:
    """Convolution twisted by the action:

    (f *_sigma g)(c) = sum_{a,b} (N^c_{a,b} / d(a)) f(a) sigma(a)(g(b)).

    For the point vector at a label this reduces to the normalized left
    fusion operator acting on the label coordinate — the algebra side is
    only touched through sigma.
    """
    ring, algebra = action.ring, action.algebra
    if f.algebra != algebra or g.algebra != algebra:
        raise AlgebraMismatch("vectors live over a different algebra")
    out: dict = {}
    for a_lab in f.support():
        fa = f.entries[a_lab]
        d = float(ring.dim(a_lab))
        op = action.char_op(a_lab)
        for b_lab in g.support():
            moved = algebra.from_flat(op @ g.entries[b_lab].flatten())
            prod = fa @ moved
            for c_lab, n in ring.fuse(a_lab, b_lab).items():
                term = (n / (d * d)) * prod
                out[c_lab] = (out[c_lab] + term) if c_lab in out else term
    return ActionVector(algebra, out, f.denom * g.denom)


def point_vector(action: ModuleAction, label, element: AlgebraElement | None = None) -> ActionVector:
    """delta at a label, carrying `element` (default: the unit)."""
    action.ring.check_label(label)
    if element is None:
        element = action.algebra.unit()
    return ActionVector(action.algebra, {label: element}, 1.0)


def canonical_xi(action: ModuleAction, F) -> ActionVector:
    """The canonical almost-invariant vector of a finite set:

    xi = (1/sqrt(|F|_w)) sum_{a in F} d(a) delta_a (x) 1.

    Stored raw with denominator |F|_w accumulated in canonical label
    order, making <xi|xi> exactly the unit.
    """
    ring, algebra = action.ring, action.algebra
    if isinstance(F, FolnerSet):
        labels = F.labels
    else:
        labels = FolnerSet.from_labels(ring, F).labels
    one = algebra.unit()
    entries = {}
    denom = 0.0
    for lab in sorted(labels, key=label_key):
        d = float(ring.dim(lab))
        entries[lab] = d * one
        denom += d * d
    return ActionVector(algebra, entries, denom)


# -- the amenability checks -------------------------------------------------------


@dataclass
class FARow:
    index: int
    tol: float
    normalization_residual: float
    centrality_residual: float
    invariance_residuals: dict  # generator -> residual

    @property
    def max_invariance(self) -> float:
        return max(self.invariance_residuals.values())

    @property
    def passed(self) -> bool:
        return (
            max(self.normalization_residual, self.centrality_residual,
                self.max_invariance)
            <= self.tol
        )


@dataclass
class FAReport:
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(r.passed for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "rows": [
                {
                    "index": r.index,
                    "tol": r.tol,
                    "normalization_residual": r.normalization_residual,
                    "centrality_residual": r.centrality_residual,
                    "invariance_residuals": {
                        str(g): v for g, v in r.invariance_residuals.items()
                    },
                    "max_invariance": r.max_invariance,
                    "passed": r.passed,
                }
                for r in self.rows
            ],
        }


def fa_amenability_check(
    action: ModuleAction,
    xi_sequence: Sequence,
    tol_schedule,
) -> FAReport:
    """Evaluate the three almost-invariance conditions on a vector sequence.

    Per vector: (1) || <xi|xi> - 1 ||, (2) the worst centrality residual
    || xi . e - e . xi ||_mod over the algebra's matrix units, (3) the
    invariance residual || delta_g *_sigma xi - xi ||_mod per generator.
    A row passes when all three stay within its tolerance;
    ``tol_schedule`` is one float or a per-row sequence.
    """
    ring, algebra = action.ring, action.algebra
    xi_list = list(xi_sequence)
    if isinstance(tol_schedule, (int, float)):
        tols = [float(tol_schedule)] * len(xi_list)
    else:
        tols = [float(t) for t in tol_schedule]
        if len(tols) != len(xi_list):
            raise ValueError("tolerance schedule length mismatch")

    report = FAReport()
    one = algebra.unit()
    for i, (xi, tol) in enumerate(zip(xi_list, tols), start=1):
        gram = inner_A(xi, xi)
        norm_resid = (gram - one).norm()
        central = 0.0
        for _, e in algebra.matrix_units():
            left = ActionVector(
                algebra, {lab: v @ e for lab, v in xi.entries.items()}, xi.denom
            )
            right = ActionVector(
                algebra, {lab: e @ v for lab, v in xi.entries.items()}, xi.denom
            )
            central = max(central, module_norm(left - right))
        invariance = {}
        for g in ring.generators_and_conjugates:
            moved = twisted_convolve(action, point_vector(action, g), xi)
            invariance[g] = module_norm(moved - xi)
        report.rows.append(
            FARow(i, tol, norm_resid, central, invariance)
        )
    return report
