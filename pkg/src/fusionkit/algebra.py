"""Finite-dimensional C*-algebras: block matrices, elements, states.

An algebra is a direct sum of full matrix blocks, fixed by its block sizes;
elements hold one complex matrix per block.  States are given by density
blocks (positive semidefinite, total trace one) pairing with elements as
``phi(a) = sum_b tr(rho_b a_b)``.

Flattening convention: an element's blocks are concatenated row-major into
a vector of length ``sum n_b^2``; matrix units enumerate in exactly that
order, so the k-th matrix unit flattens to the k-th standard basis vector.
Linear maps on the algebra (the character operators in
:mod:`fusionkit.actions`) are square matrices over this flattening.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import AlgebraMismatch, InvariantViolation, NotUnitary


class FiniteDimCStarAlgebra:
    """A direct sum of matrix blocks, determined by its block sizes."""

    def __init__(self, block_sizes: Sequence[int]):
        sizes = tuple(int(n) for n in block_sizes)
        if not sizes or any(n < 1 for n in sizes):
            raise ValueError("block sizes must be positive integers")
        self.block_sizes = sizes
        #: flattened (real-linear over C) dimension: sum of squares
        self.total_dim = sum(n * n for n in sizes)
        self._offsets = []
        off = 0
        for n in sizes:
            self._offsets.append(off)
            off += n * n

    @classmethod
    def commutative(cls, points: int) -> "FiniteDimCStarAlgebra":
        """Functions on a finite set: `points` blocks of size one."""
        return cls((1,) * points)

    @classmethod
    def full_matrix(cls, n: int) -> "FiniteDimCStarAlgebra":
        return cls((n,))

    def __eq__(self, other):
        return (isinstance(other, FiniteDimCStarAlgebra)
                and self.block_sizes == other.block_sizes)

    def __hash__(self):
        return hash(self.block_sizes)

    def __repr__(self):
        return f"FiniteDimCStarAlgebra({list(self.block_sizes)!r})"

    # -- element constructors -------------------------------------------

    def element(self, blocks: Iterable[np.ndarray]) -> "AlgebraElement":
        mats = []
        for n, blk in zip(self.block_sizes, blocks, strict=True):
            m = np.array(blk, dtype=complex)
            if m.shape != (n, n):
                raise ValueError(f"block shape {m.shape} != ({n}, {n})")
            mats.append(m)
        return AlgebraElement(self, tuple(mats))

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(
            self, tuple(np.zeros((n, n), dtype=complex) for n in self.block_sizes)
        )

    def unit(self) -> "AlgebraElement":
        return AlgebraElement(
            self, tuple(np.eye(n, dtype=complex) for n in self.block_sizes)
        )

    def matrix_unit(self, block: int, i: int, j: int) -> "AlgebraElement":
        out = self.zero()
        out.blocks[block][i, j] = 1.0
        return out

    def matrix_units(self):
        """All matrix units in flattening order, as (index_triple, element)."""
        for b, n in enumerate(self.block_sizes):
            for i in range(n):
                for j in range(n):
                    yield (b, i, j), self.matrix_unit(b, i, j)

    def from_flat(self, vec: np.ndarray) -> "AlgebraElement":
        v = np.asarray(vec, dtype=complex).reshape(self.total_dim)
        mats = []
        for n, off in zip(self.block_sizes, self._offsets):
            mats.append(v[off:off + n * n].reshape(n, n).copy())
        return AlgebraElement(self, tuple(mats))

    def random_hermitian(self, rng: np.random.Generator) -> "AlgebraElement":
        mats = []
        for n in self.block_sizes:
            m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            mats.append((m + m.conj().T) / 2)
        return AlgebraElement(self, tuple(mats))

    def random_element(self, rng: np.random.Generator) -> "AlgebraElement":
        mats = [
            rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            for n in self.block_sizes
        ]
        return AlgebraElement(self, tuple(mats))


class AlgebraElement:
    """One complex matrix per block; arithmetic is blockwise."""

    __slots__ = ("algebra", "blocks")

    def __init__(self, algebra: FiniteDimCStarAlgebra, blocks: tuple):
        self.algebra = algebra
        self.blocks = blocks

    def _like(self, other) -> None:
        if not isinstance(other, AlgebraElement) or other.algebra != self.algebra:
            raise AlgebraMismatch("operands live over different algebras")

    def __add__(self, other):
        self._like(other)
        return AlgebraElement(
            self.algebra, tuple(a + b for a, b in zip(self.blocks, other.blocks))
        )

    def __sub__(self, other):
        self._like(other)
        return AlgebraElement(
            self.algebra, tuple(a - b for a, b in zip(self.blocks, other.blocks))
        )

    def __mul__(self, scalar):
        return AlgebraElement(self.algebra, tuple(scalar * b for b in self.blocks))

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._like(other)
        return AlgebraElement(
            self.algebra, tuple(a @ b for a, b in zip(self.blocks, other.blocks))
        )

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, tuple(b.conj().T for b in self.blocks))

    def norm(self) -> float:
        """Operator norm: the largest blockwise spectral norm."""
        return max(
            float(np.linalg.norm(b, 2)) if b.size else 0.0 for b in self.blocks
        )

    def flatten(self) -> np.ndarray:
        return np.concatenate([b.reshape(-1) for b in self.blocks])

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(
            np.max(np.abs(b - b.conj().T)) <= tol * max(1.0, np.max(np.abs(b)))
            for b in self.blocks
        )

    def allclose(self, other, atol: float = 1e-10) -> bool:
        self._like(other)
        return all(
            np.allclose(a, b, atol=atol)
            for a, b in zip(self.blocks, other.blocks)
        )

    def __repr__(self):
        sizes = self.algebra.block_sizes
        return f"AlgebraElement(blocks={list(sizes)!r}, norm={self.norm():.4g})"


def check_unitary(matrix: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Validate U U* = I; returns the matrix as complex ndarray."""
    u = np.array(matrix, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NotUnitary(f"expected a square matrix, got shape {u.shape}")
    resid = np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0])))
    if resid > tol:
        raise NotUnitary(f"unitarity residual {resid:.3e} exceeds {tol:.0e}")
    return u


class State:
    """A positive normalized functional, stored as density blocks.

    Invariants (checked at construction): each density block is hermitian,
    its eigenvalues clear -pos_tol, and the total trace is within mass_tol
    of one.  ``phi(a) = sum_b tr(rho_b a_b)``.
    """

    __slots__ = ("algebra", "densities")

    def __init__(
        self,
        algebra: FiniteDimCStarAlgebra,
        densities: Iterable[np.ndarray],
        *,
        pos_tol: float = 1e-10,
        mass_tol: float = 1e-12,
    ):
        mats = []
        for n, blk in zip(algebra.block_sizes, densities, strict=True):
            m = np.array(blk, dtype=complex)
            if m.shape != (n, n):
                raise ValueError(f"density block shape {m.shape} != ({n}, {n})")
            mats.append(m)
        self.algebra = algebra
        self.densities = tuple(mats)
        self._validate(pos_tol, mass_tol)

    def _validate(self, pos_tol: float, mass_tol: float) -> None:
        mass = 0.0
        for m in self.densities:
            herm = float(np.max(np.abs(m - m.conj().T)))
            if herm > pos_tol:
                raise InvariantViolation(
                    f"density block not hermitian (residual {herm:.3e})"
                )
            low = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
            if low < -pos_tol:
                raise InvariantViolation(
                    f"density block has eigenvalue {low:.3e} below -{pos_tol:.0e}"
                )
            mass += float(np.trace(m).real)
        if abs(mass - 1.0) > mass_tol:
            raise InvariantViolation(f"total trace {mass!r} is not 1")

    # -- constructors ------------------------------------------------------

    @classmethod
    def vector_state(cls, algebra, block: int, vec) -> "State":
        v = np.asarray(vec, dtype=complex)
        n = algebra.block_sizes[block]
        if v.shape != (n,):
            raise ValueError(f"vector length {v.shape} != block size {n}")
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise ValueError("zero vector cannot define a state")
        v = v / nrm
        densities = [np.zeros((m, m), dtype=complex) for m in algebra.block_sizes]
        densities[block] = np.outer(v, v.conj())
        return cls(algebra, densities)

    @classmethod
    def point_mass(cls, algebra, block: int = 0, index: int = 0) -> "State":
        n = algebra.block_sizes[block]
        v = np.zeros(n)
        v[index] = 1.0
        return cls.vector_state(algebra, block, v)

    @classmethod
    def tracial(cls, algebra) -> "State":
        """The normalized trace (uniform over all matrix diagonal mass)."""
        total = sum(algebra.block_sizes)
        densities = [
            np.eye(n, dtype=complex) / total for n in algebra.block_sizes
        ]
        return cls(algebra, densities)

    @classmethod
    def from_functional(cls, algebra, weights: np.ndarray, **tols) -> "State":
        """State from its functional vector: phi(a) = weights . flatten(a)."""
        w = np.asarray(weights, dtype=complex).reshape(algebra.total_dim)
        elem = algebra.from_flat(w)
        densities = [blk.T.copy() for blk in elem.blocks]
        return cls(algebra, densities, **tols)

    # -- evaluation ----------------------------------------------------------

    def __call__(self, a: AlgebraElement):
        if a.algebra != self.algebra:
            raise AlgebraMismatch("element lives over a different algebra")
        z = sum(
            complex(np.trace(rho @ blk))
            for rho, blk in zip(self.densities, a.blocks)
        )
        if abs(z.imag) <= 1e-12 * (1.0 + abs(z.real)):
            return z.real
        return z

    def functional_vector(self) -> np.ndarray:
        """weights with phi(a) = weights . flatten(a) (inverse of
        from_functional)."""
        return np.concatenate([rho.T.reshape(-1) for rho in self.densities])

    def __repr__(self):
        sizes = self.algebra.block_sizes
        return f"State(blocks={list(sizes)!r})"
