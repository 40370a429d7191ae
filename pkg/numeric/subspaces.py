"""Orthonormal subspaces of a Euclidean ambient space."""

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.linalg import null_space, subspace_angles, svd

from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from utils.errors import DimensionMismatchError

# Pivot ties closer than this are broken by the lower coordinate index
_PIVOT_TIE = 1e-6


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace given by an orthonormal column basis."""
    basis: np.ndarray
    rank_tol: float = DEFAULT_TOLERANCES.rank_tol

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    @classmethod
    def zero(cls, ambient_dim: int, rank_tol: float = DEFAULT_TOLERANCES.rank_tol) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0)), rank_tol)

    @classmethod
    def full(cls, ambient_dim: int, rank_tol: float = DEFAULT_TOLERANCES.rank_tol) -> "Subspace":
        return cls(np.eye(ambient_dim), rank_tol)

    @classmethod
    def span(cls, vectors: np.ndarray, rank_tol: float = DEFAULT_TOLERANCES.rank_tol,
             relative: bool = True) -> "Subspace":
        """Span of the columns, rank decided by singular values."""
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        n, k = vectors.shape
        if k == 0 or n == 0:
            return cls.zero(n, rank_tol)
        U, s, _ = svd(vectors, full_matrices=False)
        threshold = rank_tol * (s[0] if relative and s[0] > 0 else 1.0)
        rank = int(np.sum(s > threshold))
        return cls(U[:, :rank].copy(), rank_tol)

    @classmethod
    def coordinate(cls, ambient_dim: int, indices: Iterable[int],
                   rank_tol: float = DEFAULT_TOLERANCES.rank_tol) -> "Subspace":
        """Span of standard basis vectors."""
        indices = list(indices)
        return cls(np.eye(ambient_dim)[:, indices].copy(), rank_tol)

    def _check_ambient(self, other: "Subspace") -> None:
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatchError(
                f"Ambient mismatch: {self.ambient_dim} vs {other.ambient_dim}")

    def contains(self, v: np.ndarray, tol: Optional[float] = None) -> bool:
        v = np.asarray(v, dtype=float)
        tol = self.rank_tol if tol is None else tol
        residual = v - self.projector @ v
        return bool(np.linalg.norm(residual) <= tol * max(1.0, np.linalg.norm(v)))

    def contains_subspace(self, other: "Subspace") -> bool:
        self._check_ambient(other)
        if other.dim == 0:
            return True
        residual = other.basis - self.projector @ other.basis
        return bool(np.linalg.norm(residual) <= self.rank_tol * max(1, other.dim))

    def equals(self, other: "Subspace") -> bool:
        return self.dim == other.dim and self.contains_subspace(other)

    def perp(self) -> "Subspace":
        """Orthogonal complement in the ambient space."""
        n = self.ambient_dim
        if self.dim == 0:
            return Subspace.full(n, self.rank_tol)
        if self.dim == n:
            return Subspace.zero(n, self.rank_tol)
        complement = null_space(self.basis.T, rcond=self.rank_tol)
        return Subspace(complement, self.rank_tol)

    def join(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        return Subspace.span(np.hstack([self.basis, other.basis]), self.rank_tol, relative=False)

    def meet(self, other: "Subspace") -> "Subspace":
        """Intersection via the null space of [B1, -B2]."""
        self._check_ambient(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient_dim, self.rank_tol)
        stacked = np.hstack([self.basis, -other.basis])
        coefficients = null_space(stacked, rcond=self.rank_tol)
        if coefficients.shape[1] == 0:
            return Subspace.zero(self.ambient_dim, self.rank_tol)
        vectors = self.basis @ coefficients[:self.dim, :]
        return Subspace.span(vectors, self.rank_tol, relative=False)

    def apply(self, M: np.ndarray) -> "Subspace":
        """Image under a linear map."""
        M = np.asarray(M, dtype=float)
        if M.shape[1] != self.ambient_dim:
            raise DimensionMismatchError(f"Map of shape {M.shape} on ambient {self.ambient_dim}")
        if self.dim == 0:
            return Subspace.zero(M.shape[0], self.rank_tol)
        return Subspace.span(M @ self.basis, self.rank_tol)

    def canonical_basis(self) -> np.ndarray:
        """Deterministic orthonormal basis seeded by the ambient standard basis.

        Greedy Gram-Schmidt on projected coordinate vectors: at each step the
        coordinate with the largest residual wins, ties go to the lower index;
        each vector is signed to have a positive component on its pivot.
        """
        if self.dim == 0:
            return self.basis.copy()
        P = self.projector
        chosen = []
        Q = np.zeros((self.ambient_dim, 0))
        for _ in range(self.dim):
            residuals = P - Q @ (Q.T @ P)
            norms = np.linalg.norm(residuals, axis=0)
            best = norms.max()
            pivot = int(np.flatnonzero(norms >= best - _PIVOT_TIE)[0])
            v = residuals[:, pivot] / norms[pivot]
            if v[pivot] < 0:
                v = -v
            chosen.append(pivot)
            Q = np.hstack([Q, v[:, None]])
        return Q

    def canonical(self) -> "Subspace":
        return Subspace(self.canonical_basis(), self.rank_tol)

    def angles_to(self, other: "Subspace") -> np.ndarray:
        """Principal angles (radians) between equal-dimensional subspaces."""
        self._check_ambient(other)
        if self.dim == 0 and other.dim == 0:
            return np.zeros(0)
        return subspace_angles(self.basis, other.basis)


def subspace_meet(S1: Subspace, S2: Subspace, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> Subspace:
    """Orthonormal basis of S1 ∩ S2."""
    return Subspace(S1.basis, cfg.rank_tol).meet(Subspace(S2.basis, cfg.rank_tol))


def subspace_perp(S: Subspace) -> Subspace:
    return S.perp()


def direct_sum(S1: Subspace, S2: Subspace) -> Subspace:
    """S1 ⊕ S2 inside the direct sum of the ambient spaces."""
    basis = np.zeros((S1.ambient_dim + S2.ambient_dim, S1.dim + S2.dim))
    basis[:S1.ambient_dim, :S1.dim] = S1.basis
    basis[S1.ambient_dim:, S1.dim:] = S2.basis
    return Subspace(basis, S1.rank_tol)
