"""Self-adjoint eigendecompositions with clustered eigenspaces."""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy.linalg import LinAlgError, eigh

from numeric.fields import ScalarField, as_array
from numeric.subspaces import Subspace
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from utils.errors import InadmissibleCutoffError, NonSymmetricError, VerificationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Cluster:
    """One eigenvalue (cluster mean) with its orthonormal eigenspace basis."""
    value: float
    basis: np.ndarray

    @property
    def multiplicity(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class SelfAdjointModel:
    """Full eigendecomposition of a symmetric matrix, eigenspaces clustered."""
    operator: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clusters: Tuple[Cluster, ...]
    multiplicity_field: ScalarField = ScalarField.R
    rank_tol: float = DEFAULT_TOLERANCES.rank_tol

    @property
    def dim(self) -> int:
        return self.operator.shape[0]

    def kmultiplicity(self, cluster: Cluster) -> int:
        return cluster.multiplicity // self.multiplicity_field.real_dim

    def count_in(self, lo: float, hi: float, closed: bool = True) -> int:
        """Real dimension of the eigenspaces with eigenvalue in [lo, hi] (or (lo, hi))."""
        total = 0
        for c in self.clusters:
            inside = (lo <= c.value <= hi) if closed else (lo < c.value < hi)
            if inside:
                total += c.multiplicity
        return total

    def distance_to_spectrum(self, x: float) -> float:
        if self.dim == 0:
            return float("inf")
        return float(np.min(np.abs(self.eigenvalues - x)))


def eig_selfadjoint(M, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                    field: ScalarField = ScalarField.R) -> SelfAdjointModel:
    """Eigendecomposition of a symmetric matrix with eigenvalues clustered within eig_tol."""
    A = as_array(M)
    n = A.shape[0]
    if A.shape != (n, n):
        raise NonSymmetricError(f"Matrix of shape {A.shape} is not square")
    scale = max(1.0, float(np.linalg.norm(A)))
    if np.linalg.norm(A - A.T) > cfg.eig_tol * scale:
        raise NonSymmetricError("Matrix is not symmetric",
                                {"asymmetry": float(np.linalg.norm(A - A.T))})
    if n == 0:
        return SelfAdjointModel(A, np.zeros(0), np.zeros((0, 0)), tuple(), field, cfg.rank_tol)

    A = (A + A.T) / 2.0
    try:
        values, vectors = eigh(A)
    except LinAlgError as e:
        raise VerificationError(f"Eigensolver failed to converge: {e}")

    residual = np.linalg.norm(A @ vectors - vectors * values, axis=0)
    if residual.size and residual.max() > cfg.eig_tol * scale * 100:
        logger.warning(f"Eigen residual {residual.max():.2e} above tolerance")

    clusters: List[Cluster] = []
    start = 0
    for i in range(1, n + 1):
        if i == n or values[i] - values[i - 1] > cfg.eig_tol * scale:
            block = vectors[:, start:i]
            basis = Subspace(block, cfg.rank_tol).canonical_basis()
            clusters.append(Cluster(float(np.mean(values[start:i])), basis))
            start = i

    return SelfAdjointModel(A, values, vectors, tuple(clusters), field, cfg.rank_tol)


def _check_endpoint(model: SelfAdjointModel, x: float, cfg: ToleranceConfig) -> None:
    if np.isfinite(x) and model.distance_to_spectrum(x) < cfg.gap_tol:
        raise InadmissibleCutoffError(
            f"Cutoff {x:.6g} within gap_tol of the spectrum",
            {"cutoff": x, "distance": model.distance_to_spectrum(x)})


def spectral_interval(model: SelfAdjointModel, lo: float, hi: float,
                      cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                      include_lo: bool = True, include_hi: bool = True,
                      check: bool = True) -> Subspace:
    """Sum of eigenspaces with eigenvalue in the interval between lo and hi.

    Finite endpoints must keep gap_tol distance from the spectrum unless
    check is off, in which case the include flags decide ties.
    """
    if check:
        _check_endpoint(model, lo, cfg)
        _check_endpoint(model, hi, cfg)
    blocks = []
    for c in model.clusters:
        above = c.value > lo or (include_lo and c.value >= lo)
        below = c.value < hi or (include_hi and c.value <= hi)
        if above and below:
            blocks.append(c.basis)
    if not blocks:
        return Subspace.zero(model.dim, cfg.rank_tol)
    return Subspace(np.hstack(blocks), cfg.rank_tol)


def flow_map(model: SelfAdjointModel, t: float) -> np.ndarray:
    """e^{-tA} through the eigendecomposition."""
    V = model.eigenvectors
    if model.dim == 0:
        return np.zeros((0, 0))
    return (V * np.exp(-t * model.eigenvalues)) @ V.T


def admissible_cutoffs(values: np.ndarray, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                       lower: float = 0.0) -> List[float]:
    """Midpoints of the gaps of a sorted spectrum above lower, plus one beyond the top."""
    points = sorted(set(float(v) for v in values if v > lower))
    cutoffs: List[float] = []
    previous = lower
    for v in points:
        if v - previous > 2 * cfg.gap_tol:
            cutoffs.append((previous + v) / 2.0)
        previous = v
    cutoffs.append(previous + 1.0)
    return cutoffs


def smallest_admissible(model: SelfAdjointModel, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                        start: float = 0.0) -> float:
    """start itself when admissible, otherwise the first gap midpoint above start."""
    if model.distance_to_spectrum(start) >= cfg.gap_tol:
        return start
    return admissible_cutoffs(model.eigenvalues, cfg, lower=start)[0]


def operator_norm(M: np.ndarray) -> float:
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


