"""Exact kernels, cokernels and indices of cylinder boundary value problems.

A solution of sigma (d/dt + A) psi = 0 on [0, L] is psi(t) = e^{-tA} psi(0).
Everything is computed on the boundary model W + W of values at t = 0 and
t = L, where the boundary operator is diag(A, -A) and the symbol
diag(sigma, -sigma). Cauchy data of one segment are spanned mode by mode by
(v, e^{-L lam} v) for lam >= 0 and (e^{L lam} v, v) for lam < 0, so no
exponential ever exceeds 1.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import block_diag, null_space

from aps.boundary import BoundaryCondition, adjoint_bc, graph_condition, separated
from numeric.spectral import eig_selfadjoint, spectral_interval
from numeric.subspaces import Subspace
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from operators.cylinders import CylinderData
from utils.errors import DimensionMismatchError, UsageError, VerificationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CylinderProblem:
    """sigma (d/dt + A(t)) on [0, L] with a boundary condition on W + W.

    endL is given for the far-end operator -A; with far_gauge Phi0 it is given
    in the coordinates Phi0 psi(L). A monodromy g glues the ends by
    psi(L) = g psi(0). segments replace the constant A by piecewise data.
    """
    cyl: CylinderData
    length: float
    end0: Optional[BoundaryCondition] = None
    endL: Optional[BoundaryCondition] = None
    monodromy: Optional[np.ndarray] = None
    far_gauge: Optional[np.ndarray] = None
    segments: Tuple[Tuple[np.ndarray, float], ...] = field(default=())
    boundary: Optional[BoundaryCondition] = None

    def __post_init__(self):
        if self.length <= 0:
            raise UsageError(f"Cylinder length must be positive, got {self.length}")
        n = self.cyl.dim
        for A, L in self.segments:
            if A.shape != (n, n) or L <= 0:
                raise DimensionMismatchError(f"Segment of shape {A.shape} and length {L} on W of dim {n}")
        if self.boundary is None and self.monodromy is None and (self.end0 is None or self.endL is None):
            raise UsageError("A cylinder problem needs two end conditions, a monodromy or a full condition")

    @property
    def dim(self) -> int:
        return self.cyl.dim

    @property
    def k(self) -> int:
        return self.cyl.field.real_dim

    def pieces(self) -> List[Tuple[np.ndarray, float]]:
        if self.segments:
            return list(self.segments)
        return [(self.cyl.A, float(self.length))]

    @property
    def near_operator(self) -> np.ndarray:
        return self.pieces()[0][0]

    @property
    def far_operator(self) -> np.ndarray:
        return self.pieces()[-1][0]

    @property
    def boundary_sigma(self) -> np.ndarray:
        return block_diag(self.cyl.sigma, -self.cyl.sigma)

    @property
    def boundary_operator(self) -> np.ndarray:
        return block_diag(self.near_operator, -self.far_operator)

    def condition(self) -> BoundaryCondition:
        """The full boundary condition in solver coordinates."""
        if self.boundary is not None:
            if self.boundary.ambient_dim != 2 * self.dim:
                raise DimensionMismatchError(f"Boundary condition of ambient dim {self.boundary.ambient_dim}")
            return self.boundary
        if self.monodromy is not None:
            return graph_condition(self.monodromy)
        far = self.endL
        if self.far_gauge is not None:
            far = BoundaryCondition(far.subspace.apply(self.far_gauge.T), far.delta, far.lagrangian, far.label)
        return separated(self.end0, far)

    def with_boundary(self, boundary: BoundaryCondition) -> "CylinderProblem":
        return CylinderProblem(self.cyl, self.length, segments=self.segments, boundary=boundary)

    def to_dict(self) -> Dict:
        return {"dim": self.dim, "length": self.length, "segments": len(self.pieces()),
                "glued": self.monodromy is not None}


@dataclass(frozen=True, eq=False)
class SolveResult:
    ker: Subspace
    coker: Subspace
    k: int
    boundary_dim: int
    dim: int
    conditioning: float = 1.0

    @property
    def ker_dim(self) -> int:
        return self.ker.dim

    @property
    def coker_dim(self) -> int:
        return self.coker.dim

    @property
    def ker_basis(self) -> Subspace:
        """Initial values psi(0) of the kernel."""
        return Subspace.span(self.ker.basis[:self.dim, :]).canonical() if self.ker.dim else Subspace.zero(self.dim)

    @property
    def coker_basis(self) -> Subspace:
        return Subspace.span(self.coker.basis[:self.dim, :]).canonical() if self.coker.dim else Subspace.zero(self.dim)

    @property
    def real_index(self) -> int:
        return self.ker_dim - self.coker_dim

    @property
    def index(self) -> int:
        if self.real_index % self.k:
            raise DimensionMismatchError(f"Real index {self.real_index} is not divisible by {self.k}")
        return self.real_index // self.k

    def to_dict(self) -> Dict:
        return {
            "ker_dim": self.ker_dim // self.k if self.ker_dim % self.k == 0 else self.ker_dim,
            "coker_dim": self.coker_dim // self.k if self.coker_dim % self.k == 0 else self.coker_dim,
            "real_ker_dim": self.ker_dim,
            "real_coker_dim": self.coker_dim,
            "index": self.index,
            "ker_basis": np.round(self.ker_basis.basis, 12).tolist(),
            "coker_basis": np.round(self.coker_basis.basis, 12).tolist()
        }


def segment_relation(A: np.ndarray, length: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> np.ndarray:
    """Basis (2n x n) of {(v, e^{-length A} v)} with entries bounded by 1."""
    model = eig_selfadjoint(A, cfg)
    V = model.eigenvectors
    n = model.dim
    top = np.zeros((n, n))
    bottom = np.zeros((n, n))
    for j, lam in enumerate(model.eigenvalues):
        if lam >= 0:
            top[:, j] = V[:, j]
            bottom[:, j] = np.exp(-length * lam) * V[:, j]
        else:
            top[:, j] = np.exp(length * lam) * V[:, j]
            bottom[:, j] = V[:, j]
    return np.vstack([top, bottom])


def _compose(first: np.ndarray, second: np.ndarray, n: int, cfg: ToleranceConfig) -> np.ndarray:
    X1, Y1 = first[:n], first[n:]
    Y2, Z2 = second[:n], second[n:]
    coefficients = null_space(np.hstack([Y1, -Y2]), rcond=cfg.rank_tol)
    a, b = coefficients[:first.shape[1]], coefficients[first.shape[1]:]
    return np.vstack([X1 @ a, Z2 @ b])


def cauchy_data(p: CylinderProblem, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> Subspace:
    """Boundary values (psi(0), psi(L)) of all solutions."""
    n = p.dim
    if n == 0:
        return Subspace.zero(0)
    relation = None
    for A, L in p.pieces():
        step = segment_relation(A, L, cfg)
        relation = step if relation is None else _compose(relation, step, n, cfg)
    C = Subspace.span(relation, cfg.rank_tol)
    if C.dim != n:
        raise VerificationError(f"Cauchy data has dimension {C.dim}, expected {n}")
    return C


def _meet_with_margin(S1: Subspace, S2: Subspace, cfg: ToleranceConfig) -> Tuple[Subspace, float]:
    if S1.dim == 0 or S2.dim == 0:
        return Subspace.zero(S1.ambient_dim, cfg.rank_tol), 1.0
    s = np.linalg.svd(np.hstack([S1.basis, -S2.basis]), compute_uv=False)
    threshold = cfg.rank_tol * max(1.0, float(s[0]))
    above = s[s > threshold]
    margin = float(above.min() / s[0]) if above.size else 1.0
    return Subspace(S1.basis, cfg.rank_tol).meet(Subspace(S2.basis, cfg.rank_tol)), margin


def solve(p: CylinderProblem, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> SolveResult:
    """Kernel C cap B and cokernel (sigma C)^perp cap B^adj, with the index over K."""
    n = p.dim
    B = p.condition()
    if n == 0:
        empty = Subspace.zero(0)
        return SolveResult(empty, empty, p.k, 0, 0)
    C = cauchy_data(p, cfg)
    sigma = p.boundary_sigma
    ker, margin_ker = _meet_with_margin(C, B.subspace, cfg)
    adjoint_data = C.apply(sigma).perp()
    coker, margin_coker = _meet_with_margin(adjoint_data, adjoint_bc(B, sigma).subspace, cfg)
    result = SolveResult(ker, coker, p.k, B.dim, n, min(margin_ker, margin_coker))
    if result.real_index != B.dim - n:
        raise VerificationError("Kernel and cokernel dimensions disagree with dim B - dim W",
                                {"ker": ker.dim, "coker": coker.dim, "dim_B": B.dim, "dim_W": n,
                                 "conditioning": result.conditioning})
    logger.debug(f"solve: ker={ker.dim} coker={coker.dim} dimB={B.dim} n={n} "
                 f"margin={result.conditioning:.2e}")
    return result


def projected_cauchy_data(p: CylinderProblem, delta: float,
                          cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> Subspace:
    """C_delta: phi in W_delta with psi - phi in B_APS(-delta) for some boundary value psi."""
    C = cauchy_data(p, cfg)
    model = eig_selfadjoint(p.boundary_operator, cfg)
    W = spectral_interval(model, -delta, delta, cfg)
    below = spectral_interval(model, -np.inf, delta, cfg, include_hi=True)
    reachable = C.meet(below)
    if reachable.dim == 0 or W.dim == 0:
        return Subspace.zero(2 * p.dim, cfg.rank_tol)
    return Subspace.span(W.projector @ reachable.basis, cfg.rank_tol)


def boundary_space(p: CylinderProblem, delta: float, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> Subspace:
    """W_delta of the boundary operator diag(A(0), -A(L))."""
    return spectral_interval(eig_selfadjoint(p.boundary_operator, cfg), -delta, delta, cfg)
