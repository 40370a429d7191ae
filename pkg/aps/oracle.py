"""Grid ODE oracle for cylinder problems.

Crank-Nicolson shooting over the whole interval: the propagator is the
product of (I + hA/2)^{-1} (I - hA/2) over all grid steps, and kernels are
read off as null spaces of the shooting residual. Independent of the
eigenmode construction in aps.solver; meant for moderate |lambda| L.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List

import numpy as np
from numpy.linalg import matrix_power
from scipy.linalg import null_space, solve as linear_solve

from aps.boundary import adjoint_bc
from aps.solver import CylinderProblem, SolveResult
from config import ORACLE_GRID_POINTS
from numeric.subspaces import Subspace

logger = logging.getLogger(__name__)

ORACLE_RCOND = 1e-7


@dataclass(frozen=True, eq=False)
class OracleResult:
    ker_basis: Subspace
    coker_dim: int
    grid_points: int

    @property
    def ker_dim(self) -> int:
        return self.ker_basis.dim

    def to_dict(self) -> Dict:
        return {"ker_dim": self.ker_dim, "coker_dim": self.coker_dim, "grid_points": self.grid_points}


def _grid(p: CylinderProblem, points: int) -> List[int]:
    total = sum(L for _, L in p.pieces())
    return [max(1, int(round(points * L / total))) for _, L in p.pieces()]


def crank_nicolson_propagator(p: CylinderProblem, points: int = ORACLE_GRID_POINTS,
                              sign: int = 1) -> np.ndarray:
    """Approximation of the solution map of psi' = -sign A psi from t = 0 to t = L."""
    n = p.dim
    eye = np.eye(n)
    P = eye.copy()
    for (A, L), steps in zip(p.pieces(), _grid(p, points)):
        h = L / steps
        step = linear_solve(eye + sign * h * A / 2.0, eye - sign * h * A / 2.0)
        P = matrix_power(step, steps) @ P
    return P


def _shooting_null(top: np.ndarray, bottom: np.ndarray, B: Subspace) -> np.ndarray:
    """Coefficients c with (top c, bottom c) in B."""
    residual = np.eye(B.ambient_dim) - B.projector
    M = residual @ np.vstack([top, bottom])
    scale = np.linalg.norm(np.vstack([top, bottom]), axis=0)
    scale[scale == 0] = 1.0
    return null_space(M / scale, rcond=ORACLE_RCOND) / scale[:, None]


def oracle_solve(p: CylinderProblem, points: int = ORACLE_GRID_POINTS) -> OracleResult:
    """Kernel initial values and cokernel dimension on a uniform grid."""
    n = p.dim
    if n == 0:
        return OracleResult(Subspace.zero(0), 0, points)
    B = p.condition()
    P = crank_nicolson_propagator(p, points)
    ker = _shooting_null(np.eye(n), P, B.subspace)
    # adjoint solutions phi = sigma chi with chi' = A chi
    sigma = p.cyl.sigma
    Q = crank_nicolson_propagator(p, points, sign=-1)
    B_adj = adjoint_bc(B, p.boundary_sigma).subspace
    coker = _shooting_null(sigma, sigma @ Q, B_adj)
    logger.debug(f"oracle: ker={ker.shape[1]} coker={coker.shape[1]} grid={points}")
    return OracleResult(Subspace.span(ker) if ker.shape[1] else Subspace.zero(n), coker.shape[1], points)


def compare_with_oracle(p: CylinderProblem, result: SolveResult,
                        points: int = ORACLE_GRID_POINTS) -> Dict:
    """Index, dimensions and largest principal angle between kernels."""
    oracle = oracle_solve(p, points)
    same_dims = oracle.ker_dim == result.ker_dim and oracle.coker_dim == result.coker_dim
    angle = 0.0
    if same_dims and oracle.ker_dim:
        angle = float(np.max(result.ker_basis.angles_to(oracle.ker_basis)))
    return {
        "solver": {"ker_dim": result.ker_dim, "coker_dim": result.coker_dim},
        "oracle": oracle.to_dict(),
        "dims_agree": same_dims,
        "max_angle": angle if same_dims else None
    }
