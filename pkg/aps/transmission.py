"""Mapping tori, transmission conditions and their deformation to nearly APS form."""

import logging
from dataclasses import dataclass
from typing import Dict, List

import numpy as np
from scipy.linalg import expm, null_space

from aps.boundary import BoundaryCondition, graph_condition
from aps.solver import CylinderProblem, SolveResult, boundary_space, solve
from numeric.fields import field_for_ell, gamma_order
from numeric.spectral import eig_selfadjoint, spectral_interval
from numeric.subspaces import Subspace
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from operators.cylinders import CylinderData
from utils.errors import UsageError, VerificationError

logger = logging.getLogger(__name__)

DEFORMATION_SAMPLES = 20


@dataclass(frozen=True, eq=False)
class ClosedIndex:
    """Kernel data of the mapping torus and ind_{l+1} in Gamma_{l+1}."""
    ker_dim: int
    coker_dim: int
    k: int
    order: int

    @property
    def value(self) -> int:
        if self.order == 0:
            return (self.ker_dim - self.coker_dim) // self.k
        if self.order == 2:
            return (self.ker_dim // self.k) % 2
        return 0

    def to_dict(self) -> Dict:
        return {"ker_dim": self.ker_dim, "coker_dim": self.coker_dim, "value": self.value}


def _check_orthogonal(g: np.ndarray, tol: float = 1e-10) -> None:
    if g.shape[0] != g.shape[1] or np.linalg.norm(g.T @ g - np.eye(g.shape[0])) > tol * max(1, g.shape[0]):
        raise UsageError("Monodromy must be an orthogonal matrix")


def _fixed_space_dim(M: np.ndarray, g: np.ndarray, cfg: ToleranceConfig) -> int:
    """dim {v : M v = g v}."""
    if M.size == 0:
        return 0
    return null_space(M - g, rcond=cfg.rank_tol).shape[1]


def closed_index(cyl: CylinderData, length: float, g: np.ndarray,
                 cfg: ToleranceConfig = DEFAULT_TOLERANCES, segments=()) -> ClosedIndex:
    """Mapping torus of sigma (d/dt + A) glued by psi(L) = g psi(0).

    Kernel: fixed space of g^{-1} e^{-LA}; cokernel: that of g^{-1} sigma e^{LA} sigma^T.
    With segments the exponentials are the ordered products over the pieces.
    """
    g = np.asarray(g, dtype=float)
    _check_orthogonal(g)
    pieces = list(segments) or [(cyl.A, length)]
    forward = np.eye(cyl.dim)
    backward = np.eye(cyl.dim)
    for A, L in pieces:
        forward = expm(-L * A) @ forward
        backward = expm(L * A) @ backward
    ker = _fixed_space_dim(forward, g, cfg)
    coker = _fixed_space_dim(cyl.sigma @ backward @ cyl.sigma.T, g, cfg)
    target = cyl.ell + 1
    result = ClosedIndex(ker, coker, field_for_ell(target).real_dim, gamma_order(target))
    logger.debug(f"closed index: ker={ker} coker={coker} value={result.value}")
    return result


def mapping_torus(cyl: CylinderData, length: float, g: np.ndarray) -> CylinderProblem:
    g = np.asarray(g, dtype=float)
    _check_orthogonal(g)
    return CylinderProblem(cyl, length, monodromy=g)


def _beta_isotropy(S: Subspace, sigma: np.ndarray) -> float:
    if S.dim == 0:
        return 0.0
    return float(np.linalg.norm(S.basis.T @ sigma @ S.basis))


def deformation_path(p: CylinderProblem, g: np.ndarray, delta: float,
                     samples: int = DEFORMATION_SAMPLES,
                     cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> List[BoundaryCondition]:
    """Conditions from B_APS(-delta) + Gamma(g on W_delta) to the transmission Gamma(g).

    Modes v of A(0) below -delta rotate from (v, 0) to (v, g v), modes above
    delta from (0, g v) to (v, g v); W_delta stays glued throughout.
    """
    A0, AL = p.near_operator, p.far_operator
    if np.linalg.norm(AL - g @ A0 @ g.T) > 1e-8 * max(1.0, float(np.linalg.norm(A0))):
        raise UsageError("Monodromy does not carry A(0) to A(L)")
    model = eig_selfadjoint(A0, cfg)
    low = spectral_interval(model, -np.inf, -delta, cfg, include_hi=False).basis
    high = spectral_interval(model, delta, np.inf, cfg, include_lo=False).basis
    small = spectral_interval(model, -delta, delta, cfg).basis
    path: List[BoundaryCondition] = []
    for theta in np.linspace(0.0, np.pi / 4, samples):
        c, s = np.cos(theta), np.sin(theta)
        columns = np.hstack([
            np.vstack([c * low, s * (g @ low)]),
            np.vstack([s * high, c * (g @ high)]),
            np.vstack([small, g @ small])
        ])
        path.append(BoundaryCondition(Subspace.span(columns, cfg.rank_tol), label=f"deform({theta:.3f})"))
    return path


@dataclass
class TransmissionReport:
    glued_ker_dim: int
    cut_ker_dim: int
    path_indices: List[int]
    isotropy_residual: float
    endpoints_match: bool

    @property
    def passed(self) -> bool:
        return (self.glued_ker_dim == self.cut_ker_dim and len(set(self.path_indices)) == 1
                and self.isotropy_residual <= 1e-8 and self.endpoints_match)

    def to_dict(self) -> Dict:
        return {"glued_ker_dim": self.glued_ker_dim, "cut_ker_dim": self.cut_ker_dim,
                "path_indices": self.path_indices, "isotropy_residual": self.isotropy_residual,
                "endpoints_match": self.endpoints_match, "passed": self.passed}


def cut_and_transmit(glued: CylinderProblem, delta: float, samples: int = DEFORMATION_SAMPLES,
                     cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> TransmissionReport:
    """Compare the mapping torus with its cut open problem and walk the deformation path."""
    if glued.monodromy is None:
        raise UsageError("cut_and_transmit needs a glued problem with a monodromy")
    g = glued.monodromy
    closed = closed_index(glued.cyl, glued.length, g, cfg, glued.segments)
    cut: SolveResult = solve(glued.with_boundary(graph_condition(g)), cfg)

    path = deformation_path(glued, g, delta, samples, cfg)
    indices = [solve(glued.with_boundary(B), cfg).real_index for B in path]
    transmission = graph_condition(g).subspace
    endpoints_match = path[-1].subspace.equals(transmission)

    W = boundary_space(glued, delta, cfg)
    diagonal = transmission.meet(W)
    residual = _beta_isotropy(diagonal, glued.boundary_sigma)
    report = TransmissionReport(closed.ker_dim, cut.ker_dim, indices, residual, endpoints_match)
    if not report.passed:
        logger.warning(f"Transmission check failed: {report.to_dict()}")
    return report


def require_transmission(report: TransmissionReport) -> None:
    if not report.passed:
        raise VerificationError("Cut and glued problems disagree", report.to_dict())
