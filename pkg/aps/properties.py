"""Checks of the kernel/Cauchy data identities on single cylinder scenarios."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from aps.boundary import BoundaryCondition, adjoint_bc, nearly_aps, restate
from aps.solver import CylinderProblem, boundary_space, cauchy_data, projected_cauchy_data, solve
from config import ORTHOGONALITY_RESIDUAL
from numeric.spectral import operator_norm
from numeric.subspaces import Subspace
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from operators.cylinders import CylinderData, anticommuting

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BvpScenario:
    """A cylinder with a cutoff and nested subspaces L_small in L_big of W_delta(diag(A, -A))."""
    cyl: CylinderData
    length: float
    delta: float
    L_small: Subspace
    L_big: Subspace
    seed: Optional[int] = None

    def problem(self) -> CylinderProblem:
        # placeholder condition; every check swaps in its own
        n = self.cyl.dim
        full = BoundaryCondition(Subspace.full(2 * n))
        return CylinderProblem(self.cyl, self.length, boundary=full)


@dataclass
class PropertyCheck:
    name: str
    passed: bool
    details: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {"name": self.name, "passed": self.passed, "details": self.details}


@dataclass
class BvpReport:
    checks: List[PropertyCheck]
    seed: Optional[int] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> Dict:
        return {"seed": self.seed, "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def _orthogonality(S1: Subspace, S2: Subspace) -> float:
    if S1.dim == 0 or S2.dim == 0:
        return 0.0
    return float(np.linalg.norm(S1.basis.T @ S2.basis))


def _project(S: Subspace, P: np.ndarray, rank_tol: float) -> Subspace:
    if S.dim == 0:
        return Subspace.zero(P.shape[0], rank_tol)
    return Subspace.span(P @ S.basis, rank_tol)


def check_large_cutoff_kernel(p: CylinderProblem, cfg: ToleranceConfig) -> PropertyCheck:
    """Beyond the spectral radius B_APS(-delta) admits no kernel on a cylinder."""
    A_b = p.boundary_operator
    delta = operator_norm(A_b) + 1.0
    B = nearly_aps(A_b, delta, Subspace.zero(A_b.shape[0], cfg.rank_tol), cfg)
    result = solve(p.with_boundary(B), cfg)
    return PropertyCheck("large_cutoff_kernel", result.ker_dim == 0, {"delta": delta, "ker_dim": result.ker_dim})


def check_nested_pair(p: CylinderProblem, B1: BoundaryCondition, B2: BoundaryCondition,
                      cfg: ToleranceConfig) -> List[PropertyCheck]:
    """Embeddings of Ker_{B2}/Ker_{B1} and Ker*_{B1adj}/Ker*_{B2adj} into B1^perp cap B2."""
    sigma = p.boundary_sigma
    r1, r2 = solve(p.with_boundary(B1), cfg), solve(p.with_boundary(B2), cfg)
    quotient = B1.subspace.perp().meet(B2.subspace)
    P = quotient.projector
    image_ker = _project(r2.ker, P, cfg.rank_tol)
    image_coker = _project(r1.coker.apply(sigma.T) if r1.coker.dim else r1.coker, P, cfg.rank_tol)
    dims_ok = (image_ker.dim == r2.ker_dim - r1.ker_dim and image_coker.dim == r1.coker_dim - r2.coker_dim
               and image_ker.dim + image_coker.dim == quotient.dim)
    residual = _orthogonality(image_ker, image_coker)
    k = p.k
    index_gap = r2.real_index - r1.real_index
    return [
        PropertyCheck("nested_embeddings", dims_ok and residual <= ORTHOGONALITY_RESIDUAL,
                      {"image_ker": image_ker.dim, "image_coker": image_coker.dim,
                       "quotient": quotient.dim, "orthogonality": residual}),
        PropertyCheck("index_difference", index_gap == B2.dim - B1.dim and index_gap % k == 0,
                      {"index_gap": index_gap // k if index_gap % k == 0 else index_gap,
                       "dim_quotient": (B2.dim - B1.dim) // k})
    ]


def check_projected_image(p: CylinderProblem, B: BoundaryCondition, cfg: ToleranceConfig) -> List[PropertyCheck]:
    """pi_delta(C cap B) = C_delta cap L_delta, injective once delta passes the spectrum."""
    C = cauchy_data(p, cfg)
    W = boundary_space(p, B.delta, cfg)
    image = _project(C.meet(B.subspace), W.projector, cfg.rank_tol)
    expected = projected_cauchy_data(p, B.delta, cfg).meet(B.lagrangian)
    checks = [PropertyCheck("projected_image", image.equals(expected) and expected.equals(image),
                            {"image": image.dim, "expected": expected.dim})]

    A_b = p.boundary_operator
    big = max(operator_norm(A_b) + 1.0, B.delta)
    B_big = restate(B, big, A_b, cfg)
    kernel = C.meet(B_big.subspace)
    W_big = boundary_space(p, big, cfg)
    projected = _project(kernel, W_big.projector, cfg.rank_tol)
    checks.append(PropertyCheck("projection_injective", projected.dim == kernel.dim,
                                {"kernel": kernel.dim, "projected": projected.dim}))
    return checks


def check_cauchy_split(p: CylinderProblem, delta: float, cfg: ToleranceConfig) -> PropertyCheck:
    """W_delta = C_delta + sigma(C_delta), orthogonally."""
    W = boundary_space(p, delta, cfg)
    C_delta = projected_cauchy_data(p, delta, cfg)
    sigma_C = C_delta.apply(p.boundary_sigma) if C_delta.dim else C_delta
    residual = _orthogonality(C_delta, sigma_C)
    spans = C_delta.join(sigma_C).equals(W) if W.dim else C_delta.dim == 0
    passed = spans and C_delta.dim + sigma_C.dim == W.dim and residual <= ORTHOGONALITY_RESIDUAL
    return PropertyCheck("cauchy_split", passed, {"W": W.dim, "C_delta": C_delta.dim, "orthogonality": residual})


def check_self_adjoint_condition(p: CylinderProblem, delta: float, cfg: ToleranceConfig) -> PropertyCheck:
    """B = B_APS(-delta) + C_delta is self-adjoint, so kernel and cokernel match."""
    A_b = p.boundary_operator
    B = nearly_aps(A_b, delta, projected_cauchy_data(p, delta, cfg), cfg)
    adjoint = adjoint_bc(B, p.boundary_sigma)
    result = solve(p.with_boundary(B), cfg)
    passed = adjoint.subspace.equals(B.subspace) and result.ker_dim == result.coker_dim
    return PropertyCheck("self_adjoint_condition", passed,
                         {"ker_dim": result.ker_dim, "coker_dim": result.coker_dim})


def verify_bvp_props(scenario: BvpScenario, cfg: ToleranceConfig = DEFAULT_TOLERANCES) -> BvpReport:
    p = scenario.problem()
    A_b = p.boundary_operator
    B1 = nearly_aps(A_b, scenario.delta, scenario.L_small, cfg)
    B2 = nearly_aps(A_b, scenario.delta, scenario.L_big, cfg)

    checks = [check_large_cutoff_kernel(p, cfg)]
    checks.extend(check_nested_pair(p, B1, B2, cfg))
    checks.extend(check_projected_image(p, B2, cfg))
    if anticommuting(scenario.cyl.ell):
        checks.append(check_cauchy_split(p, scenario.delta, cfg))
        checks.append(check_self_adjoint_condition(p, scenario.delta, cfg))
    report = BvpReport(checks, scenario.seed)
    if not report.passed:
        logger.warning(f"BVP scenario {scenario.seed} failed: {report.failures()}")
    return report
