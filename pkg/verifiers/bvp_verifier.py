"""BVP suite: boundary propositions on random cylinders and the solver against the grid oracle."""

import logging
from typing import Any, Dict, List, Tuple

from aps.boundary import nearly_aps
from aps.oracle import compare_with_oracle
from aps.properties import BvpScenario, verify_bvp_props
from aps.solver import CylinderProblem, solve
from config import ORACLE_GRID_POINTS
from data.scenarios import random_bvp_scenario, trial_rng
from numeric.spectral import operator_norm
from numeric.tolerances import ToleranceConfig
from utils.formatters import format_check
from verifiers.base_verifier import BaseVerifier

logger = logging.getLogger(__name__)

# Oracle comparisons only for |lambda| L up to this bound
ORACLE_STIFFNESS = 20.0
ORACLE_ANGLE_TOL = 1e-6


def oracle_problem(scenario: BvpScenario, cfg: ToleranceConfig) -> CylinderProblem:
    """The scenario cylinder with the nearly-APS condition built on its small subspace."""
    p = scenario.problem()
    return p.with_boundary(nearly_aps(p.boundary_operator, scenario.delta, scenario.L_small, cfg))


def oracle_checks(scenario: BvpScenario, cfg: ToleranceConfig,
                  points: int = ORACLE_GRID_POINTS) -> Tuple[List[Dict[str, Any]], int]:
    """Solver vs grid oracle; empty when the cylinder is too stiff for the grid."""
    stiffness = operator_norm(scenario.cyl.A) * scenario.length
    if stiffness > ORACLE_STIFFNESS:
        logger.debug(f"Skipping oracle comparison: |lambda| L = {stiffness:.3g}")
        return [], 0
    p = oracle_problem(scenario, cfg)
    result = solve(p, cfg)
    comparison = compare_with_oracle(p, result, points)
    angle = comparison["max_angle"]
    checks = [
        format_check("oracle.dims", comparison["dims_agree"], **comparison),
        format_check("oracle.kernel_angle", angle is not None and angle <= ORACLE_ANGLE_TOL, max_angle=angle)
    ]
    return checks, result.index


class BvpVerifier(BaseVerifier):
    """Random cylinders per l: kernel identities, nested pairs, Cauchy data, oracle agreement."""

    def __init__(self):
        super().__init__("bvp")

    def run_checks(self, seed: int, trials: int, cfg: ToleranceConfig,
                   options: Dict[str, Any]) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
        points = int(options.get("oracle_points", ORACLE_GRID_POINTS))
        checks: List[Dict[str, Any]] = []
        indices: Dict[str, List[int]] = {}
        compared = 0
        for ell in self.ells(options.get("ells")):
            indices[str(ell)] = []
            for k in range(trials):
                rng = trial_rng(seed, self.suite_index * 8 + ell, k)
                scenario = random_bvp_scenario(ell, rng, cfg, seed)
                found = [c.to_dict() for c in verify_bvp_props(scenario, cfg).checks]
                extra, index = oracle_checks(scenario, cfg, points)
                if extra:
                    compared += 1
                    indices[str(ell)].append(index)
                for c in found + extra:
                    c["details"].update({"ell": ell, "trial": k, "delta": scenario.delta})
                checks.extend(found + extra)
            logger.info(f"bvp l={ell}: {trials} scenario(s), indices {indices[str(ell)]}")
        return checks, {"index_table": indices, "oracle_comparisons": compared,
                        "oracle_grid_points": points,
                        "max_stiffness": float(ORACLE_STIFFNESS)}


# Global bvp verifier instance
bvp_verifier = BvpVerifier()
