"""Flow suite: spectral flow read off SP transport against the crossing count."""

import logging
from typing import Any, Dict, List, Tuple

import numpy as np

from data.scenarios import random_flow_path, trial_rng
from numeric.spectral import admissible_cutoffs
from numeric.tolerances import ToleranceConfig
from spectral.transport import OperatorPath, crossing_count_flow, spectral_flow
from utils.formatters import format_check
from verifiers.base_verifier import BaseVerifier

logger = logging.getLogger(__name__)


def end_cutoffs(path: OperatorPath, cfg: ToleranceConfig) -> List[float]:
    """Cutoffs off the spectrum at both ends, one per gap of the merged end spectra."""
    ends = np.concatenate([np.linalg.eigvalsh(path.start), np.linalg.eigvalsh(path.end)])
    return admissible_cutoffs(ends, cfg, lower=float(ends.min()) - 1.0)


def flow_checks(path: OperatorPath, rng: np.random.Generator, cfg: ToleranceConfig) -> List[Dict[str, Any]]:
    cutoffs = end_cutoffs(path, cfg)
    cutoff = float(cutoffs[int(rng.integers(0, len(cutoffs)))])
    transported = spectral_flow(path, cutoff, cfg)
    counted = crossing_count_flow(path, cutoff, cfg)
    reversed_flow = spectral_flow(path.reversed(), cutoff, cfg)
    return [
        format_check("flow.crossing_count", transported == counted, cutoff=cutoff, transported=transported,
                     counted=counted),
        format_check("flow.reversal", reversed_flow == -transported, forward=transported,
                     backward=reversed_flow)
    ]


class FlowVerifier(BaseVerifier):
    """Random symmetric paths with a bump that forces eigenvalue crossings."""

    def __init__(self):
        super().__init__("flow")

    def run_checks(self, seed: int, trials: int, cfg: ToleranceConfig,
                   options: Dict[str, Any]) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
        checks: List[Dict[str, Any]] = []
        flows: List[int] = []
        for ell in self.ells(options.get("ells")):
            for k in range(trials):
                rng = trial_rng(seed, self.suite_index * 8 + ell, k)
                path = random_flow_path(rng)
                found = flow_checks(path, rng, cfg)
                flows.append(found[0]["details"]["transported"])
                for c in found:
                    c["details"].update({"ell": ell, "trial": k, "dim": int(path.start.shape[0])})
                checks.extend(found)
        logger.info(f"flow: {len(flows)} path(s), flows {flows}")
        return checks, {"flows": flows}


# Global flow verifier instance
flow_verifier = FlowVerifier()
