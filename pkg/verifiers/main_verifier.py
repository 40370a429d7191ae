"""Main suite: the orientation theorems over random bordisms, one sub-suite at a time."""

import logging
from typing import Any, Dict, List, Optional, Tuple

from config import MAIN_SUITES, MUTATE_SIGN
from numeric.tolerances import ToleranceConfig
from orientation.theorems import verify_main
from utils.errors import UsageError
from verifiers.base_verifier import BaseVerifier

logger = logging.getLogger(__name__)


class MainVerifier(BaseVerifier):
    """Gluing, unions, sums, empty boundary, functoriality, bordism invariance and homotopy."""

    def __init__(self):
        super().__init__("main")

    def sub_suites(self, requested: Optional[List[str]] = None) -> List[str]:
        if requested is None:
            return list(MAIN_SUITES)
        unknown = [s for s in requested if s not in MAIN_SUITES]
        if unknown:
            raise UsageError(f"Unknown main suite(s): {', '.join(unknown)}")
        return [s for s in MAIN_SUITES if s in requested]

    def run_checks(self, seed: int, trials: int, cfg: ToleranceConfig,
                   options: Dict[str, Any]) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
        mutate = bool(options.get("mutate_sign", MUTATE_SIGN))
        if mutate:
            logger.warning("Sign mutation is active: the l=0 tau sign is flipped")
        checks: List[Dict[str, Any]] = []
        sections: Dict[str, Any] = {}
        for suite in self.sub_suites(options.get("main_suites")):
            report = verify_main(suite, seed, trials, cfg, self.ells(options.get("ells")), mutate)
            for c in report.checks:
                c["name"] = f"{suite}.{c['name']}"
            checks.extend(report.checks)
            sections[suite] = {"passed": report.passed, "per_ell": report.per_ell(),
                               "checks_run": len(report.checks)}
            if not report.passed:
                logger.warning(f"Main suite {suite} failed first at {report.first_failure()['name']}")
        return checks, {"theorems": sections, "mutate_sign": mutate}


# Global main verifier instance
main_verifier = MainVerifier()
