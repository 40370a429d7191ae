"""Base class for all suite verifiers."""

import asyncio
import logging
import time
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional, Tuple

from config import SUITE_CONFIGS
from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from utils.errors import UsageError, WorkbenchError
from utils.formatters import format_error_response, format_suite_result

logger = logging.getLogger(__name__)


class BaseVerifier(ABC):
    """One verification suite: seeded trials in, uniform result section out."""

    def __init__(self, suite_name: str):
        if suite_name not in SUITE_CONFIGS:
            raise UsageError(f"Unknown suite '{suite_name}'")
        self.suite_name = suite_name
        self.config = SUITE_CONFIGS[suite_name]
        self.suite_index = list(SUITE_CONFIGS).index(suite_name)
        logger.debug(f"Initialized {suite_name} verifier (suite index {self.suite_index})")

    def trial_count(self, trials: int) -> int:
        """Trials actually run: the requested count scaled by the suite factor (0 = fixed workload)."""
        return trials * self.config["trial_factor"]

    def ells(self, requested: Optional[List[int]] = None) -> List[int]:
        ells = self.config["ells"]
        if requested is None:
            return list(ells)
        return [e for e in ells if e in requested]

    @abstractmethod
    def run_checks(self, seed: int, trials: int, cfg: ToleranceConfig,
                   options: Dict[str, Any]) -> Tuple[List[Dict[str, Any]], Dict[str, Any]]:
        """Run the suite; returns check dicts (name, passed, details) and extra report tables."""

    def verify(self, seed: int, trials: int, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
               options: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Synchronous run; any escaping error becomes a failure entry."""
        options = options or {}
        start = time.perf_counter()
        try:
            checks, tables = self.run_checks(seed, self.trial_count(trials), cfg, options)
            result = format_suite_result(self.suite_name, True, checks, tables)
        except WorkbenchError as e:
            logger.error(f"Suite {self.suite_name} aborted: {e.message}")
            failure = format_error_response(e.message, e.error_type, e.details)
            result = format_suite_result(self.suite_name, False, [failure])
            result["exit_code"] = e.exit_code
        result["seed"] = seed
        result["trials"] = self.trial_count(trials)
        result["elapsed"] = time.perf_counter() - start
        status = "PASSED" if result["passed"] else "FAILED"
        logger.info(f"Suite {self.suite_name} {status}: {result['checks_run']} checks, "
                    f"{result['checks_failed']} failed")
        return result

    async def process_request(self, seed: int, trials: int, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                              options: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Run the suite in a worker thread."""
        return await asyncio.to_thread(self.verify, seed, trials, cfg, options)
