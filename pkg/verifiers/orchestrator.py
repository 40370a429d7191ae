"""Orchestrator that plans and runs the verification suites and assembles the report body."""

import asyncio
import logging
from typing import Any, Dict, List, Optional, Tuple

from numeric.tolerances import DEFAULT_TOLERANCES, ToleranceConfig
from planning.planner import ExecutionMode, ExecutionPlan, PlanStep, planner
from utils.formatters import format_error_response, format_suite_result, summarize
from verifiers.base_verifier import BaseVerifier
from verifiers.bvp_verifier import BvpVerifier
from verifiers.clifford_verifier import CliffordVerifier
from verifiers.flow_verifier import FlowVerifier
from verifiers.main_verifier import MainVerifier
from verifiers.signs_verifier import SignsVerifier
from verifiers.torsors_verifier import TorsorsVerifier

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_VERIFICATION = 2


class Orchestrator:
    """Coordinates the suite verifiers; the report is ordered by plan order, never completion order."""

    def __init__(self):
        self.verifiers: Dict[str, BaseVerifier] = {
            "clifford": CliffordVerifier(),
            "signs": SignsVerifier(),
            "torsors": TorsorsVerifier(),
            "bvp": BvpVerifier(),
            "flow": FlowVerifier(),
            "main": MainVerifier()
        }
        logger.info(f"Orchestrator initialized with {len(self.verifiers)} suite verifiers")

    async def process_request(self, requested: List[str], seed: int, trials: int,
                              cfg: ToleranceConfig = DEFAULT_TOLERANCES,
                              options: Optional[Dict[str, Any]] = None) -> Tuple[Dict[str, Any], Dict[str, float]]:
        """Plan, validate and execute; returns the report body and the timing block."""
        options = options or {}
        plan = await planner.create_plan(requested, options)

        is_valid, validation_issues = await planner.validate_plan(plan)
        if not is_valid:
            logger.warning(f"Plan validation failed: {validation_issues}")
            plan = self._sequential_plan(plan)

        logger.info(f"Executing plan {plan.plan_id} with {len(plan.steps)} steps in {plan.execution_mode.value} mode")
        await self._execute_plan(plan, seed, trials, cfg)

        sections = [step.result for step in plan.steps]
        timing = {}
        for section in sections:
            timing[section["suite"]] = section.pop("elapsed", 0.0)
        body = {
            "seed": seed,
            "trials": trials,
            "plan": plan.to_dict(),
            "suites": {section["suite"]: section for section in sections},
            "summary": summarize(sections),
            "exit_code": self.exit_code(sections)
        }
        if validation_issues:
            body["plan"]["issues"] = validation_issues
        return body, timing

    def run(self, requested: List[str], seed: int, trials: int, cfg: ToleranceConfig = DEFAULT_TOLERANCES,
            options: Optional[Dict[str, Any]] = None) -> Tuple[Dict[str, Any], Dict[str, float]]:
        return asyncio.run(self.process_request(requested, seed, trials, cfg, options))

    @staticmethod
    def exit_code(sections: List[Dict[str, Any]]) -> int:
        """Most severe outcome: aborted suites keep their own code, failed checks give 2."""
        code = EXIT_PASS
        for section in sections:
            if not section.get("passed", False):
                code = max(code, section.get("exit_code", EXIT_VERIFICATION))
        return code

    async def _run_step(self, step: PlanStep, seed: int, trials: int, cfg: ToleranceConfig) -> None:
        verifier = self.verifiers.get(step.suite)
        step.status = "running"
        try:
            if verifier is None:
                raise KeyError(step.suite)
            step.result = await verifier.process_request(seed, trials, cfg, step.options)
            step.status = "completed" if step.result["passed"] else "failed"
        except Exception as e:
            step.status = "failed"
            logger.error(f"Step {step.suite} failed: {e}")
            failure = format_error_response(str(e), "internal_error")
            step.result = format_suite_result(step.suite, False, [failure])
            step.result["elapsed"] = 0.0

    async def _execute_plan(self, plan: ExecutionPlan, seed: int, trials: int, cfg: ToleranceConfig) -> None:
        plan.status = "executing"

        if plan.execution_mode == ExecutionMode.PARALLEL:
            await asyncio.gather(*(self._run_step(step, seed, trials, cfg) for step in plan.steps))

        elif plan.execution_mode == ExecutionMode.SEQUENTIAL:
            for step in plan.steps:
                logger.info(f"Executing step: {step.suite}")
                await self._run_step(step, seed, trials, cfg)

        elif plan.execution_mode == ExecutionMode.CONDITIONAL:
            # each wave runs every step whose dependencies have finished
            finished = set()
            while len(finished) < len(plan.steps):
                wave = [s for s in plan.steps
                        if s.suite not in finished and all(d in finished for d in s.depends_on)]
                if not wave:
                    logger.error("No progress made in conditional execution - breaking loop")
                    break
                for step in wave:
                    blocked = [d for d in step.depends_on if self._failed(plan, d)]
                    if blocked:
                        logger.warning(f"Running {step.suite} although {blocked} failed")
                await asyncio.gather(*(self._run_step(step, seed, trials, cfg) for step in wave))
                finished.update(step.suite for step in wave)

        for step in plan.steps:
            if step.result is None:
                step.status = "failed"
                step.result = format_suite_result(step.suite, False, [
                    format_error_response("Step never ran", "not_executed")])
        plan.status = "completed"

    @staticmethod
    def _failed(plan: ExecutionPlan, suite: str) -> bool:
        return any(s.suite == suite and s.status == "failed" for s in plan.steps)

    @staticmethod
    def _sequential_plan(plan: ExecutionPlan) -> ExecutionPlan:
        """Fallback for invalid plans: same steps, no dependencies, one at a time."""
        for step in plan.steps:
            step.depends_on = []
        plan.execution_mode = ExecutionMode.SEQUENTIAL
        plan.status = "fallback"
        return plan


# Global orchestrator instance
orchestrator = Orchestrator()
