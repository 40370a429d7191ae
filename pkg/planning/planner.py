"""Planning module for ordering verification suites."""

import logging
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from config import MAIN_SUITES, SUITE_CONFIGS
from utils.errors import UsageError
from utils.formatters import digest

logger = logging.getLogger(__name__)


class ExecutionMode(Enum):
    """Execution modes for suite coordination."""
    SEQUENTIAL = "sequential"
    PARALLEL = "parallel"
    CONDITIONAL = "conditional"


class PlanStep:
    """A single suite run in an execution plan."""

    def __init__(self, suite: str, task_description: str, priority: int = 1,
                 depends_on: Optional[List[str]] = None, options: Optional[Dict[str, Any]] = None):
        self.suite = suite
        self.task_description = task_description
        self.priority = priority
        self.depends_on = depends_on or []
        self.options = options or {}
        self.status = "pending"  # pending, running, completed, failed
        self.result = None
        self.execution_time = None

    def to_dict(self) -> Dict[str, Any]:
        return {"suite": self.suite, "status": self.status, "depends_on": list(self.depends_on),
                "priority": self.priority}


class ExecutionPlan:
    """A complete plan for one suite request."""

    def __init__(self, request: List[str], plan_id: str):
        self.request = request
        self.plan_id = plan_id
        self.steps: List[PlanStep] = []
        self.execution_mode = ExecutionMode.SEQUENTIAL
        self.status = "created"  # created, ready, executing, completed, fallback

    def to_dict(self) -> Dict[str, Any]:
        return {"plan_id": self.plan_id, "execution_mode": self.execution_mode.value,
                "steps": [s.to_dict() for s in self.steps]}


class Planner:
    """Creates and validates execution plans for suite requests."""

    def __init__(self):
        self.suite_capabilities = {
            name: {"depends_on": list(SUITE_CONFIGS[name]["depends_on"]), "priority": i + 1}
            for i, name in enumerate(SUITE_CONFIGS)
        }

    async def create_plan(self, requested: List[str], options: Optional[Dict[str, Any]] = None) -> ExecutionPlan:
        """Create an execution plan for the requested suites ("all" and main sub-suite names allowed)."""
        options = options or {}
        try:
            plan = ExecutionPlan(list(requested), self._generate_plan_id(requested, options))
            suites, main_suites = self.resolve_suites(requested)

            steps = []
            for suite in suites:
                step_options = dict(options)
                if suite == "main" and main_suites is not None:
                    step_options["main_suites"] = main_suites
                steps.append(self._create_step(suite, step_options, suites))
            plan.steps = steps

            if len(steps) == 1:
                plan.execution_mode = ExecutionMode.SEQUENTIAL
            elif any(s.depends_on for s in steps):
                plan.execution_mode = ExecutionMode.CONDITIONAL
            else:
                plan.execution_mode = ExecutionMode.PARALLEL
            if not options.get("parallel", True) and len(steps) > 1:
                plan.execution_mode = ExecutionMode.SEQUENTIAL

            plan.status = "ready"
            logger.info(f"Created plan {plan.plan_id} with {len(plan.steps)} steps, mode: {plan.execution_mode.value}")
            return plan

        except UsageError:
            raise
        except Exception as e:
            logger.error(f"Error creating plan: {e}")
            return self._create_fallback_plan(requested, options)

    async def validate_plan(self, plan: ExecutionPlan) -> Tuple[bool, List[str]]:
        """Validate an execution plan and return any issues."""
        issues = []

        if not plan.steps:
            issues.append("Plan has no execution steps")

        for step in plan.steps:
            if step.suite not in self.suite_capabilities:
                issues.append(f"Unknown suite {step.suite}")
            for dependency in step.depends_on:
                if not any(s.suite == dependency for s in plan.steps):
                    issues.append(f"Suite {step.suite} depends on {dependency} which is not in the plan")

        if self._has_circular_dependencies(plan.steps):
            issues.append("Plan has circular dependencies")

        is_valid = len(issues) == 0
        logger.info(f"Plan validation: {'PASSED' if is_valid else 'FAILED'} with {len(issues)} issues")
        return is_valid, issues

    def resolve_suites(self, requested: List[str]) -> Tuple[List[str], Optional[List[str]]]:
        """Suites in table order, plus the main sub-suites when only some were named."""
        if not requested:
            raise UsageError("No suites requested")
        unknown = [s for s in requested if s not in SUITE_CONFIGS and s not in MAIN_SUITES and s != "all"]
        if unknown:
            raise UsageError(f"Unknown suite(s): {', '.join(unknown)}",
                             {"available": list(SUITE_CONFIGS) + MAIN_SUITES + ["all"]})
        if "all" in requested:
            return list(SUITE_CONFIGS), None
        chosen = set(s for s in requested if s in SUITE_CONFIGS)
        named_main = [s for s in MAIN_SUITES if s in requested]
        main_suites = None
        if named_main and "main" not in chosen:
            chosen.add("main")
            main_suites = named_main
        suites = [s for s in SUITE_CONFIGS if s in chosen]
        logger.info(f"Request resolved to suites: {suites}")
        return suites, main_suites

    def _create_step(self, suite: str, options: Dict[str, Any], selected: List[str]) -> PlanStep:
        """Dependencies outside the selection are dropped; they order, they do not gate."""
        capabilities = self.suite_capabilities.get(suite, {})
        return PlanStep(
            suite=suite,
            task_description=SUITE_CONFIGS[suite]["description"],
            priority=capabilities.get("priority", 1),
            depends_on=[d for d in capabilities.get("depends_on", []) if d in selected],
            options=options
        )

    def _has_circular_dependencies(self, steps: List[PlanStep]) -> bool:
        """Check for circular dependencies in the plan."""
        # Simple cycle detection using DFS
        visited = set()
        rec_stack = set()

        def has_cycle(suite: str) -> bool:
            if suite in rec_stack:
                return True
            if suite in visited:
                return False

            visited.add(suite)
            rec_stack.add(suite)

            for step in steps:
                if step.suite == suite:
                    for dep in step.depends_on:
                        if has_cycle(dep):
                            return True

            rec_stack.remove(suite)
            return False

        for step in steps:
            if step.suite not in visited:
                if has_cycle(step.suite):
                    return True

        return False

    def _generate_plan_id(self, requested: List[str], options: Dict[str, Any]) -> str:
        """Deterministic plan ID so reports stay byte-identical."""
        return f"plan-{digest({'request': sorted(requested), 'options': options})[:8]}"

    def _create_fallback_plan(self, requested: List[str], options: Dict[str, Any]) -> ExecutionPlan:
        """Known suites one after another, no dependencies."""
        plan = ExecutionPlan(list(requested), "fallback-plan")
        plan.execution_mode = ExecutionMode.SEQUENTIAL
        plan.steps = [PlanStep(s, SUITE_CONFIGS[s]["description"], options=dict(options))
                      for s in SUITE_CONFIGS if s in requested or "all" in requested]
        plan.status = "fallback"

        logger.warning("Created fallback plan due to planning error")
        return plan


# Global planner instance
planner = Planner()
