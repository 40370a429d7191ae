import asyncio

import pytest

from config import SUITE_CONFIGS
from planning.planner import ExecutionMode, PlanStep, planner
from utils.errors import UsageError
from verifiers.orchestrator import Orchestrator, orchestrator


def _plan(requested, options=None):
    return asyncio.run(planner.create_plan(requested, options))


# planning

def test_all_suites_run_in_dependency_waves():
    plan = _plan(["all"])
    assert [s.suite for s in plan.steps] == list(SUITE_CONFIGS)
    assert plan.execution_mode == ExecutionMode.CONDITIONAL
    main = next(s for s in plan.steps if s.suite == "main")
    assert main.depends_on == ["torsors", "bvp"]
    assert asyncio.run(planner.validate_plan(plan)) == (True, [])


def test_dependencies_outside_the_request_are_dropped():
    plan = _plan(["flow", "signs"])
    assert [s.suite for s in plan.steps] == ["signs", "flow"]
    assert all(not s.depends_on for s in plan.steps)
    assert plan.execution_mode == ExecutionMode.PARALLEL


def test_main_sub_suites_select_main():
    plan = _plan(["homotopy", "gluing"])
    assert [s.suite for s in plan.steps] == ["main"]
    assert plan.steps[0].options["main_suites"] == ["gluing", "homotopy"]
    assert plan.execution_mode == ExecutionMode.SEQUENTIAL


def test_parallel_can_be_switched_off():
    assert _plan(["signs", "bvp"], {"parallel": False}).execution_mode == ExecutionMode.SEQUENTIAL


def test_plan_ids_are_deterministic():
    assert _plan(["signs", "bvp"]).plan_id == _plan(["bvp", "signs"]).plan_id
    assert _plan(["signs"]).plan_id != _plan(["signs"], {"mutate_sign": True}).plan_id


@pytest.mark.parametrize("requested", [[], ["holonomy"], ["signs", "nope"]])
def test_bad_requests_are_usage_errors(requested):
    with pytest.raises(UsageError):
        _plan(requested)


def test_cycle_detection():
    steps = [PlanStep("signs", "", depends_on=["flow"]), PlanStep("flow", "", depends_on=["signs"])]
    assert planner._has_circular_dependencies(steps)
    assert not planner._has_circular_dependencies([PlanStep("signs", ""), PlanStep("flow", "", depends_on=["signs"])])


def test_validation_reports_missing_dependencies_and_cycles():
    plan = _plan(["signs", "flow"])
    plan.steps[1].depends_on = ["torsors"]
    plan.steps[0].depends_on = ["flow"]
    plan.steps[1].depends_on.append("signs")
    valid, issues = asyncio.run(planner.validate_plan(plan))
    assert not valid
    assert "Suite flow depends on torsors which is not in the plan" in issues
    assert "Plan has circular dependencies" in issues


# orchestration

def test_exit_code_is_most_severe():
    assert Orchestrator.exit_code([{"passed": True}, {"passed": True, "exit_code": 3}]) == 0
    assert Orchestrator.exit_code([{"passed": True}, {"passed": False}]) == 2
    assert Orchestrator.exit_code([{"passed": False}, {"passed": False, "exit_code": 3}]) == 3
    assert Orchestrator.exit_code([{"passed": False, "exit_code": 1}]) == 1


def test_signs_suite_passes_and_replays(cfg):
    body, timing = orchestrator.run(["signs"], 1, 1, cfg)
    assert body["exit_code"] == 0
    assert body["summary"]["passed"]
    assert list(body["suites"]) == ["signs"]
    assert "elapsed" not in body["suites"]["signs"]
    assert set(timing) == {"signs"}
    again, _ = orchestrator.run(["signs"], 1, 1, cfg)
    assert again == body


def test_sections_follow_plan_order(cfg):
    body, _ = orchestrator.run(["flow", "signs"], 2, 1, cfg)
    assert list(body["suites"]) == ["signs", "flow"]
    assert body["summary"]["suites_run"] == 2


def test_mutation_fails_gluing_with_counterexample(cfg):
    body, _ = orchestrator.run(["gluing"], 1, 2, cfg, {"mutate_sign": True, "ells": [0]})
    assert body["exit_code"] == 2
    section = body["suites"]["main"]
    assert not section["passed"]
    assert section["mutate_sign"] is True
    counterexample = section["counterexample"]
    assert counterexample["name"] == "gluing.gluing_diagram"
    assert counterexample["ell"] == 0 and counterexample["seed"] == 1
    assert body["summary"]["suites_failed"] == ["main"]
