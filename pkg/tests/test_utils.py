import json
import logging
import os

import numpy as np
import pytest

from utils.errors import (AdaptednessError, DegeneratePairingError, DimensionMismatchError, InadmissibleCutoffError,
                          TransportError, UsageError, VerificationError)
from utils.formatters import (digest, dump_report, format_check, format_error_response, format_report,
                              format_suite_result, report_digest, summarize, to_jsonable)
from utils.logging_config import ColoredFormatter
from utils.schemas import OperatorPayload, ScenarioFile, load_scenario_file

SCENARIO_FILES = ["aps_example.json", "bordism_path.json", "constant_kernel.json", "empty_operator.json",
                  "mapping_torus.json", "nearly_aps_big.json", "nearly_aps_small.json", "rotation_pair.json",
                  "suite_mutation.json", "suite_smoke.json"]


def _write(tmp_path, data, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data) if not isinstance(data, str) else data, encoding="utf-8")
    return str(path)


# scenario files

@pytest.mark.parametrize("name", SCENARIO_FILES)
def test_scenario_files_round_trip(scenarios_dir, name):
    scenario = load_scenario_file(os.path.join(scenarios_dir, name))
    again = ScenarioFile.model_validate_json(scenario.model_dump_json())
    assert again.model_dump() == scenario.model_dump()
    assert again.kind == scenario.kind


def test_missing_file_is_a_usage_error(tmp_path):
    with pytest.raises(UsageError):
        load_scenario_file(str(tmp_path / "absent.json"))


def test_malformed_json_is_a_usage_error(tmp_path):
    with pytest.raises(UsageError):
        load_scenario_file(_write(tmp_path, "{not json"))


def test_expected_kind_is_enforced(scenarios_dir):
    with pytest.raises(UsageError):
        load_scenario_file(os.path.join(scenarios_dir, "suite_smoke.json"), "cylinder_problem")


@pytest.mark.parametrize("data", [
    {"schema_version": 2, "kind": "operator", "payload": {"ell": 7, "entries": [[1.0]]}},
    {"schema_version": 1, "kind": "operator", "payload": {"ell": 1, "field": "C", "entries": [[0.0]]}},
    {"schema_version": 1, "kind": "operator", "payload": {"ell": 7, "entries": [[1.0, 2.0], [3.0]]}},
    {"schema_version": 1, "kind": "operator", "payload": {"ell": 8, "entries": [[1.0]]}},
    {"schema_version": 1, "kind": "operator", "payload": {"ell": 7, "entries": [[1.0]], "color": "red"}},
    {"schema_version": 1, "kind": "suite_config", "payload": {"suites": ["holonomy"]}},
    {"schema_version": 1, "kind": "suite_config", "payload": {"suites": ["main"], "ells": [9]}},
    {"schema_version": 1, "kind": "suite_config", "payload": {"trials": 0}},
    {"schema_version": 1, "kind": "cylinder_problem",
     "payload": {"operator": {"ell": 7, "entries": [[1.0]]}, "length": 1.0,
                 "end0": {"type": "aps", "delta": 0.0}, "endL": {"type": "aps", "delta": 0.0},
                 "monodromy": [[1.0]]}},
    {"schema_version": 1, "kind": "cylinder_problem",
     "payload": {"operator": {"ell": 7, "entries": [[1.0]]}, "length": 0.0, "monodromy": [[1.0]]}},
    {"schema_version": 1, "kind": "cylinder_problem",
     "payload": {"operator": {"ell": 7, "entries": [[1.0]]}, "length": 1.0,
                 "boundary": {"type": "nearly_aps"}}},
])
def test_invalid_scenarios_are_usage_errors(tmp_path, data):
    with pytest.raises(UsageError) as info:
        load_scenario_file(_write(tmp_path, data))
    assert info.value.exit_code == 1


def test_monodromy_shape_is_checked(tmp_path, cfg):
    data = {"schema_version": 1, "kind": "cylinder_problem",
            "payload": {"operator": {"ell": 7, "entries": [[1.0, 0.0], [0.0, 2.0]]}, "length": 1.0,
                        "monodromy": [[1.0]]}}
    scenario = load_scenario_file(_write(tmp_path, data))
    with pytest.raises(DimensionMismatchError):
        scenario.payload.to_problem(cfg)


def test_tolerance_profiles_resolve(tmp_path):
    named = {"schema_version": 1, "kind": "suite_config", "payload": {}, "tolerances": "strict"}
    assert load_scenario_file(_write(tmp_path, named)).resolve_tolerances().gap_tol == 1e-5
    inline = dict(named, tolerances={"eig_tol": 1e-9, "rank_tol": 1e-7, "gap_tol": 1e-4, "path_step": 0.05})
    assert load_scenario_file(_write(tmp_path, inline, "inline.json")).resolve_tolerances().gap_tol == 1e-4
    unknown = dict(named, tolerances="loose")
    with pytest.raises(UsageError):
        load_scenario_file(_write(tmp_path, unknown, "unknown.json")).resolve_tolerances()


def test_operator_payload_defaults_its_field(scenarios_dir):
    scenario = load_scenario_file(os.path.join(scenarios_dir, "rotation_pair.json"), "operator")
    D = scenario.payload.to_operator()
    assert D.ell == 1 and D.field.value == "R"
    again = OperatorPayload.from_operator(D).to_operator()
    assert np.array_equal(again.entries, D.entries)


def test_suite_config_defaults():
    scenario = ScenarioFile.model_validate({"kind": "suite_config", "payload": {}})
    assert scenario.payload.suites == ["all"]
    assert scenario.payload.trials is None and not scenario.payload.mutate_sign


# reports

def test_digest_ignores_key_order():
    assert digest({"a": 1, "b": [1, 2]}) == digest({"b": [1, 2], "a": 1})
    assert digest({"a": 1}) != digest({"a": 2})


def test_to_jsonable_converts_numpy():
    data = to_jsonable({"m": np.eye(2), "k": np.int64(3), "ok": np.bool_(True), 1: (np.float64(0.5),)})
    assert data == {"m": [[1.0, 0.0], [0.0, 1.0]], "k": 3, "ok": True, "1": [0.5]}
    assert isinstance(data["k"], int) and isinstance(data["ok"], bool)


def test_report_digest_excludes_timing():
    body = {"result": {"index": 0}}
    plain = format_report("solve", body, {"x": 1})
    timed = format_report("solve", body, {"x": 1}, {"solve": 0.123456})
    assert "timing" not in plain
    assert timed["timing"] == {"solve": 0.123}
    assert plain["report_digest"] == timed["report_digest"] == report_digest(timed)
    assert plain["input_digest"] == digest({"x": 1})


def test_dump_report_is_canonical():
    report = format_report("suite", {"b": 1, "a": np.array([1, 2])}, "all")
    text = dump_report(report)
    assert text.endswith("\n")
    assert text == dump_report(json.loads(text))
    keys = list(json.loads(text))
    assert keys == sorted(keys)


def test_suite_result_reports_first_counterexample():
    checks = [format_check("a", True), format_check("b", False, value=np.float64(2.0)), format_check("c", False)]
    result = format_suite_result("signs", True, checks, {"table": [1]})
    assert not result["passed"]
    assert (result["checks_run"], result["checks_failed"]) == (3, 2)
    assert result["counterexample"]["name"] == "b"
    assert result["counterexample"]["details"] == {"value": 2.0}
    assert result["table"] == [1]


def test_error_response_and_summary():
    failure = format_error_response("boom", "internal_error", {"k": np.int64(1)})
    assert failure["passed"] is False and failure["details"] == {"k": 1}
    sections = [format_suite_result("signs", True, [format_check("a", True)]),
                format_suite_result("flow", False, [failure])]
    summary = summarize(sections)
    assert summary == {"suites_run": 2, "suites_failed": ["flow"], "passed": False,
                       "checks_run": 2, "checks_failed": 1}


# errors and logging

def test_exit_codes():
    assert UsageError("x").exit_code == 1
    assert DimensionMismatchError("x").exit_code == 1
    assert VerificationError("x").exit_code == 2
    assert DegeneratePairingError("x").exit_code == 2
    assert AdaptednessError("x").exit_code == 2
    assert InadmissibleCutoffError("x").exit_code == 3
    assert TransportError("x").exit_code == 3
    error = VerificationError("bad", {"ell": 0}, {"trial": 2})
    assert error.details == {"ell": 0} and error.counterexample == {"trial": 2}


def test_colored_formatter_leaves_record_plain():
    record = logging.LogRecord("verifiers.flow", logging.INFO, __file__, 1, "done", None, None)
    text = ColoredFormatter(fmt="%(name)s %(levelname)s %(message)s").format(record)
    assert "done" in text and "verifiers.flow" in text
    assert record.levelname == "INFO" and record.name == "verifiers.flow"
