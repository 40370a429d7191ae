import json
import os

import pytest

from main import main
from utils.formatters import report_digest


def _run(argv, tmp_path, name="report.json"):
    out = tmp_path / name
    code = main(list(argv) + ["--out", str(out)])
    return code, (json.loads(out.read_text(encoding="utf-8")) if out.exists() else None)


def test_clifford_report(tmp_path):
    code, report = _run(["clifford", "--max-n", "3"], tmp_path)
    assert code == 0
    assert report["command"] == "clifford"
    section = report["clifford"]
    assert section["passed"] and section["checks_failed"] == 0
    assert section["dimensions"]["2"] == 4
    assert section["representations"]
    assert "timing" not in report
    assert report["report_digest"] == report_digest(report)


def test_clifford_timing_leaves_digest_alone(tmp_path):
    _, plain = _run(["clifford", "--max-n", "2"], tmp_path, "plain.json")
    _, timed = _run(["clifford", "--max-n", "2", "--timing"], tmp_path, "timed.json")
    assert "clifford" in timed["timing"]
    assert plain["report_digest"] == timed["report_digest"]


def test_clifford_writes_stdout_without_out(capsys):
    assert main(["clifford", "--max-n", "1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["clifford"]["max_n"] == 1


@pytest.mark.parametrize("argv", [
    ["clifford", "--max-n", "12"],
    ["clifford", "--max-n", "many"],
    ["transmogrify"],
    [],
    ["suite", "all", "--trials", "0"],
])
def test_usage_errors_exit_one(argv, tmp_path):
    assert main(argv) == 1


def test_solve_aps_example(tmp_path, scenarios_dir):
    code, report = _run(["solve", os.path.join(scenarios_dir, "aps_example.json"), "--oracle"], tmp_path)
    assert code == 0
    assert report["result"]["index"] == 0
    assert report["oracle"]["dims_agree"]


def test_solve_empty_operator(tmp_path, scenarios_dir):
    code, report = _run(["solve", os.path.join(scenarios_dir, "empty_operator.json")], tmp_path)
    assert code == 0
    assert report["result"]["index"] == 0
    assert report["result"]["ker_basis"] == []


def test_solve_rejects_other_kinds(tmp_path, scenarios_dir):
    code, report = _run(["solve", os.path.join(scenarios_dir, "suite_smoke.json")], tmp_path)
    assert code == 1 and report is None


def test_solve_inadmissible_cutoff_exits_three(tmp_path):
    problem = {"schema_version": 1, "kind": "cylinder_problem",
               "payload": {"operator": {"ell": 7, "entries": [[1.0, 0.0], [0.0, -1.0]]}, "length": 1.0,
                           "end0": {"type": "aps", "delta": 1.0}, "endL": {"type": "aps", "delta": 0.0}}}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(problem), encoding="utf-8")
    code, _ = _run(["solve", str(path)], tmp_path)
    assert code == 3


def test_suite_reports_are_byte_identical(tmp_path, scenarios_dir):
    config = os.path.join(scenarios_dir, "suite_smoke.json")
    assert main(["suite", config, "--out", str(tmp_path / "a.json")]) == 0
    assert main(["suite", config, "--out", str(tmp_path / "b.json")]) == 0
    first = (tmp_path / "a.json").read_bytes()
    assert first == (tmp_path / "b.json").read_bytes()
    report = json.loads(first)
    assert report["seed"] == 7 and report["trials"] == 2
    assert [s["suite"] for s in report["plan"]["steps"]] == ["signs", "torsors", "flow"]
    assert set(report["suites"]) == {"signs", "torsors", "flow"}


def test_suite_seed_flag_overrides_file(tmp_path, scenarios_dir):
    config = os.path.join(scenarios_dir, "suite_smoke.json")
    code, report = _run(["suite", config, "--seed", "3", "--trials", "1"], tmp_path)
    assert code == 0
    assert (report["seed"], report["trials"]) == (3, 1)


def test_mutated_suite_exits_two(tmp_path, scenarios_dir):
    code, report = _run(["suite", os.path.join(scenarios_dir, "suite_mutation.json")], tmp_path)
    assert code == 2
    assert report["exit_code"] == 2
    assert report["suites"]["main"]["counterexample"]["name"] == "gluing.gluing_diagram"
