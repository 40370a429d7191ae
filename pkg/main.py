"""Command line front end of the index theory workbench.

    python main.py clifford --max-n 9 --out clifford.json
    python main.py solve scenarios/aps_example.json --out solve.json
    python main.py suite all --seed 1 --trials 10 --out report.json
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from aps.oracle import compare_with_oracle
from aps.solver import solve
from config import DEFAULT_SEED, DEFAULT_TRIALS, LOG_LEVEL, LOG_TO_FILE, MUTATE_SIGN, N_MAX, TOOL_VERSION
from numeric.tolerances import get_tolerances
from utils.errors import UsageError, WorkbenchError
from utils.formatters import dump_report, format_report
from utils.logging_config import setup_logging
from utils.schemas import load_scenario_file
from verifiers.orchestrator import orchestrator

logger = logging.getLogger("main")


class WorkbenchArgumentParser(argparse.ArgumentParser):
    """Argument errors exit through UsageError (code 1) instead of argparse's code 2."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def write_report(report: Dict[str, Any], out_path: Optional[str]) -> None:
    text = dump_report(report)
    if out_path is None:
        sys.stdout.write(text)
        return
    try:
        path = Path(out_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise UsageError(f"Cannot write report to {out_path}: {e}")
    logger.info(f"Report written to {out_path}")


def cmd_clifford(max_n: int, out_path: Optional[str], timing: bool = False) -> int:
    """Representation matrices and the exact Clifford checks up to max_n."""
    if not 1 <= max_n <= N_MAX:
        raise UsageError(f"--max-n must lie in 1..{N_MAX}, got {max_n}")
    section = orchestrator.verifiers["clifford"].verify(0, 1, get_tolerances(),
                                                         {"max_n": max_n, "emit_matrices": True})
    elapsed = section.pop("elapsed")
    report = format_report("clifford", {"clifford": section}, {"max_n": max_n},
                           {"clifford": elapsed} if timing else None)
    write_report(report, out_path)
    if not section["passed"]:
        logger.error(f"Clifford checks failed: {section['checks_failed']} of {section['checks_run']}")
        return section.get("exit_code", 2)
    return 0


def cmd_solve(problem_file: str, out_path: Optional[str], oracle: bool = False) -> int:
    """Kernel, cokernel and index of one cylinder problem."""
    scenario = load_scenario_file(problem_file, "cylinder_problem")
    cfg = scenario.resolve_tolerances()
    problem = scenario.payload.to_problem(cfg)
    result = solve(problem, cfg)
    body: Dict[str, Any] = {"problem": problem.to_dict(), "result": result.to_dict(),
                            "tolerances": cfg.model_dump()}
    if oracle:
        body["oracle"] = compare_with_oracle(problem, result)
    logger.info(f"Solved {problem_file}: index {result.index} (ker {result.ker_dim}, coker {result.coker_dim})")
    write_report(format_report("solve", body, scenario.model_dump(mode="json")), out_path)
    return 0


def cmd_suite(target: str, seed: Optional[int], trials: Optional[int], out_path: Optional[str],
              timing: bool = False) -> int:
    """Run "all" suites or the suites named in a suite_config file."""
    options: Dict[str, Any] = {"mutate_sign": MUTATE_SIGN}
    if target == "all":
        requested = ["all"]
        cfg = get_tolerances()
        config_data: Any = "all"
    else:
        scenario = load_scenario_file(target, "suite_config")
        payload = scenario.payload
        requested = payload.suites
        cfg = scenario.resolve_tolerances()
        seed = scenario.seed if seed is None and scenario.seed is not None else seed
        trials = payload.trials if trials is None and payload.trials is not None else trials
        options["mutate_sign"] = payload.mutate_sign or MUTATE_SIGN
        if payload.ells is not None:
            options["ells"] = sorted(set(payload.ells))
        config_data = scenario.model_dump(mode="json")

    seed = DEFAULT_SEED if seed is None else seed
    trials = DEFAULT_TRIALS if trials is None else trials
    if trials < 1:
        raise UsageError(f"--trials must be at least 1, got {trials}")

    body, elapsed = orchestrator.run(requested, seed, trials, cfg, options)
    input_data = {"target": config_data, "seed": seed, "trials": trials, "tolerances": cfg.model_dump(),
                  "options": options}
    write_report(format_report("suite", body, input_data, elapsed if timing else None), out_path)

    summary = body["summary"]
    if body["exit_code"]:
        logger.error(f"Suites failed: {summary['suites_failed']} ({summary['checks_failed']} failing checks)")
    else:
        logger.info(f"All {summary['suites_run']} suites passed ({summary['checks_run']} checks)")
    return body["exit_code"]


def build_parser() -> argparse.ArgumentParser:
    parser = WorkbenchArgumentParser(prog="index-workbench",
                                     description="Index theory workbench: orientation torsors, APS problems, "
                                                 "verification suites.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    parser.add_argument("--log-level", default=LOG_LEVEL, help="Logging level (default from WORKBENCH_LOG_LEVEL)")
    commands = parser.add_subparsers(dest="command", required=True)

    clifford = commands.add_parser("clifford", help="Clifford modules and adjacent isomorphisms")
    clifford.add_argument("--max-n", type=int, default=N_MAX)
    clifford.add_argument("--out", default=None, help="Report path (stdout if omitted)")
    clifford.add_argument("--timing", action="store_true", help="Include a timing block")

    solve_cmd = commands.add_parser("solve", help="Solve a cylinder boundary value problem")
    solve_cmd.add_argument("problem", help="cylinder_problem scenario file")
    solve_cmd.add_argument("--out", default=None)
    solve_cmd.add_argument("--oracle", action="store_true", help="Also compare with the grid ODE oracle")

    suite = commands.add_parser("suite", help="Run verification suites")
    suite.add_argument("target", help='"all" or a suite_config scenario file')
    suite.add_argument("--seed", type=int, default=None)
    suite.add_argument("--trials", type=int, default=None)
    suite.add_argument("--out", default=None)
    suite.add_argument("--timing", action="store_true", help="Include a timing block (outside the digest)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"index-workbench: error: {e.message}", file=sys.stderr)
        return e.exit_code

    setup_logging(args.log_level, LOG_TO_FILE)
    try:
        if args.command == "clifford":
            return cmd_clifford(args.max_n, args.out, args.timing)
        if args.command == "solve":
            return cmd_solve(args.problem, args.out, args.oracle)
        return cmd_suite(args.target, args.seed, args.trials, args.out, args.timing)
    except WorkbenchError as e:
        logger.error(f"{e.error_type}: {e.message}")
        if e.details:
            logger.debug(f"details: {e.details}")
        return e.exit_code


if __name__ == "__main__":
    raise SystemExit(main(sys.argv[1:]))
