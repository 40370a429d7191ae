"""Report formatters and digests."""

import hashlib
import json
from typing import Any, Dict, List, Optional

import numpy as np

from config import REPORT_INDENT, SCHEMA_VERSION, TOOL_NAME, TOOL_VERSION


def to_jsonable(value: Any) -> Any:
    """Recursively convert numpy scalars and arrays into plain JSON values."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def canonical_json(data: Any) -> str:
    return json.dumps(to_jsonable(data), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(data: Any) -> str:
    """SHA-256 of the canonical JSON form."""
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def report_digest(report: Dict[str, Any]) -> str:
    """Digest of a report with its timing block and own digest removed."""
    stripped = {k: v for k, v in report.items() if k not in ("timing", "report_digest")}
    return digest(stripped)


def format_report(command: str, body: Dict[str, Any], input_data: Any,
                  timing: Optional[Dict[str, float]] = None) -> Dict[str, Any]:
    """Wrap a command result with tool identity, input digest and report digest."""
    report = {
        "tool": TOOL_NAME,
        "tool_version": TOOL_VERSION,
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "input_digest": digest(input_data),
        **to_jsonable(body)
    }
    report["report_digest"] = report_digest(report)
    if timing is not None:
        report["timing"] = {k: round(float(v), 3) for k, v in sorted(timing.items())}
    return report


def dump_report(report: Dict[str, Any]) -> str:
    """Serialized report bytes: sorted keys, fixed indent, trailing newline."""
    return json.dumps(to_jsonable(report), sort_keys=True, indent=REPORT_INDENT, ensure_ascii=False) + "\n"


def format_suite_result(suite: str, passed: bool, checks: List[Dict[str, Any]],
                        extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Uniform per-suite section: counts, failures and the first counterexample."""
    failures = [c for c in checks if not c.get("passed", False)]
    result = {
        "suite": suite,
        "passed": passed and not failures,
        "checks_run": len(checks),
        "checks_failed": len(failures),
        "failures": failures,
        "counterexample": failures[0] if failures else None
    }
    if extra:
        result.update(extra)
    return result


def format_error_response(error_message: str, error_type: str = "workbench_error",
                          details: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Failure entry for a check or a whole suite that raised."""
    return {
        "name": error_type,
        "passed": False,
        "error": True,
        "error_type": error_type,
        "message": error_message,
        "details": to_jsonable(details or {})
    }


def format_check(name: str, passed: bool, **details) -> Dict[str, Any]:
    return {"name": name, "passed": bool(passed), "details": to_jsonable(details)}


def summarize(sections: List[Dict[str, Any]]) -> Dict[str, Any]:
    """Totals across suite sections, in section order."""
    failed = [s["suite"] for s in sections if not s.get("passed", False)]
    return {
        "suites_run": len(sections),
        "suites_failed": failed,
        "passed": not failed,
        "checks_run": sum(s.get("checks_run", 0) for s in sections),
        "checks_failed": sum(s.get("checks_failed", 0) for s in sections)
    }
