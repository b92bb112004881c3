"""Rendering helpers for reports, exports and the operator registry."""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from typing import Any, Literal

from qjw.models import VerificationReport

STATUS_MARKERS = {
    "pass": "[PASS]",
    "fail": "[FAIL]",
    "error": "[ERROR]",
    "usage": "[USAGE]",
    "degenerate": "[DEGENERATE]",
}

OutputFormat = Literal["json", "pretty"]


def marker(kind: str) -> str:
    """Return a stable machine-readable status marker."""
    return STATUS_MARKERS.get(kind, kind if kind.startswith("[") else f"[{kind.upper()}]")


def to_public_data(value: Any) -> Any:
    """Convert pydantic models and nested values into JSON-serializable data."""
    if hasattr(value, "model_dump"):
        return value.model_dump(mode="json")
    if isinstance(value, dict):
        return {k: to_public_data(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [to_public_data(v) for v in value]
    return value


def dump_json(value: Any) -> str:
    """Deterministic JSON text: fixed key order from the models, two-space indent, trailing newline."""
    return json.dumps(to_public_data(value), indent=2, ensure_ascii=False) + "\n"


def summarize(reports: Sequence[VerificationReport]) -> dict[str, int]:
    failed = sum(not r.passed for r in reports)
    return {"total": len(reports), "passed": len(reports) - failed, "failed": failed}


def render_report(report: VerificationReport) -> str:
    tag = " (derived)" if report.derived else ""
    line = f"{marker(report.status)} {report.claim}{tag}  depth={report.depth}  {report.ms} ms"
    cx = report.counterexample
    if cx is None:
        return line
    where = f"level {cx.level}, basis {tuple(cx.basis)}"
    if cx.generator:
        where += f", generator {cx.generator}"
    return f"{line}\n    first failure at {where}\n    residual: {json.dumps(cx.residual, ensure_ascii=False)}"


def render_reports(reports: Sequence[VerificationReport], fmt: OutputFormat = "pretty") -> str:
    if fmt == "json":
        return dump_json({"reports": list(reports), "summary": summarize(reports)})
    counts = summarize(reports)
    lines = [render_report(r) for r in reports]
    lines.append(f"{counts['passed']}/{counts['total']} claims passed")
    return "\n".join(lines) + "\n"


def render_registry(entries: Iterable[Any], fmt: OutputFormat = "pretty") -> str:
    rows = [{"id": e.ident, "symbol": e.symbol, "map": e.summary} for e in entries]
    if fmt == "json":
        return dump_json(rows)
    width = max(len(r["id"]) for r in rows)
    return "\n".join(f"{r['id']:<{width}}  {r['map']}  (source symbol: {r['symbol']})" for r in rows) + "\n"
