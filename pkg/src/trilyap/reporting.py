"""Deterministic report emission.

Fixed field order, 12 significant digits, byte-stable output for a fixed
input.  The machine record for an inequality report is one line of
`kind,a,b,c,xi,lhs,threshold,margin,holds`; jsonl additionally carries
the quadrature error and the conclusiveness flag.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence, Union

from .lyapunov import InequalityReport
from .oscillation import ZeroGapReport

REPORT_FIELDS = ("kind", "a", "b", "c", "xi", "lhs", "threshold", "margin", "holds")
ZEROGAP_FIELDS = ("k", "t_k", "gap_k", "window_norm_k")


def fmt12(value: Optional[float]) -> str:
    if value is None:
        return ""
    return f"{value:.12g}"


def _json_scalar(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)):
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return '"' + str(value).replace("\\", "\\\\").replace('"', '\\"') + '"'


def report_record(report: InequalityReport) -> dict:
    return {
        "kind": report.kind,
        "a": report.a,
        "b": report.b,
        "c": report.c,
        "xi": report.xi,
        "lhs": report.lhs,
        "threshold": report.threshold,
        "margin": report.margin,
        "holds": report.holds,
        "quadrature_error": report.quadrature_error,
        "conclusive": report.conclusive,
    }


def records_csv(records: Sequence[dict]) -> str:
    lines = [",".join(REPORT_FIELDS)]
    for rec in records:
        row = []
        for name in REPORT_FIELDS:
            v = rec[name]
            if name == "kind":
                row.append(str(v))
            elif name == "holds":
                row.append("true" if v else "false")
            else:
                row.append(fmt12(v))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def records_jsonl(records: Sequence[dict]) -> str:
    lines = []
    for rec in records:
        body = ", ".join(f'"{k}": {_json_scalar(v)}' for k, v in rec.items())
        lines.append("{" + body + "}")
    return "\n".join(lines) + ("\n" if lines else "")


def records_text(records: Sequence[dict]) -> str:
    if not records:
        return "no reports\n"
    lines = []
    for rec in records:
        verdict = "holds" if rec["holds"] else "FAILS"
        if not rec.get("conclusive", True):
            verdict += " (inconclusive)"
        lines.append(f"{rec['kind']}: lhs={rec['lhs']:.6g} "
                     f"threshold={rec['threshold']:.6g} "
                     f"margin={rec['margin']:.6g} [{verdict}]")
    return "\n".join(lines) + "\n"


def emit_reports(reports: Sequence[Union[InequalityReport, dict]], fmt: str) -> str:
    records = [r if isinstance(r, dict) else report_record(r) for r in reports]
    if fmt == "csv":
        return records_csv(records)
    if fmt in ("jsonl", "json-lines"):
        return records_jsonl(records)
    if fmt == "text":
        return records_text(records)
    raise ValueError(f"unknown format {fmt!r}")


def zero_gap_csv(report: ZeroGapReport) -> str:
    lines = [",".join(ZEROGAP_FIELDS)]
    for k, t, gap, norm in report.csv_rows():
        lines.append(f"{k},{fmt12(t)},{fmt12(gap)},{fmt12(norm)}")
    return "\n".join(lines) + "\n"


def trajectory_csv(traj) -> str:
    lines = ["x,u,v2,v3"]
    for x, u, v2, v3 in traj.csv_rows():
        lines.append(f"{fmt12(x)},{fmt12(u)},{fmt12(v2)},{fmt12(v3)}")
    return "\n".join(lines) + "\n"


def solution_summary_csv(solutions: Iterable) -> str:
    lines = ["a,b,c,xi,sign,max_u"]
    for sol in solutions:
        row = sol.summary_row()
        lines.append(",".join([
            fmt12(row["a"]), fmt12(row["b"]), fmt12(row["c"]), fmt12(row["xi"]),
            str(row["sign"]), fmt12(row["max_u"]),
        ]))
    return "\n".join(lines) + "\n"
