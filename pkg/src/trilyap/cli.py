"""Batch command-line interface.

    trilyap <verb> --config scenario.toml [--out DIR] [--format FMT]
                   [--workers N] [--seed S]

Verbs: check-hypotheses, solve-bc1, solve-bc2, verify, zero-count,
oscillation, sweep.  Exit codes: 0 success, 1 a theorem inequality failed
beyond numerical error (solver bug), 2 no-solution outcome, 3 invalid
config (including hypothesis-gate failures).  TRILYAP_OUT sets the
default output directory.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import List, Optional

from .config import Scenario, gate_scenario, hypothesis_report, load_scenario
from .errors import ConfigError, InvariantViolation, NoSolution, TrilyapError
from .lyapunov import verify_abs, verify_bc1, verify_bc2, zero_count_bound
from .oscillation import build_zero_gap_report, zero_sequence
from .reporting import (
    emit_reports,
    fmt12,
    solution_summary_csv,
    trajectory_csv,
    zero_gap_csv,
)
from .shooting import solve_bc1, solve_bc2
from .sweeps import run_sweep

_EXT = {"text": "txt", "csv": "csv", "jsonl": "jsonl"}


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors, which collides with the
    # no-solution exit code; route usage problems to the config code.
    def error(self, message: str):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="trilyap", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in ("check-hypotheses", "solve-bc1", "solve-bc2", "verify",
                 "zero-count", "oscillation", "sweep"):
        p = sub.add_parser(verb)
        p.add_argument("--config", required=True, help="scenario TOML file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", default="text", choices=("text", "csv", "jsonl"))
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
    return parser


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("TRILYAP_OUT") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write(path: Path, content: str) -> None:
    path.write_bytes(content.encode("utf-8"))


def _emit(args, reports, stem: str = "reports") -> Path:
    out = _out_dir(args)
    path = out / f"{stem}.{_EXT[args.format]}"
    _write(path, emit_reports(reports, args.format))
    return path


def _build_problem(sc: Scenario):
    return sc.psi1.build(), sc.psi2.build(), sc.f.build(), sc.q.build()


def _cmd_check_hypotheses(args, sc: Scenario) -> int:
    rows = hypothesis_report(sc)
    lines = [f"{'PASS' if ok else 'FAIL'}  {name}: {detail}" for name, ok, detail in rows]
    text = "\n".join(lines) + "\n"
    _write(_out_dir(args) / "hypotheses.txt", text)
    sys.stdout.write(text)
    if any(not ok for _, ok, _ in rows):
        raise ConfigError("hypothesis gate failed")
    return 0


def _cmd_solve_bc1(args, sc: Scenario) -> int:
    psi1, psi2, f, q = _build_problem(sc)
    a, b = sc.interval
    sol = solve_bc1(a, b, psi1, psi2, q, f, sc.tolerances.solver_config(),
                    slope=sc.params.slope)
    out = _out_dir(args)
    _write(out / "trajectory.csv", trajectory_csv(sol.trajectory))
    _write(out / "summary.csv", solution_summary_csv([sol]))
    sys.stdout.write(f"solve-bc1: xi={fmt12(sol.xi)} curvature={fmt12(sol.curvature)} "
                     f"max|u|={fmt12(sol.max_u)}\n")
    return 0


def _cmd_solve_bc2(args, sc: Scenario) -> int:
    psi1, psi2, f, q = _build_problem(sc)
    a, _ = sc.interval
    horizon = sc.params.horizon if sc.params.horizon is not None else q.domain[1]
    sol = solve_bc2(a, sc.params.slope, psi1, psi2, q, f, horizon,
                    curvature=sc.params.curvature,
                    cfg=sc.tolerances.solver_config())
    out = _out_dir(args)
    _write(out / "trajectory.csv", trajectory_csv(sol.trajectory))
    _write(out / "summary.csv", solution_summary_csv([sol]))
    sys.stdout.write(f"solve-bc2: b={fmt12(sol.b)} c={fmt12(sol.c)} "
                     f"max|u|={fmt12(sol.max_u)}\n")
    return 0


def _cmd_verify(args, sc: Scenario) -> int:
    psi1, psi2, f, q = _build_problem(sc)
    a, b = sc.interval
    cfg = sc.tolerances.solver_config()
    if sc.params.bc == "bc1":
        sol = solve_bc1(a, b, psi1, psi2, q, f, cfg, slope=sc.params.slope)
        reports = [verify_bc1(sol, q, psi1, psi2, f, quad_n=sc.params.quad_n),
                   verify_abs(sol, q, psi1, psi2, f, quad_n=sc.params.quad_n)]
    else:
        horizon = sc.params.horizon if sc.params.horizon is not None else q.domain[1]
        sol = solve_bc2(a, sc.params.slope, psi1, psi2, q, f, horizon,
                        curvature=sc.params.curvature, cfg=cfg)
        reports = verify_bc2(sol, q, psi1, psi2, f, scan_n=sc.params.scan_n,
                             quad_n=sc.params.quad_n)
        reports.append(verify_abs(sol, q, psi1, psi2, f, quad_n=sc.params.quad_n))
    path = _emit(args, reports)
    sys.stdout.write(emit_reports(reports, "text"))
    sys.stdout.write(f"wrote {path}\n")
    return 0


def _cmd_zero_count(args, sc: Scenario) -> int:
    psi1, psi2, f, q = _build_problem(sc)
    a, b = sc.interval
    horizon = sc.params.horizon if sc.params.horizon is not None else b
    traj, _ = zero_sequence(q, a, sc.params.slope, horizon, psi1, psi2, f,
                            curvature=sc.params.curvature,
                            cfg=sc.tolerances.solver_config())
    result = zero_count_bound(traj, (a, b), psi1, psi2, f, q,
                              scan_n=sc.params.scan_n, quad_n=sc.params.quad_n)
    reports = [result.report()]
    path = _emit(args, reports)
    lines = [
        f"zero-count: N={result.n_pairs} n_bound={fmt12(result.n_bound)} "
        f"holds={result.holds}",
        f"sum of maxima={fmt12(result.sum_max)} threshold={fmt12(result.threshold)}",
    ]
    if result.remark_rhs is not None:
        lines.append(
            "diagnostic (stronger power-data form, not asserted): "
            f"rhs={fmt12(result.remark_rhs)} satisfied={result.remark_holds}")
    sys.stdout.write("\n".join(lines) + f"\nwrote {path}\n")
    return 0


def _cmd_oscillation(args, sc: Scenario) -> int:
    psi1, psi2, f, q = _build_problem(sc)
    a, _ = sc.interval
    horizon = sc.params.horizon if sc.params.horizon is not None else q.domain[1]
    traj, zeros = zero_sequence(q, a, sc.params.slope, horizon, psi1, psi2, f,
                                curvature=sc.params.curvature,
                                cfg=sc.tolerances.solver_config())
    window = sc.params.window if sc.params.window > 0 else None
    report = build_zero_gap_report(q, traj, zeros, psi1, psi2, f,
                                   sigma=sc.params.sigma, window=window)
    out = _out_dir(args)
    _write(out / "zerogap.csv", zero_gap_csv(report))
    trend = report.trend
    lines = [f"oscillation: {len(report.zeros)} zeros on [{fmt12(a)}, {fmt12(horizon)}]",
             f"sigma={fmt12(report.sigma)} window={fmt12(report.window)}"]
    if trend.theil_sen_slope is not None:
        tag = ("consistent with divergence" if trend.consistent_with_divergence
               else "no divergence trend at this horizon")
        lines.append(f"gap trend slope={fmt12(trend.theil_sen_slope)} ({tag})")
    if report.contrapositive_applicable:
        bad = [e for e in report.contrapositive if not e.consistent]
        lines.append(f"contrapositive entries={len(report.contrapositive)} "
                     f"violations={len(bad)}")
    sys.stdout.write("\n".join(lines) + f"\nwrote {out / 'zerogap.csv'}\n")
    return 0


def _cmd_sweep(args, sc: Scenario) -> int:
    outcome_lines, records = run_sweep(sc, seed=args.seed, workers=args.workers)
    path = _emit(args, records)
    text = "\n".join(outcome_lines) + "\n"
    _write(_out_dir(args) / "instances.txt", text)
    sys.stdout.write(text)
    sys.stdout.write(f"{len(records)} report(s) -> {path}\n")
    return 0


_COMMANDS = {
    "check-hypotheses": _cmd_check_hypotheses,
    "solve-bc1": _cmd_solve_bc1,
    "solve-bc2": _cmd_solve_bc2,
    "verify": _cmd_verify,
    "zero-count": _cmd_zero_count,
    "oscillation": _cmd_oscillation,
    "sweep": _cmd_sweep,
}


def run_command(verb: str, args, sc: Scenario) -> int:
    if verb != "check-hypotheses":
        gate_scenario(sc)
    return _COMMANDS[verb](args, sc)


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        scenario = load_scenario(args.config)
        return run_command(args.verb, args, scenario)
    except InvariantViolation as exc:
        sys.stderr.write(f"INVARIANT VIOLATION: {exc}\n")
        return 1
    except NoSolution as exc:
        sys.stderr.write(f"no solution: {type(exc).__name__}: {exc}\n")
        return 2
    except ConfigError as exc:
        sys.stderr.write(f"invalid config: {exc}\n")
        return 3
    except FileNotFoundError as exc:
        sys.stderr.write(f"invalid config: {exc}\n")
        return 3
    except TrilyapError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
