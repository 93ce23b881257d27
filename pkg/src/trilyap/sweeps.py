"""Seeded instance generation and the sweep pipeline.

Sweeps fan out over a worker pool; each instance derives its own RNG
from (seed, index), so results are reproducible for a fixed seed and
config regardless of worker count, and outputs merge in instance order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from .config import Scenario, gate_scenario, parse_scenario, scenario_to_toml
from .equation import Coefficient, constant_coefficient, trig_poly_coefficient
from .errors import NoSolution, StepUnderflow
from .lyapunov import InequalityReport, verify_abs, verify_bc1
from .reporting import report_record
from .shooting import solve_bc1

_SIGN_CHANGE_GRID = 512


def random_trig_coefficient(rng: np.random.Generator, domain: Tuple[float, float],
                            a0_range: Tuple[float, float] = (10.0, 70.0),
                            amp_range: Tuple[float, float] = (40.0, 120.0),
                            harmonics: int = 3, max_tries: int = 200) -> Coefficient:
    """A random trig polynomial that changes sign on its domain.

    The base frequency is one period per domain; harmonic weights are
    drawn uniformly and rescaled so the swing reaches the drawn amplitude,
    then the draw is retried until the sample grid shows a sign change.
    """
    lo, hi = domain
    omega = 2.0 * np.pi / (hi - lo)
    probe = np.linspace(lo, hi, _SIGN_CHANGE_GRID)
    for _ in range(max_tries):
        a0 = rng.uniform(*a0_range)
        ac = rng.uniform(-1.0, 1.0, harmonics)
        bs = rng.uniform(-1.0, 1.0, harmonics)
        amp = rng.uniform(*amp_range)
        scale = amp / max(np.sum(np.abs(ac)), np.sum(np.abs(bs)), 1e-9)
        q = trig_poly_coefficient(a0, (ac * scale).tolist(), (bs * scale).tolist(),
                                  omega, domain)
        g = q.eval(probe)
        if g.min() < -1e-6 and g.max() > 1e-6:
            return q
    raise RuntimeError("could not draw a sign-changing coefficient")


def bc1_pipeline(q: Coefficient, sc: Scenario) -> Tuple[str, List[InequalityReport]]:
    """solve_bc1 then the theorem and |q| reports; no-solution outcomes
    are data, not errors."""
    psi1, psi2, f = sc.psi1.build(), sc.psi2.build(), sc.f.build()
    a, b = sc.interval
    cfg = sc.tolerances.solver_config()
    try:
        sol = solve_bc1(a, b, psi1, psi2, q, f, cfg, slope=sc.params.slope)
    except (NoSolution, StepUnderflow) as exc:
        return f"{type(exc).__name__}: {exc}", []
    thm = verify_bc1(sol, q, psi1, psi2, f, quad_n=sc.params.quad_n)
    cor = verify_abs(sol, q, psi1, psi2, f, quad_n=sc.params.quad_n)
    return "certified", [thm, cor]


def _instance_coefficient(sc: Scenario, seed: int, index: int) -> Coefficient:
    sweep = sc.sweep
    if sweep.kind == "random-trig":
        rng = np.random.default_rng([seed, index])
        return random_trig_coefficient(rng, sc.interval, sweep.a0, sweep.amp,
                                       sweep.harmonics)
    if sweep.kind == "constant-q":
        return constant_coefficient(sweep.values[index], sc.interval)
    raise ValueError(f"unknown sweep kind {sweep.kind!r}")


def _sweep_worker(payload: Tuple[str, int, int]) -> Tuple[int, str, List[dict]]:
    toml_text, seed, index = payload
    sc = parse_scenario(toml_text)
    q = _instance_coefficient(sc, seed, index)
    outcome, reports = bc1_pipeline(q, sc)
    return index, outcome, [report_record(r) for r in reports]


def run_sweep(sc: Scenario, seed: int, workers: int = 1,
              count: Optional[int] = None) -> Tuple[List[str], List[dict]]:
    """Run the configured sweep; outputs merge in instance order."""
    if sc.sweep is None:
        raise ValueError("scenario has no [sweep] table")
    gate_scenario(sc)
    n = count if count is not None else (
        len(sc.sweep.values) if sc.sweep.kind == "constant-q" else sc.sweep.count)
    payloads = [(scenario_to_toml(sc), seed, i) for i in range(n)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_worker, payloads))
    else:
        results = [_sweep_worker(p) for p in payloads]
    results.sort(key=lambda r: r[0])
    outcome_lines = [f"instance {i}: {outcome}" for i, outcome, _ in results]
    records: List[dict] = []
    for _, _, recs in results:
        records.extend(recs)
    return outcome_lines, records
