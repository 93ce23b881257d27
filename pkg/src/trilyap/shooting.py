"""Shooting for the two boundary structures the inequality engine certifies.

(BC1): u(a) = u(b) = 0, u of one sign inside, and an interior inflection
certificate v3(xi) = 0 for some xi in [a, b].  The slope at ``a`` is
normalized (scale equivalence in the balanced quasilinear case) and the
curvature parameter is swept geometrically: every sign change of u(b)
over the sweep is bisected to a candidate, each candidate is certified
post hoc on a fresh fine grid, and the first fully certified one wins.
The target u(b) = 0 can have several roots (for strong or sign-changing
forcing the solution folds), which is why all brackets are enumerated.

(BC2): u(a) = u(b) = u(c) = 0 with u nonzero between consecutive zeros.
It is constructed, not imposed: the first two zero events after ``a``
become b and c, so the consecutive-zeros structure holds automatically.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from .equation import Coefficient, Nonlinearity, SystemState
from .errors import (
    InsufficientZeros,
    InteriorZero,
    NoBracket,
    NoSignChange,
    NoXi,
    StepUnderflow,
    TrilyapError,
)
from .integrate import SolverConfig, Trajectory, integrate_ivp
from .psi import PsiFunction

# Relative certification tolerances (see the package defaults table).
TAU_BC = 1e-8
DELTA_INT = 1e-6
DELTA_TRIVIAL = 1e-6  # times interval length: smaller sup-norms are noise

# Geometric curvature sweep +-2**k.
SWEEP_K_MIN = -10
SWEEP_K_MAX = 20

_CERT_GRID_MIN = 1001


@dataclass(frozen=True)
class SolutionBC1:
    """A trajectory certified against (BC1), with its inflection point.

    ``xi_candidates`` lists every v3 zero found in [a, b] (the theorem
    holds for each); ``xi_uncertainties`` carries the gap between the
    interpolant zero and the integrator's sharper event location, which
    verification folds into its error estimate.
    """

    trajectory: Trajectory
    a: float
    b: float
    xi: float
    xi_candidates: Tuple[float, ...]
    xi_uncertainties: Tuple[float, ...]
    sign: int
    slope: float
    curvature: float
    max_u: float

    def summary_row(self) -> dict:
        return {"a": self.a, "b": self.b, "c": None, "xi": self.xi,
                "sign": self.sign, "max_u": self.max_u}


@dataclass(frozen=True)
class SolutionBC2:
    """A trajectory certified against (BC2) on consecutive zeros a < b < c."""

    trajectory: Trajectory
    a: float
    b: float
    c: float
    sign_ab: int
    sign_bc: int
    slope: float
    curvature: float
    max_u: float

    def summary_row(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "xi": None,
                "sign": self.sign_ab, "max_u": self.max_u}


def shoot(
    a: float,
    slope: float,
    curvature_param: float,
    x_end: float,
    psi1: PsiFunction,
    psi2: PsiFunction,
    q: Coefficient,
    f: Nonlinearity,
    cfg: SolverConfig = SolverConfig(),
) -> Trajectory:
    """Integrate from the (BC-shaped) initial state at ``a``.

    The initial state is (a; 0, psi1(slope), psi2(curvature_param)), so
    u(a) = 0, u'(a) = slope, (psi1(u'))'(a) = curvature_param.
    """
    if slope == 0:
        raise TrilyapError("slope must be nonzero for a nontrivial shot")
    init = SystemState(a, 0.0, psi1.eval(slope), psi2.eval(curvature_param))
    return integrate_ivp(init, x_end, psi1, psi2, q, f, cfg)


def _sweep_candidates() -> List[float]:
    negs = [-(2.0**k) for k in range(SWEEP_K_MAX, SWEEP_K_MIN - 1, -1)]
    poss = [2.0**k for k in range(SWEEP_K_MIN, SWEEP_K_MAX + 1)]
    return negs + poss


def _certify_interior_sign(traj: Trajectory, lo: float, hi: float, max_u: float) -> Optional[int]:
    """Sign of u on (lo, hi) if bounded away from zero; None otherwise.

    Fresh grid at ten times the node density of the trajectory segment.
    """
    n_nodes = int(np.sum((traj.xs >= lo) & (traj.xs <= hi)))
    n = max(_CERT_GRID_MIN, 10 * n_nodes + 1)
    xs = np.linspace(lo, hi, n)[1:-1]
    u = traj.u(xs)
    delta = DELTA_INT * max_u
    if np.all(u >= delta):
        return 1
    if np.all(u <= -delta):
        return -1
    return None


def _xi_candidates(traj: Trajectory, lo: float, hi: float) -> List[Tuple[float, float]]:
    """Zeros of v3 in [lo, hi] as (xi, uncertainty) pairs.

    Each interior event is re-refined against the trajectory's public
    (linear) v3 interpolant, so |v3(xi)| <= tau_bc holds literally; the
    distance to the integrator's sharper event location bounds how far
    xi can sit from the true inflection point.
    """
    v3_scale = max(1.0, float(np.max(np.abs(traj.v3))))
    tol = TAU_BC * v3_scale
    cands: List[Tuple[float, float]] = []
    for e in traj.events_v3:
        if not lo - tol <= e <= hi + tol:
            continue
        i = int(np.clip(np.searchsorted(traj.xs, e, side="right") - 1,
                        0, traj.xs.size - 2))
        x0, x1 = float(traj.xs[i]), float(traj.xs[i + 1])
        g0, g1 = float(traj.v3[i]), float(traj.v3[i + 1])
        if g0 == 0.0:
            xi = x0
        elif g1 == 0.0:
            xi = x1
        elif (g0 < 0) != (g1 < 0):
            xi = refine_zero(traj, (x0, x1), "v3")
        else:
            xi = e
        cands.append((min(max(xi, lo), hi), abs(xi - e)))
    for endpoint in (lo, hi):
        if abs(traj.v3_at(endpoint)) <= tol:
            if not any(abs(endpoint - c) <= tol for c, _ in cands):
                cands.append((endpoint, 0.0))
    return sorted(cands)


def solve_bc1(
    a: float,
    b: float,
    psi1: PsiFunction,
    psi2: PsiFunction,
    q: Coefficient,
    f: Nonlinearity,
    cfg: SolverConfig = SolverConfig(),
    slope: float = 1.0,
) -> SolutionBC1:
    """Find a nontrivial solution satisfying (BC1) on [a, b].

    Raises NoBracket if u(b) never changes sign over the curvature sweep,
    InteriorZero if every root of u(b) = 0 vanishes inside (a, b), and
    NoXi if sign-certified solutions exist but none carries a v3 zero.
    """
    if not a < b:
        raise TrilyapError(f"need a < b, got [{a}, {b}]")

    # Exploratory shots get a tighter step budget: extreme curvature
    # candidates can oscillate at huge amplitude and must fail fast.
    probe_cfg = replace(cfg, max_steps=min(cfg.max_steps, 20_000))

    def shot(m: float, probe: bool = False) -> Trajectory:
        return shoot(a, slope, m, b, psi1, psi2, q, f,
                     probe_cfg if probe else cfg)

    def end_value(m: float) -> Optional[float]:
        try:
            return shot(m, probe=True).u(b)
        except StepUnderflow:
            return None

    candidates = _sweep_candidates()
    values = [end_value(m) for m in candidates]

    roots: List[float] = []
    for i in range(len(candidates) - 1):
        glo, ghi = values[i], values[i + 1]
        if glo is None or ghi is None:
            continue
        if glo == 0.0:
            roots.append(candidates[i])
            continue
        if (glo < 0) == (ghi < 0):
            continue
        lo, hi = candidates[i], candidates[i + 1]
        root = None
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            gm = end_value(mid)
            if gm is None:
                break
            if gm == 0.0:
                root = mid
                break
            if (glo < 0) == (gm < 0):
                lo, glo = mid, gm
            else:
                hi = mid
            if hi - lo <= 1e-13 * max(1.0, abs(lo), abs(hi)):
                root = 0.5 * (lo + hi)
                break
        else:
            root = 0.5 * (lo + hi)
        if root is not None:
            roots.append(root)

    if not roots:
        raise NoBracket(f"u({b}) has no sign change over the curvature sweep")

    saw_positive = False
    for m in roots:
        try:
            traj = shot(m)
        except StepUnderflow:
            continue
        max_u = traj.max_abs_u()
        if max_u < DELTA_TRIVIAL * (b - a):
            continue
        tau = TAU_BC * max(1.0, max_u)
        if abs(traj.u(b)) > tau or abs(traj.u(a)) > tau:
            continue
        sign = _certify_interior_sign(traj, a, b, max_u)
        if sign is None:
            continue
        saw_positive = True
        xis = _xi_candidates(traj, a, b)
        if not xis:
            continue
        return SolutionBC1(trajectory=traj, a=a, b=b, xi=xis[0][0],
                           xi_candidates=tuple(x for x, _ in xis),
                           xi_uncertainties=tuple(d for _, d in xis),
                           sign=sign, slope=slope, curvature=m, max_u=max_u)

    if saw_positive:
        raise NoXi("no v3 zero in [a, b]: the shooting family misses (BC1)")
    raise InteriorZero("every u(b) = 0 candidate vanishes inside (a, b)")


def solve_bc2(
    a: float,
    slope: float,
    psi1: PsiFunction,
    psi2: PsiFunction,
    q: Coefficient,
    f: Nonlinearity,
    horizon: float,
    curvature: float = 0.0,
    cfg: SolverConfig = SolverConfig(),
) -> SolutionBC2:
    """Shoot from ``a`` and take the first two zero returns as b and c."""
    traj = shoot(a, slope, curvature, horizon, psi1, psi2, q, f, cfg)
    zeros = [z for z in traj.events_v1 if z > a]
    if len(zeros) < 2:
        raise InsufficientZeros(
            f"only {len(zeros)} zero(s) of u in ({a}, {horizon}]; (BC2) needs two")
    b, c = zeros[0], zeros[1]
    max_u = _max_abs_on(traj, a, c)
    sign_ab = _certify_interior_sign(traj, a, b, max_u)
    sign_bc = _certify_interior_sign(traj, b, c, max_u)
    if sign_ab is None or sign_bc is None:
        raise InteriorZero("u is not sign-definite between consecutive zeros")
    return SolutionBC2(trajectory=traj, a=a, b=b, c=c, sign_ab=sign_ab,
                       sign_bc=sign_bc, slope=slope, curvature=curvature,
                       max_u=max_u)


def _max_abs_on(traj: Trajectory, lo: float, hi: float) -> float:
    mask = (traj.xs >= lo) & (traj.xs <= hi)
    n = max(_CERT_GRID_MIN, 10 * int(mask.sum()) + 1)
    xs = np.linspace(lo, hi, n)
    return float(np.max(np.abs(traj.u(xs))))


def refine_zero(traj: Trajectory, bracket: Tuple[float, float], component: str = "v1") -> float:
    """Bisect the trajectory interpolant of v1 or v3 over ``bracket``."""
    if component == "v1":
        g = traj.u
    elif component == "v3":
        g = traj.v3_at
    else:
        raise ValueError(f"component must be 'v1' or 'v3', got {component!r}")
    lo, hi = float(bracket[0]), float(bracket[1])
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo < 0) == (ghi < 0):
        raise NoSignChange(f"{component} does not change sign on [{lo}, {hi}]")
    while hi - lo > 1e-10 * max(1.0, abs(lo), abs(hi)):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (glo < 0) == (gm < 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def locate_xi(traj: Trajectory, interval: Tuple[float, float]) -> float:
    """A zero of v3 in the interval (endpoint zeros within tolerance count)."""
    lo, hi = float(interval[0]), float(interval[1])
    cands = _xi_candidates(traj, lo, hi)
    if not cands:
        raise NoXi(f"v3 has no zero in [{lo}, {hi}]")
    return cands[0][0]
