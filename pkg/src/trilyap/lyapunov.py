"""Thresholds, weighted integrals, and the inequality reports.

Every verified statement has the shape

    integral of q-parts weighted by Phi(u)  >  psi2((2/(b-a)) / psi1((b-a)/2))

with Phi(u) = f(u)/psi2(psi1(u)), identically 1 for balanced power data.
Since u vanishes at the certified boundary points, Phi may be undefined
there; quadrature uses closed Simpson only in the balanced case and an
open midpoint rule (plus the declared limit, when the power sandwich
gives one) otherwise.  "holds" reflects the strict inequality honestly:
reports carry a quadrature error estimate, and a conclusive failure
(margin below minus the estimate) raises InvariantViolation because the
inequalities are theorems for certified solutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

import numpy as np

from .equation import Coefficient, Nonlinearity
from .errors import (
    DegenerateInterval,
    ExponentNotPositive,
    InvariantViolation,
    NonPositiveValue,
    PhiLimitInfinite,
    TooFewZeros,
    UndefinedAtZero,
    ZeroCoefficient,
)
from .integrate import Trajectory
from .psi import PsiFunction
from .quadrature import QuadValue, cumulative_simpson, integrate_weighted
from .shooting import SolutionBC1, SolutionBC2

DEFAULT_SCAN_N = 257
DEFAULT_QUAD_N = 2048


# ---------------------------------------------------------------------------
# Threshold and Phi weight
# ---------------------------------------------------------------------------


def threshold(a: float, b: float, psi1: PsiFunction, psi2: PsiFunction) -> float:
    """psi2((2/(b-a)) / psi1((b-a)/2)); reduces to (2/(b-a))**(a2*(a1+1))
    for power operators."""
    if not a < b:
        raise DegenerateInterval(f"need a < b, got [{a}, {b}]")
    half = psi1.eval((b - a) / 2.0)
    if half <= 0:
        raise NonPositiveValue(f"psi1((b-a)/2) = {half} <= 0")
    return psi2.eval((2.0 / (b - a)) / half)


def _power_alphas(psi1: PsiFunction, psi2: PsiFunction) -> Optional[Tuple[float, float]]:
    if psi1.kind == "power" and psi2.kind == "power":
        return psi1.alpha, psi2.alpha
    return None


def is_balanced(f: Nonlinearity, psi1: PsiFunction, psi2: PsiFunction) -> bool:
    """Balanced quasilinear data: power operators with f the matching
    signed power, so Phi is identically 1."""
    alphas = _power_alphas(psi1, psi2)
    return (alphas is not None and f.kind == "signed_power"
            and f.p == alphas[0] * alphas[1])


def phi_limit_at_zero(f: Nonlinearity, psi1: PsiFunction, psi2: PsiFunction) -> Optional[float]:
    """Declared limit of Phi(u) as u -> 0, when one can be read off.

    Power operators with a sandwich compare |f| against |u|**p: the limit
    is 0 for p > a1*a2 and +inf (rejected) for p < a1*a2.  Returns None
    when no limit is declared.
    """
    alphas = _power_alphas(psi1, psi2)
    if alphas is None:
        return None
    a1a2 = alphas[0] * alphas[1]
    if f.kind == "signed_power":
        d = f.p - a1a2
        if d == 0:
            return 1.0
        if d > 0:
            return 0.0
        raise PhiLimitInfinite(
            f"Phi diverges at 0: p={f.p} < alpha1*alpha2={a1a2}")
    if f.sandwich is not None:
        d = f.sandwich.p - a1a2
        if d > 0:
            return 0.0
        if d < 0:
            raise PhiLimitInfinite(
                f"Phi diverges at 0: sandwich p={f.sandwich.p} < alpha1*alpha2={a1a2}")
    return None


def phi_weight(u_val: float, f: Nonlinearity, psi1: PsiFunction, psi2: PsiFunction) -> float:
    """Phi(u) = f(u)/psi2(psi1(u)); at u = 0 only a declared limit is usable."""
    if u_val == 0.0:
        limit = phi_limit_at_zero(f, psi1, psi2)
        if limit is None:
            raise UndefinedAtZero("Phi(0) requested without a declared limit")
        return limit
    if is_balanced(f, psi1, psi2):
        return 1.0
    alphas = _power_alphas(psi1, psi2)
    if alphas is not None and f.kind == "signed_power":
        return abs(u_val) ** (f.p - alphas[0] * alphas[1])
    return f.eval(u_val) / psi2.eval(psi1.eval(u_val))


def _phi_array_fn(f: Nonlinearity, psi1: PsiFunction, psi2: PsiFunction,
                  u_scale: float) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized Phi(u); tiny |u| is clamped away from the 0/0 ambiguity
    (Phi is bounded there whenever the instance is in hypothesis)."""
    alphas = _power_alphas(psi1, psi2)
    if is_balanced(f, psi1, psi2):
        return lambda u: np.ones_like(u)
    if alphas is not None and f.kind == "signed_power":
        d = f.p - alphas[0] * alphas[1]
        return lambda u: np.abs(u) ** d
    clamp = 1e-10 * max(u_scale, 1e-30)

    def phi(u: np.ndarray) -> np.ndarray:
        safe = np.where(np.abs(u) < clamp, clamp, np.abs(u)) * np.where(u < 0, -1.0, 1.0)
        return f.eval(safe) / psi2.eval(psi1.eval(safe))

    return phi


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InequalityReport:
    """LHS, threshold, and verdict for one inequality instance."""

    kind: str
    a: float
    b: float
    c: Optional[float]
    xi: Optional[float]
    lhs: float
    threshold: float
    quadrature_error: float

    @property
    def margin(self) -> float:
        return self.lhs - self.threshold

    @property
    def holds(self) -> bool:
        return self.margin > 0

    @property
    def conclusive(self) -> bool:
        return self.quadrature_error < abs(self.margin)

    def __str__(self) -> str:
        verdict = "holds" if self.holds else "FAILS"
        if not self.conclusive:
            verdict += " (inconclusive)"
        return (f"{self.kind}: lhs={self.lhs:.6g} threshold={self.threshold:.6g} "
                f"margin={self.margin:.6g} [{verdict}]")


def _raise_if_conclusive_failure(report: InequalityReport, context: str) -> None:
    if not report.holds and report.conclusive:
        raise InvariantViolation(
            f"{context}: {report.kind} failed beyond quadrature error "
            f"(margin={report.margin:.3e}, error={report.quadrature_error:.3e})")


# ---------------------------------------------------------------------------
# Weighted integrals over a trajectory
# ---------------------------------------------------------------------------


def coefficient_sign_changes(q: Coefficient, lo: float, hi: float,
                             scan_n: int = 2048) -> List[float]:
    """Interior zeros of q located by scan plus bisection.

    These are the kinks of q_plus/q_minus/|q|; splitting quadrature there
    restores the composite rules' order.
    """
    xs = np.linspace(lo, hi, scan_n + 1)
    vals = np.asarray(q.eval(xs), dtype=float)
    zeros: List[float] = []
    for i in range(scan_n):
        g0, g1 = vals[i], vals[i + 1]
        if g0 == 0.0 or (g0 < 0) == (g1 < 0):
            continue
        a_, b_ = float(xs[i]), float(xs[i + 1])
        for _ in range(60):
            m = 0.5 * (a_ + b_)
            gm = float(q.eval(m))
            if gm == 0.0:
                a_ = b_ = m
                break
            if (g0 < 0) == (gm < 0):
                a_, g0 = m, gm
            else:
                b_ = m
        zeros.append(0.5 * (a_ + b_))
    return [z for z in zeros if lo < z < hi]


class _WeightedIntegrand:
    """q-part times Phi(u) along a trajectory, with the closed/open choice."""

    def __init__(self, traj: Trajectory, q: Coefficient, f: Nonlinearity,
                 psi1: PsiFunction, psi2: PsiFunction):
        self.traj = traj
        self.q_plus = q.positive_part()
        self.q_minus = q.negative_part()
        self.q_abs = q.abs()
        u_scale = float(np.max(np.abs(traj.v1))) or 1.0
        phi_limit_at_zero(f, psi1, psi2)  # reject out-of-hypothesis data early
        self.phi = _phi_array_fn(f, psi1, psi2, u_scale)
        self.closed = is_balanced(f, psi1, psi2)
        self.q_kinks = coefficient_sign_changes(q, traj.x_start, traj.x_end)

    def values(self, part: str, xs: np.ndarray) -> np.ndarray:
        coeff = {"plus": self.q_plus, "minus": self.q_minus, "abs": self.q_abs}[part]
        return np.asarray(coeff.eval(xs), dtype=float) * self.phi(self.traj.u(xs))

    def integral(self, part: str, lo: float, hi: float, n: int) -> QuadValue:
        if hi <= lo:
            return QuadValue(0.0, 0.0)
        from .quadrature import integrate_open

        rule = integrate_weighted if self.closed else integrate_open
        cuts = [lo] + [z for z in self.q_kinks if lo < z < hi] + [hi]
        total = 0.0
        err = 0.0
        for piece_lo, piece_hi in zip(cuts[:-1], cuts[1:]):
            frac = (piece_hi - piece_lo) / (hi - lo)
            n_piece = max(64, 2 * int(n * frac / 2 + 1))
            val = rule(lambda xs: self.values(part, xs), piece_lo, piece_hi, n_piece)
            total += float(val)
            err += val.error
        return QuadValue(total, err)


def lhs_bc1(sol: SolutionBC1, xi: float, q: Coefficient,
            psi1: PsiFunction, psi2: PsiFunction, f: Nonlinearity,
            quad_n: int = DEFAULT_QUAD_N) -> QuadValue:
    """int_a^xi q_minus Phi + int_xi^b q_plus Phi along the certified solution."""
    if not sol.a <= xi <= sol.b:
        raise DegenerateInterval(f"xi={xi} outside [{sol.a}, {sol.b}]")
    w = _WeightedIntegrand(sol.trajectory, q, f, psi1, psi2)
    left = w.integral("minus", sol.a, xi, quad_n)
    right = w.integral("plus", xi, sol.b, quad_n)
    return QuadValue(float(left) + float(right), left.error + right.error)


def verify_bc1(sol: SolutionBC1, q: Coefficient, psi1: PsiFunction, psi2: PsiFunction,
               f: Nonlinearity, quad_n: int = DEFAULT_QUAD_N) -> InequalityReport:
    """Theorem report for a certified (BC1) solution.

    When several v3 zeros qualify as xi, each is a valid certificate; the
    weakest margin is reported, and a conclusive failure raises
    InvariantViolation (the inequality is a theorem).  The uncertainty of
    each xi location enters the error estimate through the local size of
    the integrand (moving xi trades q_minus mass for q_plus mass).
    """
    thr = threshold(sol.a, sol.b, psi1, psi2)
    uncertainties = sol.xi_uncertainties or (0.0,) * len(sol.xi_candidates)
    worst: Optional[Tuple[float, QuadValue]] = None
    for xi, dxi in zip(sol.xi_candidates, uncertainties):
        val = lhs_bc1(sol, xi, q, psi1, psi2, f, quad_n)
        if dxi > 0:
            u_xi = float(sol.trajectory.u(xi))
            local = abs(q.eval(xi)) * phi_weight(u_xi, f, psi1, psi2)
            val = QuadValue(float(val), val.error + 2.0 * dxi * local)
        if worst is None or float(val) < float(worst[1]):
            worst = (xi, val)
    xi, val = worst
    report = InequalityReport(kind="thm21", a=sol.a, b=sol.b, c=None, xi=xi,
                              lhs=float(val), threshold=thr,
                              quadrature_error=val.error)
    _raise_if_conclusive_failure(report, "verify_bc1")
    return report


# ---------------------------------------------------------------------------
# xi-scan for the three-point statements
# ---------------------------------------------------------------------------


def _golden_max(fn: Callable[[float], float], lo: float, hi: float, iters: int = 80) -> Tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        if hi - lo < 1e-14 * max(1.0, abs(lo), abs(hi)):
            break
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = fn(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = fn(x1)
    xm = 0.5 * (lo + hi)
    return xm, fn(xm)


def scan_split_max(w: _WeightedIntegrand, lo: float, hi: float,
                   scan_n: int = DEFAULT_SCAN_N,
                   quad_n: int = DEFAULT_QUAD_N) -> Tuple[float, float, float]:
    """max over xi in [lo, hi] of int_lo^xi q_minus Phi + int_xi^hi q_plus Phi.

    Cumulative integrals on a fine uniform grid give the objective at
    every node; the best point of the scan grid is then refined by
    golden section on the interpolated objective.  Returns (J*, xi*,
    error estimate).
    """
    n_fine = max(4 * (scan_n - 1), quad_n)
    if n_fine % 2:
        n_fine += 1
    if w.closed:
        xs = np.linspace(lo, hi, n_fine + 1)
        h = (hi - lo) / n_fine
        wm = w.values("minus", xs)
        wp = w.values("plus", xs)
        cm = cumulative_simpson(wm, h)
        cp = cumulative_simpson(wp, h)
        cm_coarse = cumulative_simpson(wm[::2], 2 * h)
        cp_coarse = cumulative_simpson(wp[::2], 2 * h)
        err = abs(cm[-1] - cm_coarse[-1]) + abs(cp[-1] - cp_coarse[-1])
    else:
        h = (hi - lo) / n_fine
        mids = lo + h * (np.arange(n_fine) + 0.5)
        wm_mid = w.values("minus", mids)
        wp_mid = w.values("plus", mids)
        xs = np.linspace(lo, hi, n_fine + 1)
        cm = np.concatenate([[0.0], np.cumsum(wm_mid) * h])
        cp = np.concatenate([[0.0], np.cumsum(wp_mid) * h])
        mids2 = lo + 2 * h * (np.arange(n_fine // 2) + 0.5)
        tm2 = float(np.sum(w.values("minus", mids2)) * 2 * h)
        tp2 = float(np.sum(w.values("plus", mids2)) * 2 * h)
        err = abs(cm[-1] - tm2) + abs(cp[-1] - tp2)

    total_plus = cp[-1]
    J = cm + (total_plus - cp)

    def J_at(xi: float) -> float:
        return float(np.interp(xi, xs, J))

    scan = np.linspace(lo, hi, max(3, scan_n))
    scan_vals = np.interp(scan, xs, J)
    i = int(np.argmax(scan_vals))
    blo = scan[max(0, i - 1)]
    bhi = scan[min(len(scan) - 1, i + 1)]
    xi_star, j_star = _golden_max(J_at, blo, bhi)
    if scan_vals[i] > j_star:
        xi_star, j_star = float(scan[i]), float(scan_vals[i])
    return j_star, xi_star, err + 1e-15 * abs(j_star)


def verify_bc2(sol: SolutionBC2, q: Coefficient, psi1: PsiFunction, psi2: PsiFunction,
               f: Nonlinearity, scan_n: int = DEFAULT_SCAN_N,
               quad_n: int = DEFAULT_QUAD_N) -> List[InequalityReport]:
    """Reports for the two-subinterval statements and their combination.

    For a certified (BC2) solution the combined statement must hold and
    at least one of the subinterval statements must hold; a conclusive
    violation of either raises InvariantViolation.
    """
    if scan_n < 3:
        raise ValueError("scan_n must be at least 3")
    w = _WeightedIntegrand(sol.trajectory, q, f, psi1, psi2)
    spans = (
        ("thm22_left", sol.a, sol.b, None),
        ("thm22_right", sol.b, sol.c, None),
        ("thm22_full", sol.a, sol.c, sol.c),
    )
    reports = []
    for kind, lo, hi, _ in spans:
        j_star, xi_star, err = scan_split_max(w, lo, hi, scan_n, quad_n)
        thr = threshold(lo, hi, psi1, psi2)
        reports.append(InequalityReport(kind=kind, a=sol.a, b=sol.b, c=sol.c,
                                        xi=xi_star, lhs=j_star, threshold=thr,
                                        quadrature_error=err))
    _raise_if_conclusive_failure(reports[2], "verify_bc2 (combined)")
    left, right = reports[0], reports[1]
    if (not left.holds and left.conclusive) and (not right.holds and right.conclusive):
        raise InvariantViolation(
            "verify_bc2: both subinterval inequalities failed conclusively")
    return reports


def verify_abs(sol: Union[SolutionBC1, SolutionBC2], q: Coefficient,
               psi1: PsiFunction, psi2: PsiFunction, f: Nonlinearity,
               quad_n: int = DEFAULT_QUAD_N) -> InequalityReport:
    """Weaker |q|-form over the full interval (same threshold).

    Always dominates the theorem report: lhs_abs >= lhs_theorem.
    """
    if isinstance(sol, SolutionBC1):
        lo, hi, c = sol.a, sol.b, None
    else:
        lo, hi, c = sol.a, sol.c, sol.c
    w = _WeightedIntegrand(sol.trajectory, q, f, psi1, psi2)
    val = w.integral("abs", lo, hi, quad_n)
    report = InequalityReport(kind="cor21_abs", a=lo, b=hi if c is None else sol.b,
                              c=c, xi=None, lhs=float(val),
                              threshold=threshold(lo, hi, psi1, psi2),
                              quadrature_error=val.error)
    _raise_if_conclusive_failure(report, "verify_abs")
    return report


# ---------------------------------------------------------------------------
# Zero count and sup-norm consequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TripleTerm:
    t_lo: float
    t_mid: float
    t_hi: float
    max_value: float
    xi: float
    quadrature_error: float


@dataclass(frozen=True)
class ZeroCountResult:
    """Zero-count bound N < N_bound with its per-triple contributions.

    ``remark_rhs``/``remark_holds`` log the stronger power-data form
    (threshold times N**(a2*(a1+1)+1)) as a diagnostic only.
    """

    interval: Tuple[float, float]
    zeros: Tuple[float, ...]
    n_pairs: int
    per_triple: Tuple[TripleTerm, ...]
    sum_max: float
    threshold: float
    n_bound: float
    quadrature_error: float
    remark_rhs: Optional[float]
    remark_holds: Optional[bool]

    @property
    def holds(self) -> bool:
        return self.n_pairs < self.n_bound

    def report(self) -> InequalityReport:
        return InequalityReport(kind="zero_count", a=self.interval[0],
                                b=self.interval[1], c=None, xi=None,
                                lhs=self.sum_max,
                                threshold=self.n_pairs * self.threshold,
                                quadrature_error=self.quadrature_error)


def trajectory_zeros(traj: Trajectory, lo: float, hi: float) -> List[float]:
    """Zeros of u in [lo, hi]: recorded events, plus the start node when
    the trajectory itself launches from u = 0."""
    zeros = [e for e in traj.events_v1 if lo <= e <= hi]
    u_scale = max(1.0, float(np.max(np.abs(traj.v1))))
    if lo <= traj.x_start <= hi and abs(traj.v1[0]) <= 1e-12 * u_scale:
        if not zeros or zeros[0] > traj.x_start:
            zeros.insert(0, traj.x_start)
    return sorted(zeros)


def zero_count_bound(traj: Trajectory, interval: Tuple[float, float],
                     psi1: PsiFunction, psi2: PsiFunction, f: Nonlinearity,
                     q: Coefficient, scan_n: int = DEFAULT_SCAN_N,
                     quad_n: int = DEFAULT_QUAD_N) -> ZeroCountResult:
    """Bound the zero count via the summed three-point maxima.

    With zeros t_1 < ... < t_{2N+1} in the interval, each triple
    [t_{2k-1}, t_{2k+1}] contributes its scanned maximum; the sum divided
    by the interval threshold bounds N strictly from above.
    """
    lo, hi = float(interval[0]), float(interval[1])
    zeros = trajectory_zeros(traj, lo, hi)
    if len(zeros) < 3:
        raise TooFewZeros(f"need at least 3 zeros in [{lo}, {hi}], found {len(zeros)}")
    count = len(zeros) if len(zeros) % 2 else len(zeros) - 1
    zeros = zeros[:count]
    n_pairs = (count - 1) // 2

    w = _WeightedIntegrand(traj, q, f, psi1, psi2)
    terms = []
    total = 0.0
    total_err = 0.0
    for k in range(n_pairs):
        t_lo, t_mid, t_hi = zeros[2 * k], zeros[2 * k + 1], zeros[2 * k + 2]
        j_star, xi_star, err = scan_split_max(w, t_lo, t_hi, scan_n, quad_n)
        terms.append(TripleTerm(t_lo, t_mid, t_hi, j_star, xi_star, err))
        total += j_star
        total_err += err

    thr = threshold(lo, hi, psi1, psi2)
    n_bound = total / thr
    alphas = _power_alphas(psi1, psi2)
    remark_rhs = remark_holds = None
    if alphas is not None:
        expo = alphas[1] * (alphas[0] + 1.0) + 1.0
        remark_rhs = thr * n_pairs**expo
        remark_holds = total > remark_rhs

    result = ZeroCountResult(interval=(lo, hi), zeros=tuple(zeros),
                             n_pairs=n_pairs, per_triple=tuple(terms),
                             sum_max=total, threshold=thr, n_bound=n_bound,
                             quadrature_error=total_err,
                             remark_rhs=remark_rhs, remark_holds=remark_holds)
    report = result.report()
    _raise_if_conclusive_failure(report, "zero_count_bound")
    return result


def min_sup_norm(a: float, b: float, q: Coefficient, c2: float, p: float,
                 alpha1: float, alpha2: float, quad_n: int = 4096) -> float:
    """Lower bound on max|u| for any certified solution with sandwich data.

    Derived from the |q| form: threshold < c2 * M**(p - a1*a2) * int|q|.
    """
    if not a < b:
        raise DegenerateInterval(f"need a < b, got [{a}, {b}]")
    d = p - alpha1 * alpha2
    if d <= 0:
        raise ExponentNotPositive(f"need p - alpha1*alpha2 > 0, got {d}")
    if c2 <= 0:
        raise ZeroCoefficient(f"sandwich constant c2 must be positive, got {c2}")
    q_abs = q.abs()
    integral = float(integrate_weighted(lambda xs: np.asarray(q_abs.eval(xs), dtype=float),
                                        a, b, quad_n))
    if integral <= 0:
        raise ZeroCoefficient("int |q| vanishes on [a, b]")
    thr = (2.0 / (b - a)) ** (alpha2 * (alpha1 + 1.0))
    return (thr / (c2 * integral)) ** (1.0 / d)


def max_location_feasible(d: float, M: float, a: float, b: float, q: Coefficient,
                          c2: float, p: float, psi1: PsiFunction, psi2: PsiFunction,
                          quad_n: int = 4096) -> bool:
    """Whether d is feasible as the location of the maximum M = |u(d)|.

    The quantitative chain bounds psi1(M) * (1/psi1(d-a) + 1/psi1(b-d))
    by (b-a) * psi2^{-1}(c2 * M**p * int|q|); near the endpoints the left
    side diverges, so maxima cannot sit arbitrarily close to a or b.
    """
    if not a < d < b:
        raise DegenerateInterval(f"need a < d < b, got d={d} in [{a}, {b}]")
    if M <= 0:
        raise NonPositiveValue(f"M must be positive, got {M}")
    q_abs = q.abs()
    integral = float(integrate_weighted(lambda xs: np.asarray(q_abs.eval(xs), dtype=float),
                                        a, b, quad_n))
    lhs = psi1.eval(M) * (1.0 / psi1.eval(d - a) + 1.0 / psi1.eval(b - d))
    rhs = (b - a) * psi2.inverse(c2 * M**p * integral)
    return lhs <= rhs
