"""Long-horizon zero-gap diagnostics.

The asymptotic statement (consecutive-zero spans t_{n+2} - t_n diverge
when sliding sigma-norms of q decay) is not observable at a finite
horizon.  What is checkable: the Holder factorization that drives its
proof, and the finite-horizon contrapositive: wherever the window norm
has dropped below the level needed to support a short triple, no triple
that short exists.  Gap trends are summarized by a Theil-Sen slope and
flagged, never asserted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import theilslopes

from .equation import Coefficient, Nonlinearity
from .errors import TooFewZeros
from .integrate import SolverConfig, Trajectory
from .lyapunov import _WeightedIntegrand, is_balanced, threshold, trajectory_zeros
from .psi import PsiFunction
from .quadrature import QuadValue, integrate_open, integrate_weighted
from .shooting import shoot

DEFAULT_SIGMA = 2.0
WINDOW_FACTOR = 10.0


def zero_sequence(q: Coefficient, x0: float, slope: float, horizon: float,
                  psi1: PsiFunction, psi2: PsiFunction, f: Nonlinearity,
                  curvature: float = 0.0,
                  cfg: SolverConfig = SolverConfig()) -> Tuple[Trajectory, List[float]]:
    """Trajectory from (x0; 0, psi1(slope), psi2(curvature)) and its u-zeros.

    The launch point x0 is itself a zero of u and is included.
    """
    traj = shoot(x0, slope, curvature, horizon, psi1, psi2, q, f, cfg)
    return traj, trajectory_zeros(traj, x0, horizon)


def gap_series(zeros: Sequence[float]) -> List[float]:
    """Second-neighbor spans t_{k+2} - t_k."""
    if len(zeros) < 3:
        raise TooFewZeros(f"gap series needs at least 3 zeros, got {len(zeros)}")
    return [zeros[k + 2] - zeros[k] for k in range(len(zeros) - 2)]


def window_norm(q: Coefficient, t: float, M: float, sigma: float,
                quad_n: int = 1024) -> QuadValue:
    """int_t^{t+M} |q|**sigma."""
    if sigma <= 1:
        raise ValueError(f"sigma must exceed 1, got {sigma}")
    if M <= 0:
        raise ValueError(f"window length must be positive, got {M}")
    q.check_domain(t)
    q.check_domain(t + M)
    q_abs = q.abs()
    return integrate_weighted(
        lambda xs: np.asarray(q_abs.eval(xs), dtype=float) ** sigma, t, t + M, quad_n)


@dataclass(frozen=True)
class HolderRecord:
    """Both sides of the proof's inequality chain on one zero triple."""

    t_lo: float
    t_mid: float
    t_hi: float
    span: float
    threshold: float
    lhs_abs: float            # int |q| Phi(u) over the span
    factor_q: float           # (int |q|**sigma)**(1/sigma)
    factor_phi: float         # (int Phi**(sigma/(sigma-1)))**((sigma-1)/sigma)
    quadrature_error: float
    sigma: float

    @property
    def holder_product(self) -> float:
        return self.factor_q * self.factor_phi

    @property
    def holder_dominates(self) -> bool:
        return self.lhs_abs <= self.holder_product + self.quadrature_error

    @property
    def chain_supported(self) -> bool:
        # theorem side: threshold < lhs_abs <= holder product
        return self.threshold < self.lhs_abs and self.holder_dominates


def holder_gap_check(triple: Tuple[float, float, float], q: Coefficient, sigma: float,
                     traj: Trajectory, psi1: PsiFunction, psi2: PsiFunction,
                     f: Nonlinearity, quad_n: int = 2048) -> HolderRecord:
    """Evaluate the Holder factorization over one certified zero triple."""
    t_lo, t_mid, t_hi = (float(t) for t in triple)
    if not t_lo < t_mid < t_hi:
        raise TooFewZeros(f"triple must be increasing, got {triple}")
    if sigma <= 1:
        raise ValueError(f"sigma must exceed 1, got {sigma}")
    w = _WeightedIntegrand(traj, q, f, psi1, psi2)
    lhs = w.integral("abs", t_lo, t_hi, quad_n)
    q_abs = q.abs()
    int_q_sigma = integrate_weighted(
        lambda xs: np.asarray(q_abs.eval(xs), dtype=float) ** sigma, t_lo, t_hi, quad_n)
    conj = sigma / (sigma - 1.0)
    if w.closed:
        int_phi = integrate_weighted(lambda xs: w.phi(traj.u(xs)) ** conj, t_lo, t_hi, quad_n)
    else:
        int_phi = integrate_open(lambda xs: w.phi(traj.u(xs)) ** conj, t_lo, t_hi, quad_n)
    factor_q = float(int_q_sigma) ** (1.0 / sigma)
    factor_phi = float(int_phi) ** (1.0 / conj)
    err = lhs.error + int_q_sigma.error + int_phi.error
    return HolderRecord(t_lo=t_lo, t_mid=t_mid, t_hi=t_hi, span=t_hi - t_lo,
                        threshold=threshold(t_lo, t_hi, psi1, psi2),
                        lhs_abs=float(lhs), factor_q=factor_q,
                        factor_phi=factor_phi, quadrature_error=err, sigma=sigma)


@dataclass(frozen=True)
class TrendSummary:
    theil_sen_slope: Optional[float]
    consistent_with_divergence: Optional[bool]
    mean_gap: float
    min_gap: float
    max_gap: float


@dataclass(frozen=True)
class ContrapositiveEntry:
    """One window check: norm below the support level forces a long gap."""

    k: int
    t: float
    window_norm: float
    level: float
    gap: Optional[float]
    consistent: bool


@dataclass(frozen=True)
class ZeroGapReport:
    zeros: Tuple[float, ...]
    gaps: Tuple[float, ...]
    window_norms: Tuple[Tuple[float, float], ...]
    sigma: float
    window: float
    horizon: float
    trend: TrendSummary
    contrapositive: Tuple[ContrapositiveEntry, ...]
    contrapositive_applicable: bool

    def csv_rows(self):
        """Rows for the `k,t_k,gap_k,window_norm_k` export."""
        norms = dict(self.window_norms)
        for k, t in enumerate(self.zeros):
            gap = self.gaps[k] if k < len(self.gaps) else None
            yield k, t, gap, norms.get(t)


def support_level(window: float, sigma: float, psi1: PsiFunction, psi2: PsiFunction) -> float:
    """Window-norm level below which no triple of span <= window fits.

    From the chain threshold(span) <= norm**(1/sigma) * span**((sigma-1)/sigma)
    with Phi identically 1 (balanced data): any shorter triple needs
    window_norm >= (threshold(window) / window**((sigma-1)/sigma))**sigma.
    """
    thr = threshold(0.0, window, psi1, psi2)
    return (thr / window ** ((sigma - 1.0) / sigma)) ** sigma


def build_zero_gap_report(q: Coefficient, traj: Trajectory, zeros: Sequence[float],
                          psi1: PsiFunction, psi2: PsiFunction, f: Nonlinearity,
                          sigma: float = DEFAULT_SIGMA,
                          window: Optional[float] = None) -> ZeroGapReport:
    """Assemble gaps, window norms, trend statistics and the finite-horizon
    contrapositive entries for one computed zero sequence."""
    zs = [float(z) for z in zeros]
    if len(zs) < 3:
        raise TooFewZeros(f"report needs at least 3 zeros, got {len(zs)}")
    gaps = gap_series(zs)
    if window is None:
        mean_consecutive = (zs[-1] - zs[0]) / (len(zs) - 1)
        window = WINDOW_FACTOR * mean_consecutive

    hi = q.domain[1]
    norms = []
    for t in zs:
        if t + window <= hi:
            norms.append((t, float(window_norm(q, t, window, sigma))))

    if len(gaps) >= 2:
        slope = float(theilslopes(gaps, np.arange(len(gaps)))[0])
        trend = TrendSummary(theil_sen_slope=slope,
                             consistent_with_divergence=slope > 0,
                             mean_gap=float(np.mean(gaps)),
                             min_gap=float(np.min(gaps)), max_gap=float(np.max(gaps)))
    else:
        trend = TrendSummary(None, None, float(np.mean(gaps)),
                             float(np.min(gaps)), float(np.max(gaps)))

    applicable = is_balanced(f, psi1, psi2)
    entries: List[ContrapositiveEntry] = []
    if applicable:
        level = support_level(window, sigma, psi1, psi2)
        norm_map = dict(norms)
        for k in range(len(zs)):
            t = zs[k]
            if t not in norm_map:
                continue
            gap = gaps[k] if k < len(gaps) else None
            below = norm_map[t] < level
            consistent = (not below) or (gap is None) or (gap > window)
            entries.append(ContrapositiveEntry(k=k, t=t, window_norm=norm_map[t],
                                               level=level, gap=gap,
                                               consistent=consistent))

    return ZeroGapReport(zeros=tuple(zs), gaps=tuple(gaps),
                         window_norms=tuple(norms), sigma=sigma, window=window,
                         horizon=traj.x_end, trend=trend,
                         contrapositive=tuple(entries),
                         contrapositive_applicable=applicable)
