"""Odd increasing scalar operators and their structural property checks.

The equation couples two operators psi1, psi2 (both odd and increasing).
The power family ``|x|**(alpha-1) * x`` generalizes the classical
p-Laplacian; custom operators come from the expression registry.  The
inequality machinery additionally needs psi1 sub-multiplicative with
convex reciprocal and psi2 super-multiplicative, which we can only
falsify on grids, never prove.  All checks report the worst violation
found on the supplied grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import BracketNotFound, EmptyGrid, NonPositiveExponent, NonPositiveValue
from .expressions import compile_expression

Number = Union[float, np.ndarray]

# Falsification grid: 64 log-spaced points spanning six decades.
GRID_POINTS = 64
GRID_LO = 1e-3
GRID_HI = 1e3

# Absolute tolerances for oddness / inverse round-trips; the root-find
# limits what a custom operator can promise.
TAU_EXACT = 1e-10
TAU_ROOTFIND = 1e-8

# Property checks compare values spanning many orders of magnitude, so
# the tolerance is relative to the larger side of the inequality.
TAU_PROP = 1e-9


def default_grid() -> np.ndarray:
    return np.logspace(math.log10(GRID_LO), math.log10(GRID_HI), GRID_POINTS)


def signed_power(x: Number, alpha: float) -> Number:
    """Odd power ``|x|**(alpha-1) * x``, defined as 0 at x = 0."""
    if isinstance(x, np.ndarray):
        out = np.zeros_like(x, dtype=float)
        nz = x != 0
        xa = x[nz]
        out[nz] = np.abs(xa) ** (alpha - 1.0) * xa
        return out
    if x == 0:
        return 0.0
    return abs(x) ** (alpha - 1.0) * x


@dataclass(frozen=True)
class PsiFunction:
    """An odd increasing scalar operator with a usable inverse.

    ``kind`` is "power" (exact inverse) or "custom" (inverse by bisection
    on an expanding bracket; monotonicity makes the root unique).
    """

    kind: str
    alpha: Optional[float] = None
    expr: Optional[str] = None
    declared_odd: bool = True
    declared_increasing: bool = True
    _fn: Callable[[Number], Number] = field(default=None, repr=False, compare=False)

    @property
    def tau_inv(self) -> float:
        return TAU_EXACT if self.kind == "power" else TAU_ROOTFIND

    def eval(self, x: Number) -> Number:
        if self.kind == "power":
            return signed_power(x, self.alpha)
        return self._fn(x)

    def inverse(self, y: Number) -> Number:
        if self.kind == "power":
            return signed_power(y, 1.0 / self.alpha)
        if isinstance(y, np.ndarray):
            return np.array([self._invert_scalar(float(v)) for v in y])
        return self._invert_scalar(float(y))

    def _invert_scalar(self, y: float) -> float:
        # Odd symmetry: solve on the positive side and mirror, so that
        # inverse(-y) == -inverse(y) holds exactly.
        if y == 0.0:
            return 0.0
        if y < 0.0:
            return -self._invert_scalar(-y)
        hi = 1.0
        for _ in range(64):
            if self._fn(hi) >= y:
                break
            hi *= 2.0
        else:
            raise BracketNotFound(f"no bracket for inverse of {self.expr!r} at y={y}")
        lo = 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self._fn(mid) < y:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-15 * max(1.0, hi):
                break
        return 0.5 * (lo + hi)


def power_psi(alpha: float) -> PsiFunction:
    """The signed power operator; inverse is the signed power 1/alpha."""
    if alpha <= 0:
        raise NonPositiveExponent(f"power exponent must be positive, got {alpha}")
    return PsiFunction(kind="power", alpha=float(alpha))


def custom_psi(expr: str) -> PsiFunction:
    fn = compile_expression(expr)
    return PsiFunction(kind="custom", expr=expr, _fn=fn)


def eval_inverse(psi: PsiFunction, y: float) -> float:
    return psi.inverse(y)


@dataclass(frozen=True)
class PsiPropertyReport:
    """Outcome of one grid-based property falsification."""

    property: str
    holds: bool
    worst_violation: Optional[tuple] = None  # (inputs, magnitude)
    grid_spec: str = ""

    def __str__(self) -> str:
        tail = "" if self.holds else f" worst={self.worst_violation}"
        return f"{self.property}: {'holds' if self.holds else 'FAILS'}{tail}"


def _pairwise_check(
    name: str,
    grid: Sequence[float],
    violation: Callable[[float, float], float],
) -> PsiPropertyReport:
    pts = np.asarray(grid, dtype=float)
    if pts.size == 0:
        raise EmptyGrid(f"{name}: empty grid")
    worst = None
    worst_mag = 0.0
    for x in pts:
        for y in pts:
            mag = violation(float(x), float(y))
            if mag > worst_mag:
                worst_mag = mag
                worst = ((float(x), float(y)), mag)
    spec = f"{pts.size} points in [{pts.min():g}, {pts.max():g}]"
    return PsiPropertyReport(name, holds=worst is None, worst_violation=worst, grid_spec=spec)


def check_submultiplicative(psi: PsiFunction, grid: Optional[Sequence[float]] = None) -> PsiPropertyReport:
    """Falsify psi(x*y) <= psi(x)*psi(y) over all grid pairs in (0, inf)."""
    pts = default_grid() if grid is None else grid

    def violation(x: float, y: float) -> float:
        lhs = psi.eval(x * y)
        rhs = psi.eval(x) * psi.eval(y)
        excess = lhs - rhs
        tol = TAU_PROP * max(1.0, abs(lhs), abs(rhs))
        return excess if excess > tol else 0.0

    return _pairwise_check("submultiplicative", pts, violation)


def check_supermultiplicative(psi: PsiFunction, grid: Optional[Sequence[float]] = None) -> PsiPropertyReport:
    """Mirror of check_submultiplicative with the inequality reversed."""
    pts = default_grid() if grid is None else grid

    def violation(x: float, y: float) -> float:
        lhs = psi.eval(x * y)
        rhs = psi.eval(x) * psi.eval(y)
        deficit = rhs - lhs
        tol = TAU_PROP * max(1.0, abs(lhs), abs(rhs))
        return deficit if deficit > tol else 0.0

    return _pairwise_check("supermultiplicative", pts, violation)


def check_reciprocal_convex(psi: PsiFunction, grid: Optional[Sequence[float]] = None) -> PsiPropertyReport:
    """Midpoint convexity of 1/psi on (0, inf); continuity makes it sufficient."""
    pts = np.asarray(default_grid() if grid is None else grid, dtype=float)
    if pts.size == 0:
        raise EmptyGrid("reciprocal_convex: empty grid")
    vals = {float(x): psi.eval(float(x)) for x in pts}
    for x, v in vals.items():
        if v <= 0:
            raise NonPositiveValue(f"psi({x}) = {v} <= 0 on a positive grid")

    def violation(x: float, y: float) -> float:
        mid = psi.eval(0.5 * (x + y))
        if mid <= 0:
            raise NonPositiveValue(f"psi({0.5 * (x + y)}) <= 0")
        lhs = 1.0 / mid
        rhs = 0.5 * (1.0 / vals[x] + 1.0 / vals[y])
        excess = lhs - rhs
        tol = TAU_PROP * max(1.0, lhs, rhs)
        return excess if excess > tol else 0.0

    return _pairwise_check("reciprocal_convex", pts, violation)


def check_jensen(
    g: Callable[[float], float],
    triples: Sequence[tuple] = (),
    point_sets: Sequence[Sequence[float]] = (),
) -> PsiPropertyReport:
    """Check the two convexity inequalities for a declared-convex g.

    ``triples`` are (t, x1, x2) with t in [0, 1] for the two-point form;
    ``point_sets`` are tuples for the N-point mean form.
    """
    worst = None
    worst_mag = 0.0
    for t, x1, x2 in triples:
        lhs = g(t * x1 + (1.0 - t) * x2)
        rhs = t * g(x1) + (1.0 - t) * g(x2)
        excess = lhs - rhs
        if excess > TAU_PROP * max(1.0, abs(lhs), abs(rhs)) and excess > worst_mag:
            worst_mag = excess
            worst = ((t, x1, x2), excess)
    for pts in point_sets:
        arr = [float(p) for p in pts]
        lhs = g(sum(arr) / len(arr))
        rhs = sum(g(p) for p in arr) / len(arr)
        excess = lhs - rhs
        if excess > TAU_PROP * max(1.0, abs(lhs), abs(rhs)) and excess > worst_mag:
            worst_mag = excess
            worst = (tuple(arr), excess)
    spec = f"{len(triples)} triples, {len(point_sets)} point sets"
    return PsiPropertyReport("jensen", holds=worst is None, worst_violation=worst, grid_spec=spec)


def check_odd(psi: PsiFunction, grid: Optional[Sequence[float]] = None) -> PsiPropertyReport:
    """Oddness |psi(-x) + psi(x)| <= tau on the grid, plus psi(0) = 0."""
    pts = np.asarray(default_grid() if grid is None else grid, dtype=float)
    if pts.size == 0:
        raise EmptyGrid("odd: empty grid")
    tau = TAU_EXACT if psi.kind == "power" else TAU_ROOTFIND
    worst = None
    worst_mag = 0.0
    zero = abs(psi.eval(0.0))
    if zero > tau:
        worst, worst_mag = ((0.0,), zero), zero
    for x in pts:
        mag = abs(psi.eval(-float(x)) + psi.eval(float(x)))
        if mag > tau and mag > worst_mag:
            worst_mag = mag
            worst = ((float(x),), mag)
    return PsiPropertyReport("odd", holds=worst is None, worst_violation=worst,
                             grid_spec=f"{pts.size} points")


def check_increasing(psi: PsiFunction, grid: Optional[Sequence[float]] = None) -> PsiPropertyReport:
    """Strict monotonicity on the sorted grid, mirrored to negative x."""
    pts = np.asarray(default_grid() if grid is None else grid, dtype=float)
    if pts.size == 0:
        raise EmptyGrid("increasing: empty grid")
    xs = np.sort(np.concatenate([-pts, [0.0], pts]))
    vals = np.array([psi.eval(float(x)) for x in xs])
    diffs = np.diff(vals)
    worst = None
    if np.any(diffs <= 0):
        i = int(np.argmin(diffs))
        worst = ((float(xs[i]), float(xs[i + 1])), float(-diffs[i]))
    return PsiPropertyReport("increasing", holds=worst is None, worst_violation=worst,
                             grid_spec=f"{xs.size} points")
