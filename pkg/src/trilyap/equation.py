"""Coefficient q(x), nonlinearity f(u), and the first-order reduction.

The third-order equation

    (psi2((psi1(u'))'))' + q(x) f(u) = 0

reduces to the system v1 = u, v2 = psi1(u'), v3 = psi2((psi1(u'))') with

    v1' = psi1^{-1}(v2),  v2' = psi2^{-1}(v3),  v3' = -q(x) f(v1).

Since psi2 is odd and increasing, v3 = 0 exactly at the inflection points
(psi1(u'))' = 0, so the (BC1) interior condition reads off the zeros of v3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ConfigError, DomainExceeded
from .expressions import compile_expression
from .psi import PsiFunction, signed_power

Number = Union[float, np.ndarray]


# ---------------------------------------------------------------------------
# Coefficient
# ---------------------------------------------------------------------------


class Coefficient:
    """A continuous weight on a closed interval.

    Serializable kinds: constant, polynomial, trig_poly, samples (linear
    interpolation).  ``positive_part``/``negative_part`` wrap any
    coefficient with a pointwise clip; they are derived objects, not part
    of the config grammar.
    """

    kind: str

    def __init__(self, kind: str, domain: Tuple[float, float], fn: Callable[[Number], Number],
                 params: Optional[dict] = None):
        lo, hi = float(domain[0]), float(domain[1])
        if not lo < hi:
            raise ConfigError(f"coefficient domain must have positive length, got [{lo}, {hi}]")
        self.kind = kind
        self.domain = (lo, hi)
        self._fn = fn
        self.params = dict(params or {})

    def eval(self, x: Number) -> Number:
        return self._fn(x)

    def check_domain(self, x: float) -> None:
        lo, hi = self.domain
        # Tiny overshoot from the final integrator step is tolerated.
        slack = 1e-9 * (hi - lo)
        if x < lo - slack or x > hi + slack:
            raise DomainExceeded(f"x={x} outside coefficient domain [{lo}, {hi}]")

    def positive_part(self) -> "Coefficient":
        parent = self

        def fn(x: Number) -> Number:
            v = parent.eval(x)
            return np.maximum(v, 0.0) if isinstance(v, np.ndarray) else max(v, 0.0)

        return Coefficient(f"positive_part({self.kind})", self.domain, fn)

    def negative_part(self) -> "Coefficient":
        parent = self

        def fn(x: Number) -> Number:
            v = parent.eval(x)
            return np.maximum(-v, 0.0) if isinstance(v, np.ndarray) else max(-v, 0.0)

        return Coefficient(f"negative_part({self.kind})", self.domain, fn)

    def abs(self) -> "Coefficient":
        parent = self

        def fn(x: Number) -> Number:
            v = parent.eval(x)
            return np.abs(v) if isinstance(v, np.ndarray) else abs(v)

        return Coefficient(f"abs({self.kind})", self.domain, fn)

    def __repr__(self) -> str:
        return f"Coefficient({self.kind}, domain={self.domain})"


def constant_coefficient(value: float, domain: Tuple[float, float]) -> Coefficient:
    c = float(value)
    return Coefficient("constant", domain, lambda x: c + 0.0 * x if isinstance(x, np.ndarray) else c,
                       {"value": c})


def polynomial_coefficient(coeffs: Sequence[float], domain: Tuple[float, float]) -> Coefficient:
    """Polynomial with coefficients in increasing degree order."""
    cs = [float(c) for c in coeffs]
    poly = np.polynomial.Polynomial(cs)
    return Coefficient("polynomial", domain, lambda x: poly(x), {"coeffs": cs})


def trig_poly_coefficient(
    a0: float,
    cos_coeffs: Sequence[float],
    sin_coeffs: Sequence[float],
    omega: float,
    domain: Tuple[float, float],
) -> Coefficient:
    """a0 + sum_j cos_j*cos(j*omega*x) + sin_j*sin(j*omega*x)."""
    a0 = float(a0)
    ac = [float(c) for c in cos_coeffs]
    bs = [float(c) for c in sin_coeffs]
    w = float(omega)

    def fn(x: Number) -> Number:
        acc = a0 + (0.0 * x if isinstance(x, np.ndarray) else 0.0)
        for j, c in enumerate(ac, start=1):
            acc = acc + c * (np.cos(j * w * x) if isinstance(x, np.ndarray) else math.cos(j * w * x))
        for j, c in enumerate(bs, start=1):
            acc = acc + c * (np.sin(j * w * x) if isinstance(x, np.ndarray) else math.sin(j * w * x))
        return acc

    return Coefficient("trig_poly", domain, fn,
                       {"a0": a0, "cos": ac, "sin": bs, "omega": w})


def sampled_coefficient(grid: Sequence[float], values: Sequence[float],
                        domain: Optional[Tuple[float, float]] = None) -> Coefficient:
    xs = np.asarray(grid, dtype=float)
    ys = np.asarray(values, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
        raise ConfigError("samples need matching 1-d grid/values with at least 2 points")
    if np.any(np.diff(xs) <= 0):
        raise ConfigError("sample grid must be strictly increasing")
    dom = (float(xs[0]), float(xs[-1])) if domain is None else domain

    def fn(x: Number) -> Number:
        return np.interp(x, xs, ys) if isinstance(x, np.ndarray) else float(np.interp(x, xs, ys))

    return Coefficient("samples", dom, fn, {"grid": xs.tolist(), "values": ys.tolist()})


def q_split(q: Coefficient) -> Tuple[Coefficient, Coefficient]:
    """Pointwise positive/negative parts: q = q_plus - q_minus."""
    return q.positive_part(), q.negative_part()


# ---------------------------------------------------------------------------
# Nonlinearity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sandwich:
    """Power envelope c1*|s|**p <= |f(s)| <= c2*|s|**p."""

    c1: float
    c2: float
    p: float


class Nonlinearity:
    """Odd continuous f with the sign condition s*f(s) > 0 for s != 0.

    Both structural requirements and any declared sandwich are checked on
    a symmetric log grid at construction; violations raise ConfigError.
    """

    def __init__(self, kind: str, fn: Callable[[Number], Number],
                 p: Optional[float] = None, expr: Optional[str] = None,
                 sandwich: Optional[Sandwich] = None,
                 check_grid: Optional[np.ndarray] = None):
        self.kind = kind
        self.p = p
        self.expr = expr
        self.sandwich = sandwich
        self._fn = fn
        self._validate(check_grid)

    def eval(self, s: Number) -> Number:
        return self._fn(s)

    def _validate(self, grid: Optional[np.ndarray]) -> None:
        pts = np.logspace(-3, 3, 41) if grid is None else np.asarray(grid, dtype=float)
        for s in pts:
            s = float(s)
            fs = self._fn(s)
            if s * fs <= 0:
                raise ConfigError(f"sign condition fails: s*f(s) = {s * fs} at s={s}")
            if abs(self._fn(-s) + fs) > 1e-8 * max(1.0, abs(fs)):
                raise ConfigError(f"f is not odd at s={s}")
            if self.sandwich is not None:
                env = abs(s) ** self.sandwich.p
                lo, hi = self.sandwich.c1 * env, self.sandwich.c2 * env
                if not (lo * (1 - 1e-9) <= abs(fs) <= hi * (1 + 1e-9)):
                    raise ConfigError(
                        f"sandwich violated at s={s}: |f|={abs(fs)} outside [{lo}, {hi}]")

    def __repr__(self) -> str:
        tag = self.p if self.kind == "signed_power" else self.expr
        return f"Nonlinearity({self.kind}, {tag})"


def signed_power_nonlinearity(p: float) -> Nonlinearity:
    if p <= 0:
        raise ConfigError(f"signed power nonlinearity needs p > 0, got {p}")
    return Nonlinearity("signed_power", lambda s: signed_power(s, p), p=float(p),
                        sandwich=Sandwich(1.0, 1.0, float(p)))


def custom_nonlinearity(expr: str, sandwich: Optional[Sandwich] = None) -> Nonlinearity:
    return Nonlinearity("custom", compile_expression(expr), expr=expr, sandwich=sandwich)


# ---------------------------------------------------------------------------
# State and right-hand side
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SystemState:
    """One point of the reduced system: (x; v1, v2, v3)."""

    x: float
    v1: float
    v2: float
    v3: float


def system_derivative(
    s: SystemState,
    psi1: PsiFunction,
    psi2: PsiFunction,
    q: Coefficient,
    f: Nonlinearity,
) -> Tuple[float, float, float]:
    """Right-hand side (psi1^{-1}(v2), psi2^{-1}(v3), -q(x) f(v1))."""
    q.check_domain(s.x)
    return (
        psi1.inverse(s.v2),
        psi2.inverse(s.v3),
        -q.eval(s.x) * f.eval(s.v1),
    )
