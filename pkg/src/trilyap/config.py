"""Scenario configuration: a TOML grammar, not user code.

A scenario pins both operators, the nonlinearity, the coefficient, the
interval, and every numeric default in one serializable file, e.g.::

    [psi1]
    kind = "power"
    alpha = 2.0

    [psi2]
    kind = "custom"
    expr = "s/(1+abs(s))"

    [f]
    kind = "signed_power"
    p = 2.0

    [q]
    kind = "constant"
    value = 30.0
    domain = [0.0, 1.0]

    [interval]
    a = 0.0
    b = 1.0

On load the structural hypotheses are checked on the default grid
(operators odd and increasing, psi1 sub-multiplicative with convex
reciprocal, psi2 super-multiplicative, f odd with the sign condition);
failures are configuration errors, reported before any solve runs.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .equation import (
    Coefficient,
    Nonlinearity,
    Sandwich,
    constant_coefficient,
    custom_nonlinearity,
    polynomial_coefficient,
    sampled_coefficient,
    signed_power_nonlinearity,
    trig_poly_coefficient,
)
from .errors import ConfigError
from .integrate import SolverConfig
from .psi import (
    PsiFunction,
    check_increasing,
    check_odd,
    check_reciprocal_convex,
    check_submultiplicative,
    check_supermultiplicative,
    custom_psi,
    power_psi,
)


@dataclass(frozen=True)
class PsiSpec:
    kind: str
    alpha: Optional[float] = None
    expr: Optional[str] = None

    def build(self) -> PsiFunction:
        if self.kind == "power":
            if self.alpha is None:
                raise ConfigError("power psi needs `alpha`")
            return power_psi(self.alpha)
        if self.kind == "custom":
            if not self.expr:
                raise ConfigError("custom psi needs `expr`")
            return custom_psi(self.expr)
        raise ConfigError(f"unknown psi kind {self.kind!r}")


@dataclass(frozen=True)
class FSpec:
    kind: str
    p: Optional[float] = None
    expr: Optional[str] = None
    sandwich: Optional[Tuple[float, float, float]] = None  # (c1, c2, p)

    def build(self) -> Nonlinearity:
        if self.kind == "signed_power":
            if self.p is None:
                raise ConfigError("signed_power nonlinearity needs `p`")
            return signed_power_nonlinearity(self.p)
        if self.kind == "custom":
            if not self.expr:
                raise ConfigError("custom nonlinearity needs `expr`")
            sw = Sandwich(*self.sandwich) if self.sandwich else None
            return custom_nonlinearity(self.expr, sw)
        raise ConfigError(f"unknown nonlinearity kind {self.kind!r}")


@dataclass(frozen=True)
class QSpec:
    kind: str
    domain: Tuple[float, float]
    value: Optional[float] = None
    coeffs: Optional[Tuple[float, ...]] = None
    a0: Optional[float] = None
    cos: Optional[Tuple[float, ...]] = None
    sin: Optional[Tuple[float, ...]] = None
    omega: Optional[float] = None
    grid: Optional[Tuple[float, ...]] = None
    values: Optional[Tuple[float, ...]] = None

    def build(self) -> Coefficient:
        if self.kind == "constant":
            if self.value is None:
                raise ConfigError("constant coefficient needs `value`")
            return constant_coefficient(self.value, self.domain)
        if self.kind == "polynomial":
            if not self.coeffs:
                raise ConfigError("polynomial coefficient needs `coeffs`")
            return polynomial_coefficient(self.coeffs, self.domain)
        if self.kind == "trig_poly":
            if self.omega is None:
                raise ConfigError("trig_poly coefficient needs `omega`")
            return trig_poly_coefficient(self.a0 or 0.0, self.cos or (),
                                         self.sin or (), self.omega, self.domain)
        if self.kind == "samples":
            if not self.grid or not self.values:
                raise ConfigError("samples coefficient needs `grid` and `values`")
            return sampled_coefficient(self.grid, self.values, self.domain)
        raise ConfigError(f"unknown coefficient kind {self.kind!r}")


@dataclass(frozen=True)
class Params:
    """Command-specific knobs; every report records the effective values."""

    slope: float = 1.0
    curvature: float = 0.0
    horizon: Optional[float] = None
    scan_n: int = 257
    quad_n: int = 2048
    sigma: float = 2.0
    window: float = 0.0  # 0 selects 10 * (mean consecutive gap)
    bc: str = "bc1"


@dataclass(frozen=True)
class Tolerances:
    rtol: float = 1e-9
    atol: float = 1e-12
    h_min: float = 1e-12

    def solver_config(self) -> SolverConfig:
        return SolverConfig(rtol=self.rtol, atol=self.atol, h_min=self.h_min)


@dataclass(frozen=True)
class SweepSpec:
    kind: str = "random-trig"
    count: int = 8
    a0: Tuple[float, float] = (10.0, 70.0)
    amp: Tuple[float, float] = (40.0, 120.0)
    harmonics: int = 3
    values: Tuple[float, ...] = ()


@dataclass(frozen=True)
class Scenario:
    psi1: PsiSpec
    psi2: PsiSpec
    f: FSpec
    q: QSpec
    interval: Tuple[float, float]
    params: Params = field(default_factory=Params)
    tolerances: Tolerances = field(default_factory=Tolerances)
    sweep: Optional[SweepSpec] = None


def _as_pair(value, label: str) -> Tuple[float, float]:
    try:
        a, b = value
        return float(a), float(b)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{label} must be a pair of numbers, got {value!r}") from exc


def parse_scenario(text: str) -> Scenario:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config does not parse: {exc}") from exc

    def table(name: str, required: bool = True) -> dict:
        t = data.get(name)
        if t is None:
            if required:
                raise ConfigError(f"missing [{name}] table")
            return {}
        if not isinstance(t, dict):
            raise ConfigError(f"[{name}] must be a table")
        return t

    def psi_spec(name: str) -> PsiSpec:
        t = table(name)
        return PsiSpec(kind=t.get("kind", "power"),
                       alpha=float(t["alpha"]) if "alpha" in t else None,
                       expr=t.get("expr"))

    ft = table("f")
    sandwich = None
    if "sandwich" in ft:
        st = ft["sandwich"]
        sandwich = (float(st["c1"]), float(st["c2"]), float(st["p"]))
    fspec = FSpec(kind=ft.get("kind", "signed_power"),
                  p=float(ft["p"]) if "p" in ft else None,
                  expr=ft.get("expr"), sandwich=sandwich)

    qt = table("q")
    qspec = QSpec(
        kind=qt.get("kind", "constant"),
        domain=_as_pair(qt.get("domain", (0.0, 1.0)), "q.domain"),
        value=float(qt["value"]) if "value" in qt else None,
        coeffs=tuple(float(c) for c in qt["coeffs"]) if "coeffs" in qt else None,
        a0=float(qt["a0"]) if "a0" in qt else None,
        cos=tuple(float(c) for c in qt["cos"]) if "cos" in qt else None,
        sin=tuple(float(c) for c in qt["sin"]) if "sin" in qt else None,
        omega=float(qt["omega"]) if "omega" in qt else None,
        grid=tuple(float(c) for c in qt["grid"]) if "grid" in qt else None,
        values=tuple(float(c) for c in qt["values"]) if "values" in qt else None,
    )

    it = table("interval")
    interval = (float(it.get("a", 0.0)), float(it.get("b", 1.0)))

    pt = table("params", required=False)
    params = Params(
        slope=float(pt.get("slope", 1.0)),
        curvature=float(pt.get("curvature", 0.0)),
        horizon=float(pt["horizon"]) if "horizon" in pt else None,
        scan_n=int(pt.get("scan_n", 257)),
        quad_n=int(pt.get("quad_n", 2048)),
        sigma=float(pt.get("sigma", 2.0)),
        window=float(pt.get("window", 0.0)),
        bc=str(pt.get("bc", "bc1")),
    )
    if params.bc not in ("bc1", "bc2"):
        raise ConfigError(f"params.bc must be 'bc1' or 'bc2', got {params.bc!r}")

    tt = table("tolerances", required=False)
    tolerances = Tolerances(rtol=float(tt.get("rtol", 1e-9)),
                            atol=float(tt.get("atol", 1e-12)),
                            h_min=float(tt.get("h_min", 1e-12)))

    sweep = None
    if "sweep" in data:
        st = table("sweep")
        sweep = SweepSpec(
            kind=str(st.get("kind", "random-trig")),
            count=int(st.get("count", 8)),
            a0=_as_pair(st.get("a0", (10.0, 70.0)), "sweep.a0"),
            amp=_as_pair(st.get("amp", (40.0, 120.0)), "sweep.amp"),
            harmonics=int(st.get("harmonics", 3)),
            values=tuple(float(v) for v in st.get("values", ())),
        )
        if sweep.kind not in ("random-trig", "constant-q"):
            raise ConfigError(f"unknown sweep kind {sweep.kind!r}")

    return Scenario(psi1=psi_spec("psi1"), psi2=psi_spec("psi2"), f=fspec,
                    q=qspec, interval=interval, params=params,
                    tolerances=tolerances, sweep=sweep)


def load_scenario(path: str) -> Scenario:
    with open(path, "rb") as fh:
        return parse_scenario(fh.read().decode("utf-8"))


# ---------------------------------------------------------------------------
# Serialization (deterministic writer for the same grammar)
# ---------------------------------------------------------------------------


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)):
        return str(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise ConfigError(f"cannot serialize {v!r}")


def scenario_to_toml(sc: Scenario) -> str:
    lines: List[str] = []

    def emit(table: str, pairs) -> None:
        items = [(k, v) for k, v in pairs if v is not None]
        if not items:
            return
        lines.append(f"[{table}]")
        for k, v in items:
            lines.append(f"{k} = {_toml_value(v)}")
        lines.append("")

    for name, spec in (("psi1", sc.psi1), ("psi2", sc.psi2)):
        emit(name, (("kind", spec.kind), ("alpha", spec.alpha), ("expr", spec.expr)))
    emit("f", (("kind", sc.f.kind), ("p", sc.f.p), ("expr", sc.f.expr)))
    if sc.f.sandwich is not None:
        c1, c2, p = sc.f.sandwich
        emit("f.sandwich", (("c1", c1), ("c2", c2), ("p", p)))
    q = sc.q
    emit("q", (("kind", q.kind), ("value", q.value), ("coeffs", q.coeffs),
               ("a0", q.a0), ("cos", q.cos), ("sin", q.sin), ("omega", q.omega),
               ("grid", q.grid), ("values", q.values), ("domain", list(q.domain))))
    emit("interval", (("a", sc.interval[0]), ("b", sc.interval[1])))
    p = sc.params
    emit("params", (("slope", p.slope), ("curvature", p.curvature),
                    ("horizon", p.horizon), ("scan_n", p.scan_n),
                    ("quad_n", p.quad_n), ("sigma", p.sigma),
                    ("window", p.window), ("bc", p.bc)))
    t = sc.tolerances
    emit("tolerances", (("rtol", t.rtol), ("atol", t.atol), ("h_min", t.h_min)))
    if sc.sweep is not None:
        s = sc.sweep
        emit("sweep", (("kind", s.kind), ("count", s.count), ("a0", list(s.a0)),
                       ("amp", list(s.amp)), ("harmonics", s.harmonics),
                       ("values", list(s.values) if s.values else None)))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Hypothesis gate
# ---------------------------------------------------------------------------


def hypothesis_report(sc: Scenario) -> List[Tuple[str, bool, str]]:
    """Run every structural check; returns (name, passed, detail) rows."""
    rows: List[Tuple[str, bool, str]] = []
    psi1 = sc.psi1.build()
    psi2 = sc.psi2.build()

    for tag, psi in (("psi1", psi1), ("psi2", psi2)):
        for rep in (check_odd(psi), check_increasing(psi)):
            rows.append((f"H1 {tag} {rep.property}", rep.holds, str(rep)))
    sub = check_submultiplicative(psi1)
    rows.append(("H2 psi1 submultiplicative", sub.holds, str(sub)))
    conv = check_reciprocal_convex(psi1)
    rows.append(("H2 1/psi1 convex", conv.holds, str(conv)))
    sup = check_supermultiplicative(psi2)
    rows.append(("H3 psi2 supermultiplicative", sup.holds, str(sup)))

    q = sc.q.build()
    a, b = sc.interval
    covered = q.domain[0] <= a < b <= q.domain[1]
    rows.append(("H4 q continuous on [a,b]", covered,
                 f"domain={q.domain}, interval=({a}, {b})"))
    if sc.params.horizon is not None:
        cov_h = q.domain[0] <= a and sc.params.horizon <= q.domain[1]
        rows.append(("H4 q covers horizon", cov_h,
                     f"domain={q.domain}, horizon={sc.params.horizon}"))

    try:
        sc.f.build()
        rows.append(("H5 f odd with sign condition", True, "construction grid"))
    except ConfigError as exc:
        rows.append(("H5 f odd with sign condition", False, str(exc)))
    return rows


def gate_scenario(sc: Scenario) -> None:
    """Raise ConfigError unless every hypothesis check passes."""
    failures = [name for name, ok, _ in hypothesis_report(sc) if not ok]
    if failures:
        raise ConfigError("hypothesis gate failed: " + "; ".join(failures))
