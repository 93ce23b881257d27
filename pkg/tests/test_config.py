"""Scenario grammar: parsing, the hypothesis gate, and round-trips."""

import pytest

from trilyap.config import (
    FSpec,
    Params,
    PsiSpec,
    QSpec,
    Scenario,
    SweepSpec,
    Tolerances,
    gate_scenario,
    hypothesis_report,
    parse_scenario,
    scenario_to_toml,
)
from trilyap.errors import ConfigError

BASIC = """
[psi1]
kind = "power"
alpha = 1.0

[psi2]
kind = "power"
alpha = 1.0

[f]
kind = "signed_power"
p = 1.0

[q]
kind = "constant"
value = 30.0
domain = [0.0, 1.0]

[interval]
a = 0.0
b = 1.0
"""


def scenario_variants():
    base = parse_scenario(BASIC)
    custom = Scenario(
        psi1=PsiSpec(kind="custom", expr="s*(1+abs(s))"),
        psi2=PsiSpec(kind="power", alpha=2.0),
        f=FSpec(kind="custom", expr="s", sandwich=(0.9, 1.1, 1.0)),
        q=QSpec(kind="trig_poly", domain=(0.0, 1.0), a0=5.0,
                cos=(30.0, -10.0), sin=(20.0,), omega=6.283185307179586),
        interval=(0.0, 1.0),
        params=Params(slope=2.0, scan_n=129, sigma=3.0, bc="bc2", horizon=4.0),
        tolerances=Tolerances(rtol=1e-8),
    )
    sweep = Scenario(
        psi1=PsiSpec(kind="power", alpha=1.0),
        psi2=PsiSpec(kind="power", alpha=1.0),
        f=FSpec(kind="signed_power", p=1.0),
        q=QSpec(kind="constant", domain=(0.0, 1.0), value=0.0),
        interval=(0.0, 1.0),
        sweep=SweepSpec(kind="constant-q", values=(30.0, 45.0)),
    )
    sampled = Scenario(
        psi1=PsiSpec(kind="power", alpha=1.0),
        psi2=PsiSpec(kind="power", alpha=1.0),
        f=FSpec(kind="signed_power", p=1.0),
        q=QSpec(kind="samples", domain=(0.0, 2.0),
                grid=(0.0, 1.0, 2.0), values=(1.0, -1.0, 1.0)),
        interval=(0.0, 2.0),
    )
    return [base, custom, sweep, sampled]


class TestParsing:
    def test_basic(self):
        sc = parse_scenario(BASIC)
        assert sc.psi1.alpha == 1.0
        assert sc.q.value == 30.0
        assert sc.interval == (0.0, 1.0)
        assert sc.params.scan_n == 257

    def test_inline_tables(self):
        # top-level inline form: psi1 = { kind = "power", alpha = 2.0 }
        text = 'psi1 = { kind = "power", alpha = 2.0 }\n' + BASIC.replace(
            '[psi1]\nkind = "power"\nalpha = 1.0\n', "")
        sc = parse_scenario(text)
        assert sc.psi1.alpha == 2.0

    def test_missing_table(self):
        with pytest.raises(ConfigError):
            parse_scenario("[psi1]\nkind = 'power'\nalpha = 1.0\n")

    def test_bad_toml(self):
        with pytest.raises(ConfigError):
            parse_scenario("this is not toml ][")

    def test_bad_bc(self):
        with pytest.raises(ConfigError):
            parse_scenario(BASIC + '\n[params]\nbc = "bc3"\n')


class TestRoundTrip:
    @pytest.mark.parametrize("idx", range(4))
    def test_serialize_parse_identity(self, idx):
        sc = scenario_variants()[idx]
        assert parse_scenario(scenario_to_toml(sc)) == sc

    def test_deterministic_serialization(self):
        sc = scenario_variants()[1]
        assert scenario_to_toml(sc) == scenario_to_toml(sc)


class TestHypothesisGate:
    def test_power_data_passes(self):
        sc = parse_scenario(BASIC)
        rows = hypothesis_report(sc)
        assert all(ok for _, ok, _ in rows)
        gate_scenario(sc)

    def test_saturating_psi1_fails_h2(self):
        text = BASIC.replace('kind = "power"\nalpha = 1.0\n\n[psi2]',
                             'kind = "custom"\nexpr = "s/(1+abs(s))"\n\n[psi2]', 1)
        sc = parse_scenario(text)
        rows = dict((name, ok) for name, ok, _ in hypothesis_report(sc))
        assert not rows["H2 psi1 submultiplicative"]
        with pytest.raises(ConfigError):
            gate_scenario(sc)

    def test_growing_psi2_fails_h3(self):
        text = BASIC.replace('[psi2]\nkind = "power"\nalpha = 1.0',
                             '[psi2]\nkind = "custom"\nexpr = "s*(1+abs(s))"')
        sc = parse_scenario(text)
        rows = dict((name, ok) for name, ok, _ in hypothesis_report(sc))
        assert not rows["H3 psi2 supermultiplicative"]

    def test_interval_outside_domain_fails_h4(self):
        text = BASIC.replace("b = 1.0", "b = 2.0")
        sc = parse_scenario(text)
        rows = dict((name, ok) for name, ok, _ in hypothesis_report(sc))
        assert not rows["H4 q continuous on [a,b]"]
