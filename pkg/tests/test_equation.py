"""Coefficients, nonlinearities, the first-order reduction, and q-splitting."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from trilyap import (
    SystemState,
    constant_coefficient,
    custom_nonlinearity,
    polynomial_coefficient,
    power_psi,
    q_split,
    sampled_coefficient,
    signed_power_nonlinearity,
    system_derivative,
    trig_poly_coefficient,
)
from trilyap.equation import Sandwich
from trilyap.errors import ConfigError, DomainExceeded


def make_all_coefficients():
    return [
        constant_coefficient(-5.0, (0.0, 2.0)),
        polynomial_coefficient([1.0, -3.0, 0.5], (-1.0, 4.0)),
        trig_poly_coefficient(0.5, [2.0, -1.0], [1.5], 2 * math.pi, (0.0, 1.0)),
        sampled_coefficient(np.linspace(0, 3, 40), np.sin(np.linspace(0, 3, 40)) - 0.2),
    ]


class TestSystemDerivative:
    def test_identity_operators(self):
        q = polynomial_coefficient([0.0, 1.0], (0.0, 2.0))  # q(x) = x
        s = SystemState(1.0, 2.0, 3.0, 4.0)
        pid = power_psi(1)
        d = system_derivative(s, pid, pid, q, signed_power_nonlinearity(1))
        assert d == pytest.approx((3.0, 4.0, -2.0))

    def test_signed_square_root(self):
        s = SystemState(0.5, 0.0, 9.0, 0.0)
        d = system_derivative(s, power_psi(2), power_psi(1),
                              constant_coefficient(0.0, (0.0, 1.0)),
                              signed_power_nonlinearity(1))
        assert d[0] == pytest.approx(3.0)

    def test_odd_cube_root(self):
        s = SystemState(0.5, 0.0, 0.0, -8.0)
        d = system_derivative(s, power_psi(1), power_psi(3),
                              constant_coefficient(0.0, (0.0, 1.0)),
                              signed_power_nonlinearity(1))
        assert d[1] == pytest.approx(-2.0)

    def test_domain_exceeded(self):
        q = constant_coefficient(1.0, (0.0, 1.0))
        with pytest.raises(DomainExceeded):
            system_derivative(SystemState(2.0, 0.0, 0.0, 0.0), power_psi(1),
                              power_psi(1), q, signed_power_nonlinearity(1))


class TestQSplit:
    def test_constant_negative(self):
        qp, qm = q_split(constant_coefficient(-5.0, (0.0, 1.0)))
        assert qp.eval(0.5) == 0.0
        assert qm.eval(0.5) == 5.0

    def test_sine_pointwise(self):
        q = trig_poly_coefficient(0.0, [], [1.0], 1.0, (0.0, 2 * math.pi))
        qp, qm = q_split(q)
        x = 3 * math.pi / 2
        assert qp.eval(x) == 0.0
        assert qm.eval(x) == pytest.approx(1.0)

    def test_sine_positive_mass(self):
        from trilyap import integrate_weighted
        q = trig_poly_coefficient(0.0, [], [1.0], 1.0, (0.0, 2 * math.pi))
        qp, _ = q_split(q)
        val = integrate_weighted(lambda xs: qp.eval(xs), 0.0, 2 * math.pi, n=4096)
        assert float(val) == pytest.approx(2.0, abs=1e-9)

    @pytest.mark.parametrize("q", make_all_coefficients(),
                             ids=lambda c: c.kind)
    def test_split_invariants_random_points(self, q, rng):
        qp, qm = q_split(q)
        xs = rng.uniform(q.domain[0], q.domain[1], size=10_000)
        v, vp, vm = q.eval(xs), qp.eval(xs), qm.eval(xs)
        np.testing.assert_allclose(vp - vm, v, atol=1e-14)
        assert np.all(vp >= 0) and np.all(vm >= 0)
        assert np.max(np.abs(vp * vm)) == 0.0


class TestCoefficients:
    def test_sampled_interpolates(self):
        q = sampled_coefficient([0.0, 1.0, 2.0], [0.0, 2.0, 0.0])
        assert q.eval(0.5) == pytest.approx(1.0)
        assert q.eval(1.5) == pytest.approx(1.0)

    def test_sampled_needs_increasing_grid(self):
        with pytest.raises(ConfigError):
            sampled_coefficient([0.0, 0.0, 1.0], [1.0, 2.0, 3.0])

    def test_degenerate_domain(self):
        with pytest.raises(ConfigError):
            constant_coefficient(1.0, (1.0, 1.0))

    def test_vectorized_matches_scalar(self):
        for q in make_all_coefficients():
            xs = np.linspace(q.domain[0], q.domain[1], 17)
            vec = q.eval(xs)
            scal = np.array([q.eval(float(x)) for x in xs])
            np.testing.assert_allclose(vec, scal, rtol=1e-14)


class TestNonlinearity:
    def test_signed_power_examples(self):
        f = signed_power_nonlinearity(3)
        assert f.eval(2.0) == 8.0
        assert f.eval(-2.0) == -8.0

    def test_sign_condition_enforced(self):
        with pytest.raises(ConfigError):
            custom_nonlinearity("s*s")  # even, violates s*f(s) > 0 for s < 0

    def test_odd_enforced(self):
        with pytest.raises(ConfigError):
            custom_nonlinearity("s + 1")

    def test_sandwich_validated(self):
        # |2s| does not fit inside 1*|s|**1 ... 1.5*|s|**1
        with pytest.raises(ConfigError):
            custom_nonlinearity("2*s", sandwich=Sandwich(1.0, 1.5, 1.0))

    def test_sandwich_accepts_matching_envelope(self):
        f = custom_nonlinearity("2*s", sandwich=Sandwich(1.9, 2.1, 1.0))
        assert f.eval(3.0) == 6.0


@given(st.floats(min_value=-50, max_value=50))
@settings(max_examples=200, deadline=None)
def test_split_identity_property(c):
    q = constant_coefficient(c, (0.0, 1.0))
    qp, qm = q_split(q)
    assert qp.eval(0.3) - qm.eval(0.3) == pytest.approx(c, abs=1e-12)
    assert qp.eval(0.3) * qm.eval(0.3) == 0.0
