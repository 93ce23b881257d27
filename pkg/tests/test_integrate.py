"""Initial value integration: exactness, events, kinks, and convergence."""

import numpy as np
import pytest

from trilyap import (
    SolverConfig,
    SystemState,
    Trajectory,
    constant_coefficient,
    integrate_ivp,
    power_psi,
    signed_power_nonlinearity,
    trig_poly_coefficient,
)
from trilyap.errors import StepUnderflow

from _oracles import linear_solution


@pytest.fixture(scope="module")
def pid():
    return power_psi(1.0)


@pytest.fixture(scope="module")
def f1():
    return signed_power_nonlinearity(1.0)


class TestClosedForms:
    def test_linear_growth(self, pid, f1):
        # u''' = 0 with u(0) = 0, u'(0) = 1, u''(0) = 0 gives u = x
        q = constant_coefficient(0.0, (0.0, 3.0))
        traj = integrate_ivp(SystemState(0.0, 0.0, 1.0, 0.0), 3.0, pid, pid, q, f1)
        xs = np.linspace(0, 3, 31)
        np.testing.assert_allclose(traj.u(xs), xs, atol=1e-12)

    def test_parabola_with_events(self, pid, f1):
        # u = x - x**2: one zero event at x = 1, v3 constant at -2
        q = constant_coefficient(0.0, (0.0, 3.0))
        traj = integrate_ivp(SystemState(0.0, 0.0, 1.0, -2.0), 3.0, pid, pid, q, f1)
        assert len(traj.events_v1) == 1
        assert traj.events_v1[0] == pytest.approx(1.0, abs=1e-8)
        assert traj.events_v3 == []
        np.testing.assert_allclose(traj.v3, -2.0, atol=1e-12)

    def test_three_halves_power(self, pid, f1):
        # psi1 = power(2): v2 = x gives u' = sqrt(x), u = (2/3) x**(3/2);
        # the inverse loses Lipschitz continuity right at the start.
        pa, p3 = power_psi(2), power_psi(3)
        q = constant_coefficient(0.0, (0.0, 1.0))
        traj = integrate_ivp(SystemState(0.0, 0.0, 0.0, p3.eval(1.0)), 1.0, pa, p3, q, f1)
        assert traj.u(1.0) == pytest.approx(2.0 / 3.0, abs=1e-6)

    def test_against_characteristic_roots(self, pid, f1):
        lam = 100.0
        q = constant_coefficient(lam, (0.0, 2.0))
        traj = integrate_ivp(SystemState(0.0, 0.0, 1.0, -1.0), 2.0, pid, pid, q, f1)
        u_exact = linear_solution(lam, 0.0, 0.0, 1.0, -1.0)
        xs = np.linspace(0, 2, 201)
        assert np.max(np.abs(traj.u(xs) - u_exact(xs))) < 1e-7


class TestEvents:
    def test_event_completeness_against_scan(self, pid, f1):
        # every sign change of the closed form appears exactly once
        lam = 200.0
        q = constant_coefficient(lam, (0.0, 4.0))
        traj = integrate_ivp(SystemState(0.0, 0.0, 1.0, 0.0), 4.0, pid, pid, q, f1)
        u_exact = linear_solution(lam, 0.0, 0.0, 1.0, 0.0)
        from _oracles import function_zeros
        oracle = [z for z in function_zeros(u_exact, 1e-6, 4.0)]
        assert len(traj.events_v1) == len(oracle)
        for got, want in zip(traj.events_v1, oracle):
            assert got == pytest.approx(want, abs=1e-7)

    def test_v3_events_located(self, pid, f1):
        # v3 = u'' for identity operators; events must sit on the zeros of
        # the closed-form second derivative
        lam = 100.0
        q = constant_coefficient(lam, (0.0, 2.0))
        traj = integrate_ivp(SystemState(0.0, 0.0, 1.0, 1.0), 2.0, pid, pid, q, f1)
        ddu = linear_solution(lam, 0.0, 0.0, 1.0, 1.0, deriv=2)
        from _oracles import function_zeros
        oracle = function_zeros(ddu, 1e-9, 2.0)
        assert len(traj.events_v3) == len(oracle)
        for got, want in zip(traj.events_v3, oracle):
            assert got == pytest.approx(want, abs=1e-6)


class TestNodesAndInterpolation:
    def test_nodes_strictly_increasing(self, pid, f1):
        q = constant_coefficient(30.0, (0.0, 1.0))
        traj = integrate_ivp(SystemState(0.0, 0.0, 1.0, 0.0), 1.0, pid, pid, q, f1)
        assert np.all(np.diff(traj.xs) > 0)

    def test_interpolation_exact_at_nodes(self, pid, f1):
        q = constant_coefficient(30.0, (0.0, 1.0))
        traj = integrate_ivp(SystemState(0.0, 0.0, 1.0, 0.0), 1.0, pid, pid, q, f1)
        np.testing.assert_array_equal(traj.u(traj.xs), traj.v1)

    def test_constructor_rejects_unsorted(self):
        with pytest.raises(ValueError):
            Trajectory([0.0, 0.0, 1.0], [0, 0, 0], [0, 0, 0], [0, 0, 0],
                       [0, 0, 0], [0, 0, 0], [0, 0, 0], [], [], {})


class TestReductionConsistency:
    def test_third_derivative_matches_rhs(self, pid, f1):
        # finite-difference u''' of the dense output vs -q(x) u(x)
        q = trig_poly_coefficient(10.0, [20.0], [15.0], 2 * np.pi, (0.0, 1.0))
        traj = integrate_ivp(SystemState(0.0, 0.0, 1.0, 0.0), 1.0, pid, pid, q, f1)
        h = 1e-2
        xs = np.linspace(0.1, 0.9, 17)
        fd3 = (traj.u(xs + 2 * h) - 2 * traj.u(xs + h)
               + 2 * traj.u(xs - h) - traj.u(xs - 2 * h)) / (2 * h**3)
        target = -np.asarray(q.eval(xs)) * traj.u(xs)
        scale = np.max(np.abs(target)) + 1.0
        assert np.max(np.abs(fd3 - target)) < 5.0 * h * scale


class TestToleranceMonotonicity:
    @pytest.mark.parametrize("lam,x_end", [(50.0, 2.0), (400.0, 3.0)])
    def test_halving_tol_never_increases_error(self, pid, f1, lam, x_end):
        q = constant_coefficient(lam, (0.0, x_end))
        u_exact = linear_solution(lam, 0.0, 0.0, 1.0, 0.0)
        xs = np.linspace(0, x_end, 41)
        prev = None
        for k in range(14):
            rtol = 1e-4 * 2.0**-k
            traj = integrate_ivp(SystemState(0.0, 0.0, 1.0, 0.0), x_end, pid, pid,
                                 q, f1, SolverConfig(rtol=rtol, atol=rtol * 1e-3))
            err = float(np.max(np.abs(traj.u(xs) - u_exact(xs))))
            if prev is not None:
                assert err <= prev, f"error rose at rtol={rtol}: {prev} -> {err}"
            prev = err


class TestFailureModes:
    def test_blowup_raises_underflow(self, pid):
        f3 = signed_power_nonlinearity(3)
        q = constant_coefficient(27.0, (0.0, 1.0))
        with pytest.raises(StepUnderflow):
            integrate_ivp(SystemState(0.0, 0.0, 1.0, 2.0**20), 1.0, pid, pid, q, f3,
                          SolverConfig(max_steps=20_000))

    def test_needs_forward_interval(self, pid, f1):
        q = constant_coefficient(0.0, (0.0, 1.0))
        with pytest.raises(ValueError):
            integrate_ivp(SystemState(1.0, 0.0, 1.0, 0.0), 1.0, pid, pid, q, f1)
