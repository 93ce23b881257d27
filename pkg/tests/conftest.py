import numpy as np
import pytest

from trilyap import (
    constant_coefficient,
    power_psi,
    signed_power_nonlinearity,
    solve_bc1,
    solve_bc2,
)

# Minimal constant admitting a (BC1) solution of u''' + lam*u = 0 on [0, 1];
# frozen from the determinant oracle (tests/_oracles.py) and re-derived in
# the acceptance suite.
LAMBDA_STAR = 27.45462173856692


@pytest.fixture(scope="session")
def psi_id():
    return power_psi(1.0)


@pytest.fixture(scope="session")
def f_linear():
    return signed_power_nonlinearity(1.0)


@pytest.fixture(scope="session")
def bc1_lam30(psi_id, f_linear):
    """Certified (BC1) solution for q = 30 on [0, 1] (linear balanced data)."""
    q = constant_coefficient(30.0, (0.0, 1.0))
    sol = solve_bc1(0.0, 1.0, psi_id, psi_id, q, f_linear)
    return sol, q


@pytest.fixture(scope="session")
def bc2_lam100(psi_id, f_linear):
    """Certified (BC2) solution for q = 100 shot from 0 (linear data)."""
    q = constant_coefficient(100.0, (0.0, 6.0))
    sol = solve_bc2(0.0, 1.0, psi_id, psi_id, q, f_linear, horizon=6.0)
    return sol, q


@pytest.fixture(scope="session")
def bc1_cubic_lamstar(psi_id):
    """Certified (BC1) solution of the cubic problem at the linear critical
    constant (the curvature sweep must walk past several folded roots)."""
    q = constant_coefficient(LAMBDA_STAR, (0.0, 1.0))
    f3 = signed_power_nonlinearity(3.0)
    sol = solve_bc1(0.0, 1.0, psi_id, psi_id, q, f3)
    return sol, q, f3


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260811)
