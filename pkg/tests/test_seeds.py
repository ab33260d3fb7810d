import numpy as np
import pytest

from darboux2l.darboux import p_vector
from darboux2l.errors import PoleAtC
from darboux2l.numerics import TimeGrid, Trajectory, rk_integrate
from darboux2l.seeds import (
    ConstantSeedParams,
    TanhSeedParams,
    constant_frequency,
    constant_seed,
    constant_seed_real,
    constant_seed_solver,
    tanh_amplitude,
    tanh_seed_general,
    tanh_seed_real,
    tanh_seed_solver,
    tanh_variable,
)
from darboux2l.system import Constant, TanhStep, TwoLevelSystem, residual

GRID = TimeGrid.uniform(-5, 5, 2001)


def seed_residual(psi, eps, f, grid=GRID):
    return residual(Trajectory(grid, psi), TwoLevelSystem(eps, f))


def test_constant_seed_example():
    psi = constant_seed(ConstantSeedParams(0.0, 1.0, 0.0, 1.0), 0.0)
    assert np.allclose(psi, [-1, -1], rtol=0, atol=1e-15)


def test_hyperbolic_frequency():
    w = constant_frequency(1.0, -2j)
    assert abs(w - 1j * np.sqrt(3)) < 1e-15
    psi = constant_seed(ConstantSeedParams(1.0, -2j, 1.0, 0.5), GRID.samples)
    assert seed_residual(psi, -2j, Constant(1.0)) <= 1e-9


@pytest.mark.parametrize("c0,eps", [(0.0, 1.0), (1.0, 0.5), (-0.7, 2.0 - 0.3j), (0.3, -1j)])
def test_constant_seed_residual(c0, eps):
    psi = constant_seed(ConstantSeedParams(c0, eps, 0.7 - 0.2j, 1.1j), GRID.samples)
    assert seed_residual(psi, eps, Constant(c0)) <= 1e-9


def test_constant_seed_against_integrator():
    g = TimeGrid.uniform(-3, 3, 121)
    psi = constant_seed(ConstantSeedParams(0.5, 1.2, 1.0, 0.4j), g.samples)
    traj = rk_integrate(TwoLevelSystem(1.2, Constant(0.5)).rhs, psi[0], g)
    assert np.max(np.abs(traj.states - psi)) < 1e-8


def test_constant_seed_linearity():
    t = np.linspace(-2, 2, 7)
    lam = 0.3 - 1.7j
    a = constant_seed(ConstantSeedParams(0.4, 1.3, lam * 0.5, lam * 2j), t)
    b = lam * constant_seed(ConstantSeedParams(0.4, 1.3, 0.5, 2j), t)
    assert np.allclose(a, b, rtol=1e-15, atol=1e-15)


def test_constant_seed_rejects_zero():
    with pytest.raises(ValueError):
        ConstantSeedParams(0.0, 1.0, 0, 0)


@pytest.mark.parametrize("c0,R,gamma", [(0.3, 1.0, 0.0), (0.3, -1.0, 0.4), (2.0, 1.0, 0.2), (-1.5, 0.5, -0.3)])
def test_constant_seed_real_structure(c0, R, gamma):
    psi = constant_seed_real(c0, R, gamma, GRID.samples)
    assert np.max(np.abs(psi[:, 1] + 1j * np.conj(psi[:, 0]))) <= 1e-12 * np.max(np.abs(psi))
    assert seed_residual(psi, -1j * R, Constant(c0)) <= 1e-9


def test_tanh_variable_no_cancellation():
    z, w = tanh_variable(np.array([-40.0, 0.0, 40.0]), 1.0)
    assert z[1] == 0.5 and w[1] == 0.5
    assert w[2] > 0 and z[0] > 0


@pytest.mark.parametrize(
    "r0,r1,T,eps",
    [(1.0, 0.0, 1.0, 1.0), (0.6, 0.3, 1.5, 0.7 - 0.2j), (-0.8, 0.4, 0.8, 2.0), (1.0, 0.2, 1.0, -2.3j)],
)
def test_tanh_seed_general_residual(r0, r1, T, eps):
    g = TimeGrid.uniform(-3 * T, 3 * T, 2001)
    psi = tanh_seed_general(r0, r1, T, eps, 1.0, 0.5 - 0.2j, g.samples)
    assert seed_residual(psi, eps, TanhStep(r0, r1, T), g) <= 1e-7


def test_tanh_seed_general_constant_limit():
    # r0 = 0: the potential is the constant r1/T
    psi = tanh_seed_general(0.0, 0.6, 1.2, 0.9, 1.0, 0.3, GRID.samples)
    assert seed_residual(psi, 0.9, Constant(0.5)) <= 1e-7


def test_tanh_seed_general_small_z_behaviour():
    # F(...; 0) = 1, so psi ~ z^mu as t -> -inf
    r0, r1, T, eps = 1.0, 0.0, 1.0, 1.0 + 0.5j
    t = np.array([-12.0, -11.0])
    psi = tanh_seed_general(r0, r1, T, eps, 1.0, 0.0, t)
    from darboux2l.seeds import tanh_exponents

    mu, _ = tanh_exponents(r0, r1, T, eps)
    z, _ = tanh_variable(t, T)
    ratio = psi[1, 0] / psi[0, 0]
    assert abs(ratio / (z[1] / z[0]) ** mu - 1) < 1e-8


def test_tanh_seed_real_example():
    params = TanhSeedParams(1, 0, 1, 2, 1)
    assert abs(params.mu0 - 0.5 * np.sqrt(3)) < 1e-15
    assert abs(params.nu0 - 0.5 * np.sqrt(3)) < 1e-15
    psi = tanh_seed_real(params, 0.0)
    assert np.all(np.isfinite(psi))
    assert abs(abs(psi[0]) - abs(psi[1])) < 1e-14


@pytest.mark.parametrize("r0,r1,T,R,p", [(1, 0, 1, 2, 1), (0.5, 0.3, 1.3, 1.9, 0.7), (-1, 0.4, 0.9, 2.5, 2.0)])
def test_tanh_seed_real_residual_and_structure(r0, r1, T, R, p):
    params = TanhSeedParams(r0, r1, T, R, p)
    g = TimeGrid.uniform(-3, 3, 2001)
    psi = tanh_seed_real(params, g.samples)
    assert seed_residual(psi, params.epsilon, TanhStep(r0, r1, T), g) <= 1e-7
    # psi2 (1-z)^-nu0 / R == conj(psi1 (1-z)^-nu0 / (-iR))
    _, w = tanh_variable(g.samples, T)
    lhs = psi[:, 1] * w ** (-params.nu0) / R
    rhs = np.conj(psi[:, 0] * w ** (-params.nu0) / (-1j * R))
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * np.max(np.abs(lhs))
    p_vec = p_vector(psi)
    scale = np.max(np.abs(p_vec))
    assert np.max(np.abs(p_vec[:, :2].imag)) <= 1e-10 * scale
    assert np.max(np.abs(p_vec[:, 2].real)) <= 1e-10 * scale


def test_tanh_params_validation():
    with pytest.raises(ValueError):
        TanhSeedParams(1, 0, 0, 2)
    with pytest.raises(ValueError):
        TanhSeedParams(1, 0, 1, 2, p=0)
    with pytest.raises(ValueError):
        TanhSeedParams(1, 0.5, 1, 1.2)


def test_tanh_amplitude_pole():
    # R^2 = (r0 - r1)^2 + 4 mu0^2 with 2 mu0 = 1
    with pytest.raises(PoleAtC):
        tanh_amplitude(TanhSeedParams(0.5, 0.0, 1.0, np.sqrt(1.25)), 0.0)


def test_solvers_dispatch():
    t = np.linspace(-1, 1, 5)
    s = constant_seed_solver(0.3, {2.0: 0.1})
    assert np.allclose(s(-2j, t), constant_seed_real(0.3, 2.0, 0.1, t))
    assert np.allclose(s(1.0, t), constant_seed(ConstantSeedParams(0.3, 1.0, 1.0, 0.5), t))
    ts = tanh_seed_solver(1.0, 0.0, 1.0)
    assert np.allclose(ts(-2j, t), tanh_seed_real(TanhSeedParams(1, 0, 1, 2), t))
    assert np.allclose(ts(0.7, t), tanh_seed_general(1.0, 0.0, 1.0, 0.7, 1.0, 0.5, t))
