import numpy as np
import pytest

from darboux2l import closed_forms as cf
from darboux2l.darboux import alpha_beta_from_p, darboux_chain, p_vector
from darboux2l.errors import PoleHit
from darboux2l.numerics import TimeGrid
from darboux2l.seeds import constant_seed_solver, tanh_seed_real
from darboux2l.system import Case1, Constant, TanhStep
from darboux2l.verify import check_alpha_beta_ode, check_first_integral

GRID = TimeGrid.uniform(-5, 5, 8001)
C2 = cf.Case2Params(cf.Case1Params(1.0, 0.3, 0.0), 2.0, 0.0)


def test_case1_examples():
    assert np.allclose(cf.case1_alpha_beta(cf.Case1Params(1, 0, 0), 0.0), (0, 1))
    a, b = cf.case1_alpha_beta(cf.Case1Params(2, 1, 0), 0.0)
    assert (a, b) == (0, 2)
    assert cf.case1_potential(cf.Case1Params(2, 1, 0), 0.0) == 3


def test_case1_c0_zero_is_tanh_sech():
    t = np.linspace(-4, 4, 81)
    a, b = cf.case1_alpha_beta(cf.Case1Params(1, 0, 0), t)
    assert np.allclose(a, -np.tanh(2 * t), atol=1e-15)
    assert np.allclose(b, 1 / np.cosh(2 * t), atol=1e-15)


def test_case1_sech_pulse():
    t = np.linspace(-4, 4, 81)
    R0, g0 = 1.3, 0.4
    f1 = cf.case1_potential(cf.Case1Params(R0, 0.0, g0), t)
    assert np.max(np.abs(f1 - 2 * R0 / np.cosh(2 * (R0 * t + g0)))) <= 1e-12


def test_case1_oscillatory_period():
    params = cf.Case1Params(1.0, 2.0, 0.0)
    period = np.pi / np.sqrt(3)
    t = np.linspace(-3, 3, 301)
    assert np.max(np.abs(cf.case1_potential(params, t + period) - cf.case1_potential(params, t))) <= 1e-12


def test_case1_potential_is_two_beta_minus_c0():
    params = cf.Case1Params(-1.5, 0.7, 0.2)
    t = GRID.samples
    _, b = cf.case1_alpha_beta(params, t)
    assert np.max(np.abs(cf.case1_potential(params, t) - (2 * b - 0.7))) < 1e-13


def test_case1_has_no_real_poles():
    for params in (cf.Case1Params(1, 2, 0.3), cf.Case1Params(-2, 1, 0), cf.Case1Params(0.5, -3, 1)):
        assert cf.case1_poles(params, -10, 10).size == 0
        assert np.all(np.isfinite(cf.case1_potential(params, np.linspace(-10, 10, 2001))))


def test_case1_params_validation():
    with pytest.raises(ValueError):
        cf.Case1Params(0, 1)
    with pytest.raises(ValueError):
        cf.Case1Params(1, 1)


@pytest.mark.parametrize("params", [cf.Case1Params(1.2, 0.3, 0.4), cf.Case1Params(-1.2, 0.3, -0.2), cf.Case1Params(0.5, 1.5, 0.7)])
def test_case1_match_round_trip(params):
    t0 = 0.37
    a, b = cf.case1_alpha_beta(params, t0)
    m = cf.case1_match(abs(params.R0), params.c0, t0, a, b)
    t = np.linspace(-3, 3, 61)
    assert np.max(np.abs(cf.case1_potential(m, t) - cf.case1_potential(params, t))) < 1e-12


@pytest.mark.parametrize(
    "base,R1,g1",
    [((1.0, 0.3, 0.0), 2.0, 0.0), ((1.0, 0.3, 0.2), -1.7, 0.5), ((0.5, 1.2, 0.1), 2.0, -0.3), ((1.5, 0.2, 0.0), 0.9, 0.4)],
)
def test_case2_first_integral_and_chain(base, R1, g1):
    params = cf.Case2Params(cf.Case1Params(*base), R1, g1)
    t = np.linspace(-4, 4, 100)
    a1, b1 = cf.case2_alpha_beta(params, t)
    assert np.max(np.abs(a1 * a1 + b1 * b1 - R1 * R1)) <= 1e-9
    solver = constant_seed_solver(base[1], {base[0]: base[2], R1: g1})
    chain = darboux_chain(solver, Constant(base[1]), [base[0], R1], t, 1.0)
    assert np.max(np.abs(a1 - chain.alphas[1])) <= 1e-8
    assert np.max(np.abs(b1 - chain.betas[1])) <= 1e-8
    assert np.max(np.abs(cf.case2_potential(params, t) - chain.potentials[2])) <= 1e-8


def test_case2_ode():
    assert check_alpha_beta_ode(cf.case2_pair(C2), Case1(1.0, 0.3, 0.0), GRID).passed


def test_case2_printed_variants_disagree():
    t = np.linspace(-3, 3, 61)
    a, b = cf.case2_alpha_beta_printed(C2, t)
    assert np.max(np.abs(a * a + b * b - C2.R1**2)) > 1e-2
    assert np.max(np.abs(cf.case2_potential_printed(C2, t) - cf.case2_potential(C2, t))) > 1e-2


def test_case3_first_integral_is_R_over_T():
    params = cf.Case3Params(1.0, 0.2, 1.3, 2.4, 0.8)
    assert check_first_integral(cf.case3_pair(params), GRID).passed
    a, b = cf.case3_alpha_beta(params, GRID.samples)
    assert np.max(np.abs(a * a + b * b - (2.4 / 1.3) ** 2)) < 1e-12


def test_case3_ode_and_potential_identity():
    params = cf.Case3Params(1.0, 0.0, 1.0, 2.0, 1.0)
    f = TanhStep(1.0, 0.0, 1.0)
    assert check_alpha_beta_ode(cf.case3_pair(params), f, GRID).passed
    t = GRID.samples
    _, b = cf.case3_alpha_beta(params, t)
    assert np.max(np.abs(cf.case3_potential(params, t) - (2 * b - f.value(t)))) < 1e-13


def test_case3_matches_p_vector_path():
    params = cf.Case3Params(0.8, -0.3, 1.1, 2.2, 1.7)
    t = np.linspace(-4, 4, 20)
    a, b = cf.case3_alpha_beta(params, t)
    ra, rb = alpha_beta_from_p(p_vector(tanh_seed_real(params.seed(), t)), params.R_eff)
    assert np.max(np.abs(a - ra)) <= 1e-8 and np.max(np.abs(b - rb)) <= 1e-8


def test_case3_printed_beta_off():
    params = cf.Case3Params(1.0, 0.0, 1.0, 2.0, 1.0)
    t = np.linspace(-3, 3, 31)
    a, b = cf.case3_alpha_beta_printed(params, t)
    assert np.max(np.abs(a * a + b * b - 4)) > 1e-2


@pytest.mark.parametrize("r1,T,R,p", [(0.5, 1.3, 1.4, 0.8), (-0.4, 0.7, 1.1, 1.0), (0.9, 1.0, 2.5, 2.2)])
def test_case3_r0_zero_reduces_to_case1(r1, T, R, p):
    params = cf.Case3Params(0.0, r1, T, R, p)
    c0 = r1 / T
    t0 = 0.0
    a0, b0 = cf.case3_alpha_beta(params, t0)
    match = cf.case1_match(params.R_eff, c0, t0, a0, b0)
    t = np.linspace(-4, 4, 161)
    assert np.max(np.abs(cf.case3_potential(params, t) - cf.case1_potential(match, t))) <= 1e-6


def test_case2_pole_guard():
    # choose Q1 so that S^-1 vanishes at t = 0 (dQ1 = 0 there)
    R0, c0, R1 = 1.0, 0.3, 2.0
    _, b0 = cf.case1_alpha_beta(C2.base, 0.0)
    q1 = -((R0**2 + R1**2) * c0 - 2 * b0 * R1**2) / (R1 * (R0**2 + R1**2 - 2 * b0 * c0))
    with pytest.raises(PoleHit):
        cf._case2_terms(C2, np.array([0.0]), np.array([q1]), np.array([0.0]))
