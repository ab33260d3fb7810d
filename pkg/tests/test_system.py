import numpy as np
import pytest

from darboux2l.errors import OutOfRange, SingularPotential
from darboux2l.numerics import TimeGrid, Trajectory
from darboux2l.seeds import ConstantSeedParams, constant_seed
from darboux2l.system import (
    SIGMA0,
    SIGMA1,
    SIGMA2,
    SIGMA3,
    ZS_UNITARY,
    Case1,
    Constant,
    Custom,
    Sech,
    Tabulated,
    TanhStep,
    TwoLevelSystem,
    field_vector,
    hamiltonian_matrix,
    potential_eval,
    residual,
    zs_hamiltonian,
    zs_to_two_level,
)


def test_potential_examples():
    assert potential_eval(Sech(2, 1), 0.0) == 2.0
    assert potential_eval(TanhStep(1, 0, 1), 0.0) == 0.0
    assert abs(potential_eval(TanhStep(1, 0, 1), 40.0) - 1.0) < 1e-15
    assert potential_eval(Case1(1, 0, 0), 0.0) == 2.0
    assert np.array_equal(potential_eval(Constant(0.5), np.zeros(3)), [0.5] * 3)


def test_tabulated_interpolates_inside_only():
    g = TimeGrid.uniform(0, 2, 3)
    tab = Tabulated(g, [0.0, 2.0, 0.0])
    assert potential_eval(tab, 0.5) == 1.0
    with pytest.raises(OutOfRange):
        potential_eval(tab, 2.5)


def test_singular_potential_wrapped():
    with np.errstate(divide="ignore"), pytest.raises(SingularPotential):
        potential_eval(Custom(lambda t: np.log(np.abs(t))), np.array([-1.0, 0.0, 1.0]))


def test_bad_t_scale():
    with pytest.raises(ValueError):
        potential_eval(Sech(1, 0), 0.0)


def test_hamiltonian_examples():
    assert np.array_equal(hamiltonian_matrix(0, 1), SIGMA1)
    assert np.array_equal(hamiltonian_matrix(1, 0), SIGMA3)
    assert np.array_equal(hamiltonian_matrix(1, -1j), [[1, -1j], [-1j, -1]])
    assert hamiltonian_matrix(np.zeros(4), 1).shape == (4, 2, 2)


def test_hamiltonian_is_sigma_dot_field():
    f, eps = 0.7, 1.3 - 0.4j
    F = field_vector(f, eps)
    H = sum(F[k] * s for k, s in enumerate((SIGMA1, SIGMA2, SIGMA3)))
    assert np.allclose(H, hamiltonian_matrix(f, eps), atol=0)


def test_rhs_matches_hamiltonian():
    sys = TwoLevelSystem(0.8 - 0.1j, TanhStep(1, 0.2, 1.5))
    y = np.array([0.3 + 0.2j, -1.1j])
    H = hamiltonian_matrix(potential_eval(sys.potential, 0.4), sys.epsilon)
    assert np.allclose(sys.rhs(0.4, y), -1j * H @ y, rtol=0, atol=1e-15)


def test_residual_closed_form():
    g = TimeGrid.uniform(-5, 5, 2001)
    psi = constant_seed(ConstantSeedParams(1.0, 1.0, 1.0, 0.3), g.samples)
    assert residual(Trajectory(g, psi), TwoLevelSystem(1.0, Constant(1.0))) <= 1e-8


def test_residual_static_state():
    g = TimeGrid.uniform(0, 1, 21)
    traj = Trajectory(g, np.tile([0.6, 0.8j], (21, 1)))
    assert residual(traj, TwoLevelSystem(0.0, Constant(0.0))) < 1e-15


def test_residual_detects_corruption():
    g = TimeGrid.uniform(-5, 5, 2001)
    psi = constant_seed(ConstantSeedParams(1.0, 1.0, 1.0, 0.3), g.samples)
    psi[1000, 0] *= 1.01
    assert residual(Trajectory(g, psi), TwoLevelSystem(1.0, Constant(1.0))) > 1e-3


def test_zs_unitary_matrix():
    expected = 0.5 * np.array([[1 + 1j, 1 + 1j], [-1 + 1j, 1 - 1j]])
    assert np.allclose(ZS_UNITARY, expected, rtol=0, atol=1e-16)
    assert np.max(np.abs(ZS_UNITARY.conj().T @ ZS_UNITARY - SIGMA0)) <= 1e-15


def test_zs_conjugation_identity():
    f, eps = 1.0, 2.0
    U = ZS_UNITARY
    lhs = U.conj().T @ zs_hamiltonian(f, eps) @ U
    assert np.max(np.abs(lhs - hamiltonian_matrix(f, eps))) <= 1e-14


def test_zs_to_two_level_maps_solutions():
    # a ZS solution built from a two-level one must map back onto it
    g = TimeGrid.uniform(-2, 2, 801)
    psi = constant_seed(ConstantSeedParams(0.4, 1.5, 1.0, 0.2), g.samples)
    zs = psi @ ZS_UNITARY.T
    mapped, sys = zs_to_two_level(zs, lambda t: np.full(np.shape(t), 0.4), 1.5)
    assert np.allclose(mapped, psi, rtol=0, atol=1e-14)
    assert residual(Trajectory(g, mapped), sys) < 1e-8
