"""The two-level system  i dPsi/dt = (sigma . F) Psi,  F = (eps, 0, f(t)).

Spinors are complex numpy arrays whose last axis holds (psi1, psi2); a single
spinor has shape (2,), a trajectory shape (N, 2). Potentials are small frozen
dataclasses sharing a ``value(t)`` method, dispatched by :func:`potential_eval`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import GridTooCoarse, OutOfRange, SingularPotential
from .numerics import TimeGrid, Trajectory, grid_derivative

Spinor2 = np.ndarray

SIGMA0 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA1, SIGMA2, SIGMA3)

# substituting Psi_zs = U Psi turns the reduced Zakharov-Shabat form into the
# two-level form: U^+ (sigma . F_zs) U = sigma . F
ZS_UNITARY = 0.5 * (SIGMA0 + 1j * (SIGMA1 + SIGMA2 + SIGMA3))


def spinor(psi1, psi2) -> Spinor2:
    return np.stack(np.broadcast_arrays(np.asarray(psi1, complex), np.asarray(psi2, complex)), axis=-1)


def _tanh_tau(t, T):
    if T == 0:
        raise ValueError("T must be nonzero")
    return np.tanh(np.asarray(t, dtype=float) / T)


@dataclass(frozen=True)
class Constant:
    c0: float

    def value(self, t):
        return np.full(np.shape(t), float(self.c0)) if np.ndim(t) else float(self.c0)


@dataclass(frozen=True)
class Sech:
    """f = r0 / cosh(t/T)."""

    r0: float
    T: float

    def value(self, t):
        if self.T == 0:
            raise ValueError("T must be nonzero")
        return self.r0 / np.cosh(np.asarray(t, dtype=float) / self.T)


@dataclass(frozen=True)
class TanhStep:
    """f = (r0/T) tanh(t/T) + r1/T."""

    r0: float
    r1: float
    T: float

    def value(self, t):
        return (self.r0 * _tanh_tau(t, self.T) + self.r1) / self.T


@dataclass(frozen=True)
class Case1:
    R0: float
    c0: float
    gamma0: float = 0.0

    def value(self, t):
        from . import closed_forms

        return closed_forms.case1_potential(closed_forms.Case1Params(self.R0, self.c0, self.gamma0), t)


@dataclass(frozen=True)
class Case2:
    R0: float
    R1: float
    c0: float
    gamma0: float = 0.0
    gamma1: float = 0.0

    def value(self, t):
        from . import closed_forms

        return closed_forms.case2_potential(self.params(), t)

    def params(self):
        from . import closed_forms

        return closed_forms.Case2Params(
            closed_forms.Case1Params(self.R0, self.c0, self.gamma0), self.R1, self.gamma1
        )


@dataclass(frozen=True)
class Case3:
    r0: float
    r1: float
    T: float
    R: float
    p: float = 1.0

    def value(self, t):
        from . import closed_forms

        return closed_forms.case3_potential(
            closed_forms.Case3Params(self.r0, self.r1, self.T, self.R, self.p), t
        )


@dataclass(frozen=True)
class Tabulated:
    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != self.grid.samples.shape:
            raise ValueError("values must match the grid")
        object.__setattr__(self, "values", v)

    def value(self, t):
        ta = np.asarray(t, dtype=float)
        if np.any(ta < self.grid.t_start) or np.any(ta > self.grid.t_end):
            raise OutOfRange(f"t outside [{self.grid.t_start}, {self.grid.t_end}]")
        return np.interp(ta, self.grid.samples, self.values)


@dataclass(frozen=True)
class Custom:
    """Any real vectorized callable f(t); used for mapped Zakharov-Shabat data."""

    func: Callable

    def value(self, t):
        return np.asarray(self.func(t), dtype=float)


PotentialSpec = Union[Constant, Sech, TanhStep, Case1, Case2, Case3, Tabulated, Custom]


@dataclass(frozen=True)
class TwoLevelSystem:
    epsilon: complex
    potential: PotentialSpec

    def __post_init__(self):
        if not np.isfinite(complex(self.epsilon)):
            raise ValueError("epsilon must be finite")

    def rhs(self, t: float, y: np.ndarray) -> np.ndarray:
        """dPsi/dt = -i (sigma . F) Psi, for the integrator."""
        f = float(potential_eval(self.potential, t))
        e = self.epsilon
        return -1j * np.array([f * y[0] + e * y[1], e * y[0] - f * y[1]])


def potential_eval(spec: PotentialSpec, t):
    from .errors import PoleHit, ZeroA

    try:
        v = spec.value(t)
    except (PoleHit, ZeroA) as exc:
        raise SingularPotential(str(exc)) from exc
    if not np.all(np.isfinite(v)):
        raise SingularPotential(f"{type(spec).__name__} is not finite at the requested t")
    return v


def field_vector(f_value, epsilon) -> np.ndarray:
    """F = (eps, 0, f) as a complex 3-vector (last axis)."""
    f = np.asarray(f_value, dtype=complex)
    e = np.broadcast_to(np.asarray(epsilon, dtype=complex), f.shape)
    return np.stack([e, np.zeros_like(f), f], axis=-1)


def hamiltonian_matrix(f_value, epsilon) -> np.ndarray:
    """((f, eps), (eps, -f)); vectorizes over f_value to shape (..., 2, 2)."""
    f = np.asarray(f_value, dtype=complex)
    e = np.broadcast_to(np.asarray(epsilon, dtype=complex), f.shape)
    return np.stack([np.stack([f, e], -1), np.stack([e, -f], -1)], -2)


def residual_profile(traj: Trajectory, sys: TwoLevelSystem):
    """Pointwise ||i dPsi/dt - (sigma.F) Psi|| / max(1, ||Psi||) at interior samples.

    Returns ``(times, values)`` for sample indices 2 .. N-3.
    """
    n = len(traj.grid)
    if n < 9:
        raise GridTooCoarse(f"residual needs at least 9 samples, got {n}")
    h = traj.grid.spacing()
    psi = traj.states
    dpsi = grid_derivative(psi, h)
    inner = psi[2:-2]
    t_in = traj.grid.samples[2:-2]
    H = hamiltonian_matrix(potential_eval(sys.potential, t_in), sys.epsilon)
    r = 1j * dpsi - np.einsum("nij,nj->ni", H, inner)
    norm = np.maximum(1.0, np.linalg.norm(inner, axis=-1))
    return t_in, np.linalg.norm(r, axis=-1) / norm


def residual(traj: Trajectory, sys: TwoLevelSystem) -> float:
    return float(np.max(residual_profile(traj, sys)[1]))


def zs_hamiltonian(f_value, epsilon) -> np.ndarray:
    """sigma . F_ZS with F_ZS = (0, f, eps)."""
    return f_value * SIGMA2 + epsilon * SIGMA3


def zs_to_two_level(zs_spinor, zs_potential_f: Callable, zs_epsilon: complex):
    """Map reduced Zakharov-Shabat data onto the two-level form.

    The caller supplies data already on the real-time side. The constant
    unitary U relates the two pictures through Psi_zs = U Psi, so the returned
    two-level spinor is U^+ Psi_zs and the field (0, f, eps) becomes (eps, 0, f).
    """
    psi = np.asarray(zs_spinor, dtype=complex)
    mapped = psi @ ZS_UNITARY.conj()
    return mapped, TwoLevelSystem(complex(zs_epsilon), Custom(zs_potential_f))
