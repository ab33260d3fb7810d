"""Closed-form exact solutions for the constant and tanh-step potentials.

All functions vectorize over ``t`` and return spinors with components on the
last axis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import PoleAtC, RealityViolated
from .hypergeom import hyp2f1
from .system import spinor


@dataclass(frozen=True)
class ConstantSeedParams:
    c0: float
    epsilon: complex
    p0: complex
    q0: complex

    def __post_init__(self):
        if self.p0 == 0 and self.q0 == 0:
            raise ValueError("(p0, q0) must not both vanish")


def constant_frequency(c0: float, epsilon: complex) -> complex:
    """omega with omega^2 = c0^2 + eps^2 (principal root)."""
    return np.sqrt(complex(c0 * c0 + epsilon * epsilon))


def constant_seed(params: ConstantSeedParams, t):
    c0, eps = params.c0, complex(params.epsilon)
    w = constant_frequency(c0, eps)
    t = np.asarray(t, dtype=float)
    ep, em = np.exp(1j * w * t), np.exp(-1j * w * t)
    psi1 = 1j * (c0 - w) * params.p0 * ep - eps * params.q0 * em
    psi2 = 1j * eps * params.p0 * ep + (c0 - w) * params.q0 * em
    return spinor(psi1, psi2)


def real_structure_constants(c0: float, R: float, gamma: float = 0.0):
    """(p0, q0) making the eps = -iR constant seed satisfy psi2 = -i psi1*.

    Under this choice the p-vector has p1, p2 real and p3 imaginary, and the
    Darboux pair built from it is exactly the closed-form case-1 pair with
    phase ``gamma``.
    """
    if R == 0:
        raise ValueError("R must be nonzero")
    if abs(R * R - c0 * c0) < 1e-12:
        raise ValueError("|R| = |c0| is the degenerate omega = 0 point")
    if R * R > c0 * c0:
        w0 = np.sqrt(R * R - c0 * c0)
        theta = np.angle((c0 + 1j * w0) / R)
        phase = np.exp(0.5j * (theta + np.pi))
        return np.exp(-gamma) * phase, np.exp(gamma) * phase
    p0 = np.exp(1j * (gamma - np.pi / 2))
    return p0, -np.conj(p0)


def constant_seed_real(c0: float, R: float, gamma: float, t):
    p0, q0 = real_structure_constants(c0, R, gamma)
    return constant_seed(ConstantSeedParams(c0, -1j * R, p0, q0), t)


def tanh_variable(t, T: float):
    """(z, 1 - z) with z = (1 + tanh(t/T))/2, each computed without cancellation."""
    # (1 + tanh x)/2 is the logistic function of 2x
    tau = np.asarray(t, dtype=float) / T
    return expit(2 * tau), expit(-2 * tau)


def tanh_exponents(r0: float, r1: float, T: float, epsilon: complex):
    """(mu, nu) from 4mu^2 + E^2 + (r0-r1)^2 = 0 and 4nu^2 + E^2 + (r0+r1)^2 = 0."""
    E = complex(epsilon) * T
    mu = 0.5 * np.sqrt(-(E * E + (r0 - r1) ** 2))
    nu = 0.5 * np.sqrt(-(E * E + (r0 + r1) ** 2))
    return mu, nu


def tanh_seed_general(r0, r1, T, epsilon, c1, c2, t):
    """General solution for f = (r0/T) tanh(t/T) + r1/T at any spectral value.

    The exponent mu is used consistently in every coefficient of both branches.
    """
    if T == 0:
        raise ValueError("T must be nonzero")
    E = complex(epsilon) * T
    mu, nu = tanh_exponents(r0, r1, T, epsilon)
    z, w = tanh_variable(t, T)
    a, b = mu + nu + 1j * r0, mu + nu - 1j * r0
    ab, bb = -mu + nu + 1j * r0, -mu + nu - 1j * r0
    c, cb = 1 + 2 * mu, 1 - 2 * mu
    front = w**nu
    psi1 = np.zeros(np.shape(z), dtype=complex)
    psi2 = np.zeros(np.shape(z), dtype=complex)
    if c1 != 0:
        zm = z**mu
        psi1 = psi1 + c1 * zm * hyp2f1(a + 1, b, c, z) * E
        psi2 = psi2 + (r0 - r1 + 2j * mu) * c1 * zm * hyp2f1(a, b + 1, c, z)
    if c2 != 0:
        zm = z ** (-mu)
        psi1 = psi1 + c2 * zm * hyp2f1(ab + 1, bb, cb, z) * E
        psi2 = psi2 + (r0 - r1 - 2j * mu) * c2 * zm * hyp2f1(ab, bb + 1, cb, z)
    return spinor(front * psi1, front * psi2)


@dataclass(frozen=True)
class TanhSeedParams:
    r0: float
    r1: float
    T: float
    R: float
    p: float = 1.0

    def __post_init__(self):
        if self.T == 0:
            raise ValueError("T must be nonzero")
        if not self.p > 0:
            raise ValueError("p must be positive")
        if not self.R**2 > max((self.r0 + self.r1) ** 2, (self.r0 - self.r1) ** 2):
            raise ValueError("reality condition R^2 > max(r0 +- r1)^2 violated")

    @property
    def mu0(self) -> float:
        return 0.5 * np.sqrt(self.R**2 - (self.r0 - self.r1) ** 2)

    @property
    def nu0(self) -> float:
        return 0.5 * np.sqrt(self.R**2 - (self.r0 + self.r1) ** 2)

    @property
    def phi0(self) -> float:
        """Constant phase with exp(2i phi0) = (r0 - r1 + 2i mu0)/R."""
        return 0.5 * float(np.angle((self.r0 - self.r1 + 2j * self.mu0) / self.R))

    @property
    def epsilon(self) -> complex:
        """Spectral value -iR/T at which the seed is real-structured."""
        return -1j * self.R / self.T


def tanh_amplitude(params: TanhSeedParams, t):
    """A = (pz)^mu0 e^{-i phi0} F0 + (pz)^{-mu0} e^{i phi0} F1, plus (F0, F1, z, 1-z)."""
    mu0, nu0, phi0 = params.mu0, params.nu0, params.phi0
    if abs(2 * mu0 - round(2 * mu0)) < 1e-9:
        raise PoleAtC(f"2 mu0 = {2 * mu0} is within 1e-9 of an integer")
    r0 = params.r0
    z, w = tanh_variable(t, params.T)
    a0 = mu0 + nu0 + 1j * r0
    a0b = -mu0 + nu0 + 1j * r0
    F0 = hyp2f1(a0 + 1, np.conj(a0), 1 + 2 * mu0, z)
    F1 = hyp2f1(a0b + 1, np.conj(a0b), 1 - 2 * mu0, z)
    pz = params.p * z
    A = pz**mu0 * np.exp(-1j * phi0) * F0 + pz ** (-mu0) * np.exp(1j * phi0) * F1
    return A, F0, F1, z, w


def tanh_seed_real(params: TanhSeedParams, t):
    """Real-structured tanh seed at eps = -iR/T, normalized to sqrt(c1 c2) = 1.

    psi2 is built from the two hypergeometric branches with c1/c2 fixed by p and
    the phase phi0, then checked against the compact form R (1-z)^nu0 A*.
    """
    A, F0, F1, z, w = tanh_amplitude(params, t)
    mu0, nu0, phi0, R = params.mu0, params.nu0, params.phi0, params.R
    dr = params.r0 - params.r1
    c1 = params.p**mu0 * np.exp(-1j * phi0)
    c2 = params.p ** (-mu0) * np.exp(1j * phi0)
    front = w**nu0
    psi1 = -1j * R * front * A
    psi2 = front * (
        (dr + 2j * mu0) * c1 * z**mu0 * np.conj(F0) + (dr - 2j * mu0) * c2 * z ** (-mu0) * np.conj(F1)
    )
    compact = R * front * np.conj(A)
    scale = np.maximum(np.abs(compact), 1e-300)
    dev = np.max(np.abs(psi2 - compact) / scale)
    if dev > 1e-8:
        raise RealityViolated(f"psi2 departs from R (1-z)^nu0 A* by {dev:.2e}")
    return spinor(psi1, psi2)


def constant_seed_solver(c0: float, gammas=None, p0: complex = 1.0, q0: complex = 0.5):
    """Seed callable ``(epsilon, t) -> spinor`` for the constant potential.

    At a purely imaginary ``epsilon = -iR`` it returns the real-structured
    solution whose phase is ``gammas.get(R, 0)``; elsewhere it uses (p0, q0).
    """
    gammas = dict(gammas or {})

    def solve(epsilon, t):
        epsilon = complex(epsilon)
        if epsilon.real == 0 and epsilon.imag != 0:
            R = -epsilon.imag
            return constant_seed_real(c0, R, gammas.get(R, 0.0), t)
        return constant_seed(ConstantSeedParams(c0, epsilon, p0, q0), t)

    return solve


def tanh_seed_solver(r0: float, r1: float, T: float, p: float = 1.0, c1: complex = 1.0, c2: complex = 0.5):
    """Seed callable ``(epsilon, t) -> spinor`` for the tanh-step potential.

    At ``epsilon = -iR/T`` satisfying the reality condition it returns
    :func:`tanh_seed_real`; elsewhere the general two-branch solution.
    """

    def solve(epsilon, t):
        epsilon = complex(epsilon)
        if epsilon.real == 0 and epsilon.imag != 0:
            R = -epsilon.imag * T
            if R * R > max((r0 + r1) ** 2, (r0 - r1) ** 2):
                return tanh_seed_real(TanhSeedParams(r0, r1, T, R, p), t)
        return tanh_seed_general(r0, r1, T, epsilon, c1, c2, t)

    return solve
