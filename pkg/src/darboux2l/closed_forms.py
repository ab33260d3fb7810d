"""Explicit new solvable families generated by one or two Darboux steps.

case 1  one step on the constant potential c0
case 2  a second step on top of case 1
case 3  one step on the tanh-step potential

Each family exposes its (alpha, beta) pair and potential as vectorized functions
of t. For the second-step and tanh-step families a widely quoted form of the
pair is wrong; the ``*_printed`` variants keep that form so
:mod:`darboux2l.verify` can report how far it sits from the iterated transform.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .darboux import DarbouxPair
from .errors import PoleHit, ZeroA
from .seeds import TanhSeedParams, tanh_amplitude

_POLE = 1e-13


@dataclass(frozen=True)
class Case1Params:
    R0: float
    c0: float
    gamma0: float = 0.0

    def __post_init__(self):
        if self.R0 == 0:
            raise ValueError("R0 must be nonzero")
        if abs(self.R0**2 - self.c0**2) < 1e-12:
            raise ValueError("R0^2 = c0^2 gives omega0 = 0")

    @property
    def omega0(self) -> float:
        return float(np.sqrt(abs(self.R0**2 - self.c0**2)))

    @property
    def hyperbolic(self) -> bool:
        return self.R0**2 > self.c0**2


@dataclass(frozen=True)
class Case2Params:
    base: Case1Params
    R1: float
    gamma1: float = 0.0

    def __post_init__(self):
        if self.R1 == 0:
            raise ValueError("R1 must be nonzero")
        if abs(self.R1**2 - self.base.c0**2) < 1e-12:
            raise ValueError("R1^2 = c0^2 gives omega1 = 0")

    @property
    def omega1(self) -> float:
        return float(np.sqrt(abs(self.R1**2 - self.base.c0**2)))


@dataclass(frozen=True)
class Case3Params:
    r0: float
    r1: float
    T: float
    R: float
    p: float = 1.0

    def seed(self) -> TanhSeedParams:
        return TanhSeedParams(self.r0, self.r1, self.T, self.R, self.p)

    @property
    def R_eff(self) -> float:
        """First-integral radius R/T of the pair (the seed sits at eps = -iR/T)."""
        return self.R / self.T


def _profile(R, c0, gamma, t):
    """(P, P') with P = cosh or cos of 2(omega t + gamma), without amplitude."""
    w = float(np.sqrt(abs(R * R - c0 * c0)))
    phase = 2 * (w * np.asarray(t, dtype=float) + gamma)
    if R * R > c0 * c0:
        return np.cosh(phase), 2 * w * np.sinh(phase)
    return np.cos(phase), -2 * w * np.sin(phase)


def case1_Q(params: Case1Params, t):
    """Q0 = R0 cosh(phi0) (or R0 cos(phi0)) and its analytic derivative."""
    P, dP = _profile(params.R0, params.c0, params.gamma0, t)
    return params.R0 * P, params.R0 * dP


def case1_alpha_beta(params: Case1Params, t):
    Q, dQ = case1_Q(params, t)
    c0, R0 = params.c0, params.R0
    D = Q + c0
    if np.any(np.abs(D) < _POLE):
        raise PoleHit("Q0 + c0 vanishes on the requested times")
    return -dQ / (2 * D), c0 + (R0 * R0 - c0 * c0) / D


def case1_potential(params: Case1Params, t):
    Q, _ = case1_Q(params, t)
    c0, R0 = params.c0, params.R0
    D = Q + c0
    if np.any(np.abs(D) < _POLE):
        raise PoleHit("Q0 + c0 vanishes on the requested times")
    return c0 + 2 * (R0 * R0 - c0 * c0) / D


def case1_pair(params: Case1Params) -> DarbouxPair:
    return DarbouxPair(
        lambda t: case1_alpha_beta(params, t)[0], lambda t: case1_alpha_beta(params, t)[1], params.R0
    )


def case1_poles(params: Case1Params, t_start: float, t_end: float) -> np.ndarray:
    """Times in [t_start, t_end] where Q0 + c0 = 0.

    For real parameters there are none: on the hyperbolic branch |R0 cosh| >=
    |R0| > |c0|, on the oscillatory branch |R0 cos| <= |R0| < |c0|. The
    function exists so callers can assert regularity instead of assuming it.
    """
    if not t_start <= t_end:
        raise ValueError("t_start must not exceed t_end")
    return np.array([])


def case1_match(R: float, c0: float, t0: float, alpha0: float, beta0: float) -> Case1Params:
    """The case-1 member (sign of R0 and phase gamma0) through (alpha0, beta0) at t0.

    |R0| = |R|; on the hyperbolic branch the sign of R0 separates the cosh-type
    (beta > c0) and sinh-type seeds, on the oscillatory branch it is absorbed in
    the phase.
    """
    R = abs(R)
    Q = (R * R - c0 * c0) / (beta0 - c0) - c0
    R0 = float(np.copysign(R, Q)) if R * R > c0 * c0 else R
    params = Case1Params(R0, c0, 0.0)
    w = params.omega0
    # alpha0 = -Q'/(2(Q + c0)) fixes the sign of the phase
    dQ_sign = -np.sign(alpha0 * (Q + c0))
    if params.hyperbolic:
        phi = float(np.arccosh(max(Q / R0, 1.0)))
        if np.sign(R0 * np.sinh(phi)) != dQ_sign:
            phi = -phi
    else:
        phi = float(np.arccos(np.clip(Q / R0, -1.0, 1.0)))
        if np.sign(-R0 * np.sin(phi)) != dQ_sign:
            phi = -phi
    return Case1Params(R0, c0, phi / 2 - w * t0)


def _case2_terms(params: Case2Params, t, Q1, dQ1):
    b = params.base
    R0, c0, R1 = b.R0, b.c0, params.R1
    a0, b0 = case1_alpha_beta(b, t)
    S_inv = (
        R1 * (R0**2 + R1**2 - 2 * b0 * c0) * Q1
        + a0 * R1 * dQ1
        + (R0**2 + R1**2) * c0
        - 2 * b0 * R1**2
    )
    if np.any(np.abs(S_inv) < _POLE):
        raise PoleHit("S^-1 vanishes on the requested times")
    S = 1 / S_inv
    a1 = R1 * S * (
        2 * a0 * (c0 * b0 - R1**2) * Q1
        + (2 * b0**2 - R0**2 - R1**2) * dQ1 / 2
        + 2 * R1 * a0 * (b0 - c0)
    )
    b1 = -R1 * S * (
        (c0 * (2 * b0**2 - R0**2 + R1**2) - 2 * b0 * R1**2) * Q1
        - a0 * b0 * dQ1
        + R1 * (R1**2 - R0**2 + 2 * b0 * (b0 - c0))
    )
    return a1, b1, b0


def case2_alpha_beta(params: Case2Params, t):
    """Second-step pair, with Q1 the bare cosh/cos profile of phase 2(omega1 t + gamma1)."""
    Q1, dQ1 = _profile(params.R1, params.base.c0, params.gamma1, t)
    a1, b1, _ = _case2_terms(params, t, Q1, dQ1)
    return a1, b1


def case2_alpha_beta_printed(params: Case2Params, t):
    """Second-step pair with Q1 = R1 cosh(phi1) as printed (fails alpha1^2 + beta1^2 = R1^2)."""
    P, dP = _profile(params.R1, params.base.c0, params.gamma1, t)
    a1, b1, _ = _case2_terms(params, t, params.R1 * P, params.R1 * dP)
    return a1, b1


def case2_potential(params: Case2Params, t):
    """f2 = 2 beta1 - f1 = 2 (beta1 - beta0) + c0."""
    a1, b1 = case2_alpha_beta(params, t)
    _, b0 = case1_alpha_beta(params.base, t)
    return 2 * (b1 - b0) + params.base.c0


def case2_potential_printed(params: Case2Params, t):
    """2 beta1 + f1 = 2 (beta1 + beta0) - c0, using the printed pair."""
    _, b1 = case2_alpha_beta_printed(params, t)
    _, b0 = case1_alpha_beta(params.base, t)
    return 2 * (b1 + b0) - params.base.c0


def case2_pair(params: Case2Params) -> DarbouxPair:
    return DarbouxPair(
        lambda t: case2_alpha_beta(params, t)[0], lambda t: case2_alpha_beta(params, t)[1], params.R1
    )


def _case3_A(params: Case3Params, t):
    A = tanh_amplitude(params.seed(), t)[0]
    if np.any(np.abs(A) < 1e-13):
        raise ZeroA("A vanishes on the requested times")
    return A


def _tanh_potential(params: Case3Params, t):
    return (params.r0 * np.tanh(np.asarray(t, dtype=float) / params.T) + params.r1) / params.T


def case3_alpha_beta(params: Case3Params, t):
    """alpha = (R/T) Im(A^2)/|A|^2, beta = -(R/T) Re(A^2)/|A|^2; alpha^2 + beta^2 = (R/T)^2."""
    A = _case3_A(params, t)
    A2 = A * A
    m = np.abs(A) ** 2
    return params.R_eff * A2.imag / m, -params.R_eff * A2.real / m


def case3_alpha_beta_printed(params: Case3Params, t):
    """The printed pair: alpha as above, beta = f + R(A*^2 + A^2)/(2T|A|^2)."""
    A = _case3_A(params, t)
    m = np.abs(A) ** 2
    Ac = np.conj(A)
    alpha = (1j * params.R * (Ac**2 - A**2) / (2 * params.T * m)).real
    beta = _tanh_potential(params, t) + (params.R * (Ac**2 + A**2) / (2 * params.T * m)).real
    return alpha, beta


def case3_potential(params: Case3Params, t):
    """f1 = -R(A*^2 + A^2)/(T |A|^2) - (r0/T) tanh(t/T) - r1/T."""
    A = _case3_A(params, t)
    return -2 * params.R_eff * (A * A).real / np.abs(A) ** 2 - _tanh_potential(params, t)


def case3_potential_printed(params: Case3Params, t):
    A = _case3_A(params, t)
    return 2 * params.R_eff * (A * A).real / np.abs(A) ** 2 - _tanh_potential(params, t)


def case3_pair(params: Case3Params) -> DarbouxPair:
    return DarbouxPair(
        lambda t: case3_alpha_beta(params, t)[0], lambda t: case3_alpha_beta(params, t)[1], params.R_eff
    )
