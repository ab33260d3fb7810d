"""Darboux transformation engine for the two-level system.

A known solution Psi at the spectral value eps = -iR yields the isotropic
vector p = (Psi_bar, sigma Psi). From p the real pair (alpha, beta) follows
algebraically, and the first-order intertwiner L = d/dt + alpha + i(f - beta) sigma3
maps every solution at spectral value eps onto a solution for the new
potential f1 = 2 beta - f:

    Phi = [alpha - i (eps sigma1 + beta sigma3)] Psi

p-vectors are complex arrays with (p1, p2, p3) on the last axis.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateP, InconsistentPair, RealityViolated
from .system import PAULI, SIGMA1, SIGMA2, SIGMA3, PotentialSpec, potential_eval, spinor

_DEGENERATE = 1e-13


@dataclass(frozen=True)
class DarbouxPair:
    """alpha(t), beta(t) (vectorized, real) and the constant R they share."""

    alpha: Callable
    beta: Callable
    R: float

    def __post_init__(self):
        if self.R == 0:
            raise ValueError("R must be nonzero")

    def __call__(self, t):
        return self.alpha(t), self.beta(t)


def conjugate_spinor(psi):
    psi = np.asarray(psi, dtype=complex)
    return spinor(-np.conj(psi[..., 1]), np.conj(psi[..., 0]))


def inner(a, b):
    """(a, b) = sum_i conj(a_i) b_i over the last axis."""
    return np.sum(np.conj(a) * b, axis=-1)


def p_vector(psi):
    """p = (Psi_bar, sigma Psi) in its bilinear closed form."""
    psi = np.asarray(psi, dtype=complex)
    s1, s2 = psi[..., 0], psi[..., 1]
    sq1, sq2 = s1 * s1, s2 * s2
    return np.stack([sq1 - sq2, 1j * (sq1 + sq2), -2 * s1 * s2], axis=-1)


def p_vector_from_definition(psi):
    """p built literally from the conjugate spinor and the Pauli matrices."""
    psi = np.asarray(psi, dtype=complex)
    bar = conjugate_spinor(psi)
    return np.stack([inner(bar, psi @ s.T) for s in PAULI], axis=-1)


def p_square(p):
    return np.sum(np.asarray(p) ** 2, axis=-1)


def alpha_beta_from_p(p, R: float):
    """(alpha, beta) = (iR p2/p3, iR p1/p3), the pair at eps = -iR.

    The ratios are scale-free, so any overall complex factor on p is harmless.
    """
    p = np.asarray(p, dtype=complex)
    p1, p2, p3 = p[..., 0], p[..., 1], p[..., 2]
    size = np.linalg.norm(p, axis=-1)
    if np.any(np.abs(p3) <= _DEGENERATE * size) or np.any(size == 0):
        raise DegenerateP("p3 vanishes; the transform is singular here")
    alpha = 1j * R * p2 / p3
    beta = 1j * R * p1 / p3
    bad = max(np.max(np.abs(alpha.imag)), np.max(np.abs(beta.imag)))
    if bad > 1e-8 * abs(R):
        raise RealityViolated(f"alpha/beta imaginary parts reach {bad:.2e}")
    return alpha.real, beta.real


def pair_from_solution(solution: Callable, R: float) -> DarbouxPair:
    """DarbouxPair from a vectorized solution ``t -> spinor`` at eps = -iR."""

    def both(t):
        return alpha_beta_from_p(p_vector(solution(t)), R)

    return DarbouxPair(lambda t: both(t)[0], lambda t: both(t)[1], R)


def transform_spinor(alpha, beta, epsilon, psi):
    """Phi = [alpha - i (eps sigma1 + beta sigma3)] Psi."""
    psi = np.asarray(psi, dtype=complex)
    s1, s2 = psi[..., 0], psi[..., 1]
    ie = 1j * epsilon
    return spinor((alpha - 1j * beta) * s1 - ie * s2, -ie * s1 + (alpha + 1j * beta) * s2)


def transform_spinor_p_form(p, epsilon, R: float, psi):
    """Phi = q^-1 sigma2 (sigma . p~) Psi with p~ = (p1, p2, eps q/R), q = sqrt(p1^2 + p2^2).

    Equals -1/R times :func:`transform_spinor` on the branch p3 = -iq.
    """
    p = np.asarray(p, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    p1, p2 = p[..., 0], p[..., 1]
    q = np.sqrt(p1 * p1 + p2 * p2)
    if np.any(np.abs(q) <= _DEGENERATE * np.linalg.norm(p, axis=-1)):
        raise DegenerateP("q vanishes; the p-form transform is singular here")
    p3t = epsilon * q / R
    # sigma2 (p1 sigma1 + p2 sigma2 + p3t sigma3) = p2 - i p1 sigma3 + i p3t sigma1
    s1, s2 = psi[..., 0], psi[..., 1]
    out1 = (p2 - 1j * p1) * s1 + 1j * p3t * s2
    out2 = 1j * p3t * s1 + (p2 + 1j * p1) * s2
    return spinor(out1 / q, out2 / q)


def p_form_potential(p, f):
    """f1 = -2 p1/q - f, the potential as printed next to the p-form transform.

    It lacks the factor R carried by 2 beta - f; kept for the discrepancy check.
    """
    p = np.asarray(p, dtype=complex)
    q = np.sqrt(p[..., 0] ** 2 + p[..., 1] ** 2)
    return (-2 * p[..., 0] / q).real - f


def transformed_potential(beta, f):
    return 2 * np.asarray(beta) - f


def mu_from_alpha_beta(alpha, beta, R: float):
    """Angle mu with alpha = R cos mu, beta = R sin mu, on (-pi, pi].

    Along a solution the unwrapped angle obeys mu' = 2 (R sin mu - f).
    """
    alpha, beta = np.asarray(alpha, float), np.asarray(beta, float)
    dev = np.max(np.abs(alpha**2 + beta**2 - R * R)) / (R * R)
    if dev > 1e-8:
        raise InconsistentPair(f"alpha^2 + beta^2 departs from R^2 by {dev:.2e} (relative)")
    return np.arctan2(beta / R, alpha / R)


def intertwiner_B(alpha, beta, f):
    """B = alpha + i (f - beta) sigma3, shape (..., 2, 2)."""
    alpha, beta, f = np.broadcast_arrays(np.asarray(alpha, float), np.asarray(beta, float), np.asarray(f, float))
    return alpha[..., None, None] * np.eye(2) + 1j * (f - beta)[..., None, None] * SIGMA3


def commutator_relation(B, f, f1):
    """sigma1 B - B sigma1 + sigma2 (f1 - f); vanishes identically for the chosen B."""
    d = np.asarray(f1 - f, dtype=float)[..., None, None]
    return SIGMA1 @ B - B @ SIGMA1 + SIGMA2 * d


def derivative_relation(B, dB, f, df, f1):
    """sigma1 B' + sigma2 B f1 - sigma2 f' - B sigma2 f."""
    f = np.asarray(f, float)[..., None, None]
    df = np.asarray(df, float)[..., None, None]
    f1 = np.asarray(f1, float)[..., None, None]
    return SIGMA1 @ dB + (SIGMA2 @ B) * f1 - SIGMA2 * df - (B @ SIGMA2) * f


@dataclass(frozen=True)
class ChainResult:
    potentials: list
    spinor: np.ndarray
    alphas: list
    betas: list


def darboux_chain(
    seed_solver: Callable,
    f: PotentialSpec,
    R_list: Sequence[float],
    t,
    epsilon: complex,
) -> ChainResult:
    """Apply len(R_list) successive transforms starting from an exact seed.

    Step k builds (alpha_k, beta_k) from the step-k solution at eps = -iR_k,
    sets f_{k+1} = 2 beta_k - f_k and pushes every remaining solution through
    the step-k intertwiner. ``seed_solver(eps, t)`` must be exact for ``f`` and
    real-structured at each eps = -iR_k.
    """
    eps_needed = [-1j * R for R in R_list] + [complex(epsilon)]
    states = [np.asarray(seed_solver(e, t), dtype=complex) for e in eps_needed]
    potentials = [np.asarray(potential_eval(f, t), dtype=float)]
    alphas, betas = [], []
    for k, R in enumerate(R_list):
        try:
            a, b = alpha_beta_from_p(p_vector(states[k]), R)
        except DegenerateP as exc:
            raise DegenerateP(str(exc), step=k) from exc
        alphas.append(a)
        betas.append(b)
        potentials.append(transformed_potential(b, potentials[-1]))
        for j in range(k + 1, len(states)):
            states[j] = transform_spinor(a, b, eps_needed[j], states[j])
    return ChainResult(potentials, states[-1], alphas, betas)
