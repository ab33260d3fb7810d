"""Residual and invariant checks producing :class:`CheckReport` values.

Every differential check differences samples on a uniform grid with the
4th-order central stencil, so grids must resolve the fastest oscillation
comfortably (the presets use 8001 points over ten time units).
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import closed_forms as cf
from . import darboux as dx
from . import seeds
from .errors import DegenerateInput, UnwrapFailure
from .numerics import DEFAULT_ATOL, DEFAULT_RTOL, TimeGrid, Trajectory, grid_derivative, rk_integrate
from .system import (
    Case1,
    Case2,
    Case3,
    Constant,
    Custom,
    PotentialSpec,
    TanhStep,
    TwoLevelSystem,
    field_vector,
    potential_eval,
    residual_profile,
)

FIRST_INTEGRAL_TOL = 1e-10
ODE_TOL = 1e-6
MU_TOL = 1e-6
P_EVOLUTION_TOL = 1e-6
ISOTROPY_TOL = 1e-12
EQ13_TOL = 1e-14
EQ14_TOL = 1e-6
FORM_INVARIANCE_TOL = 1e-7
CHAIN_TOL = 1e-8
RK_ORACLE_TOL = 1e-7


@dataclass(frozen=True)
class CheckReport:
    check_name: str
    grid: TimeGrid = field(repr=False)
    max_residual: float
    threshold: float
    passed: bool
    worst_t: float
    notes: tuple = ()

    def to_dict(self) -> dict:
        return {
            "check_name": self.check_name,
            "grid": {"t_start": self.grid.t_start, "t_end": self.grid.t_end, "n_points": len(self.grid)},
            "max_residual": self.max_residual,
            "threshold": self.threshold,
            "passed": self.passed,
            "worst_t": self.worst_t,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class Discrepancy:
    """A closed-form quantity that disagrees with its independent reference."""

    formula: str
    term: str
    max_abs: float
    worst_t: float

    def to_dict(self) -> dict:
        return asdict(self)


def _report(name, grid, times, values, threshold, notes=()):
    values = np.asarray(values, dtype=float)
    if values.size == 0 or not np.all(np.isfinite(values)):
        return CheckReport(name, grid, float("inf"), threshold, False, float("nan"), tuple(notes) + ("non-finite residual",))
    i = int(np.argmax(values))
    worst = float(values[i])
    return CheckReport(name, grid, worst, threshold, worst <= threshold, float(times[i]), tuple(notes))


def check_first_integral(pair: dx.DarbouxPair, grid: TimeGrid, name="first_integral") -> CheckReport:
    t = grid.samples
    a, b = pair(t)
    r = np.abs(a * a + b * b - pair.R**2) / pair.R**2
    return _report(name, grid, t, r, FIRST_INTEGRAL_TOL)


def _interior(grid, diffed, *arrays):
    """Derivatives of ``diffed`` and interior slices of ``diffed + arrays``."""
    h = grid.spacing()
    trimmed = [np.asarray(x)[2:-2] for x in (*diffed, *arrays)]
    return [grid_derivative(x, h) for x in diffed], trimmed, grid.samples[2:-2]


def check_alpha_beta_ode(pair: dx.DarbouxPair, f: PotentialSpec, grid: TimeGrid, name="alpha_beta_ode") -> CheckReport:
    t = grid.samples
    a, b = pair(t)
    fv = potential_eval(f, t)
    (da, db), (a_, b_, f_), t_in = _interior(grid, (a, b), fv)
    r = np.maximum(np.abs(da - 2 * b_ * (f_ - b_)), np.abs(db + 2 * a_ * (f_ - b_)))
    return _report(name, grid, t_in, r, ODE_TOL)


def check_mu_equation(pair: dx.DarbouxPair, f: PotentialSpec, grid: TimeGrid, name="mu_equation") -> CheckReport:
    t = grid.samples
    a, b = pair(t)
    # plain atan2 rather than mu_from_alpha_beta: a pair off its circle must
    # show up as a failed residual, not an exception
    mu = np.unwrap(np.arctan2(b, a))
    jump = np.max(np.abs(np.diff(mu)))
    if jump > np.pi / 2:
        raise UnwrapFailure(f"adjacent mu samples differ by {jump:.3f} rad; refine the grid")
    fv = potential_eval(f, t)
    (dmu,), (mu_, f_), t_in = _interior(grid, (mu,), fv)
    r = np.abs(dmu - 2 * (pair.R * np.sin(mu_) - f_))
    return _report(name, grid, t_in, r, MU_TOL)


def check_p_evolution(traj: Trajectory, sys: TwoLevelSystem, name="p_evolution") -> CheckReport:
    """p' = 2 F x p along a trajectory, relative to |p|; notes carry the isotropy defect."""
    p = dx.p_vector(traj.states)
    grid = traj.grid
    (dp,), (p_,), t_in = _interior(grid, (p,))
    F = field_vector(potential_eval(sys.potential, t_in), sys.epsilon)
    size = np.linalg.norm(p_, axis=-1)
    r = np.linalg.norm(dp - 2 * np.cross(F, p_), axis=-1) / size
    iso = float(np.max(np.abs(dx.p_square(p)) / np.linalg.norm(p, axis=-1) ** 2))
    return _report(name, grid, t_in, r, P_EVOLUTION_TOL, (f"max |p^2|/|p|^2 = {iso:.3e}",))


def check_isotropy(traj: Trajectory, name="isotropy") -> CheckReport:
    p = dx.p_vector(traj.states)
    r = np.abs(dx.p_square(p)) / np.linalg.norm(p, axis=-1) ** 2
    return _report(name, traj.grid, traj.grid.samples, r, ISOTROPY_TOL)


def check_intertwining(
    f: PotentialSpec,
    pair: dx.DarbouxPair,
    grid: TimeGrid,
    f1: PotentialSpec | None = None,
    name="intertwining",
) -> list:
    """Reports for the commutator relation (algebraic) and the derivative relation.

    ``f1`` defaults to 2 beta - f; passing another potential tests whether it
    intertwines with the same B.
    """
    t = grid.samples
    a, b = pair(t)
    fv = potential_eval(f, t)
    f1v = dx.transformed_potential(b, fv) if f1 is None else potential_eval(f1, t)
    B = dx.intertwiner_B(a, b, fv)
    r13 = np.linalg.norm(dx.commutator_relation(B, fv, f1v), axis=(-2, -1))
    rep13 = _report(f"{name}_commutator", grid, t, r13, EQ13_TOL)
    (da, db, df), (a_, b_, f_, f1_), t_in = _interior(grid, (a, b, fv), f1v)
    dB = dx.intertwiner_B(da, db, df)  # B is affine in (alpha, beta, f)
    r14 = np.linalg.norm(dx.derivative_relation(dx.intertwiner_B(a_, b_, f_), dB, f_, df, f1_), axis=(-2, -1))
    rep14 = _report(f"{name}_derivative", grid, t_in, r14, EQ14_TOL)
    return [rep13, rep14]


def verify_pair(
    f1: PotentialSpec,
    spinor_source: Callable,
    epsilons: Sequence[complex],
    grid: TimeGrid,
    name="form_invariance",
) -> list:
    """One residual report per spectral value for solutions claimed to solve f1."""
    out = []
    for eps in epsilons:
        states = np.asarray(spinor_source(eps, grid.samples), dtype=complex)
        if not np.any(states):
            raise DegenerateInput("spinor source returned the zero spinor")
        traj = Trajectory(grid, states)
        t_in, r = residual_profile(traj, TwoLevelSystem(eps, f1))
        out.append(_report(f"{name}[eps={_fmt(eps)}]", grid, t_in, r, FORM_INVARIANCE_TOL))
    return out


def check_rk_oracle(
    f1: PotentialSpec,
    spinor_source: Callable,
    epsilon: complex,
    grid: TimeGrid,
    rel_tol: float = DEFAULT_RTOL,
    abs_tol: float = DEFAULT_ATOL,
    name="rk_oracle",
) -> CheckReport:
    """Integrate from the closed form's first sample and compare along the grid."""
    exact = np.asarray(spinor_source(epsilon, grid.samples), dtype=complex)
    traj = rk_integrate(TwoLevelSystem(epsilon, f1).rhs, exact[0], grid, rel_tol, abs_tol)
    r = np.linalg.norm(traj.states - exact, axis=-1) / np.maximum(1.0, np.linalg.norm(exact, axis=-1))
    return _report(
        f"{name}[eps={_fmt(epsilon)}]", grid, grid.samples, r, RK_ORACLE_TOL,
        (f"integrator error estimate {traj.error_estimate:.2e}",),
    )


def _fmt(eps) -> str:
    eps = complex(eps)
    return f"{eps.real:g}{eps.imag:+g}i"


def _compare(name, grid, times, pairs, threshold):
    """pairs: list of (label, candidate, reference). Returns (report, discrepancies)."""
    worst = np.zeros(np.shape(times))
    discrepancies = []
    for label, cand, ref in pairs:
        d = np.abs(np.asarray(cand) - np.asarray(ref))
        worst = np.maximum(worst, d)
        if not np.all(d <= threshold):
            i = int(np.nanargmax(d))
            discrepancies.append(Discrepancy(name, label, float(d[i]), float(times[i])))
    notes = tuple(f"{x.term}: {x.max_abs:.3e} at t={x.worst_t:.6g}" for x in discrepancies)
    return _report(name, grid, times, worst, threshold, notes), discrepancies


def case2_chain_comparison(params: cf.Case2Params, grid: TimeGrid, printed: bool = False):
    """Closed-form second-step pair and potential against the iterated transform."""
    t = grid.samples
    base = params.base
    solver = seeds.constant_seed_solver(base.c0, {base.R0: base.gamma0, params.R1: params.gamma1})
    chain = dx.darboux_chain(solver, Constant(base.c0), [base.R0, params.R1], t, 1.0)
    if printed:
        a1, b1 = cf.case2_alpha_beta_printed(params, t)
        f2 = cf.case2_potential_printed(params, t)
        name = "case2_printed_vs_chain"
    else:
        a1, b1 = cf.case2_alpha_beta(params, t)
        f2 = cf.case2_potential(params, t)
        name = "case2_vs_chain"
    return _compare(
        name, grid, t,
        [("alpha1", a1, chain.alphas[1]), ("beta1", b1, chain.betas[1]), ("f2", f2, chain.potentials[2])],
        CHAIN_TOL,
    )


def case1_chain_comparison(params: cf.Case1Params, grid: TimeGrid):
    t = grid.samples
    solver = seeds.constant_seed_solver(params.c0, {params.R0: params.gamma0})
    chain = dx.darboux_chain(solver, Constant(params.c0), [params.R0], t, 1.0)
    a0, b0 = cf.case1_alpha_beta(params, t)
    return _compare(
        "case1_vs_chain", grid, t,
        [("alpha0", a0, chain.alphas[0]), ("beta0", b0, chain.betas[0]),
         ("f1", cf.case1_potential(params, t), chain.potentials[1])],
        CHAIN_TOL,
    )


def case3_p_path_comparison(params: cf.Case3Params, grid: TimeGrid, printed: bool = False):
    """Closed-form tanh-step pair against alpha/beta extracted from the seed's p-vector."""
    t = grid.samples
    ref_a, ref_b = dx.alpha_beta_from_p(dx.p_vector(seeds.tanh_seed_real(params.seed(), t)), params.R_eff)
    f = TanhStep(params.r0, params.r1, params.T).value(t)
    if printed:
        a, b = cf.case3_alpha_beta_printed(params, t)
        f1 = cf.case3_potential_printed(params, t)
        name = "case3_printed_vs_p_path"
    else:
        a, b = cf.case3_alpha_beta(params, t)
        f1 = cf.case3_potential(params, t)
        name = "case3_vs_p_path"
    return _compare(
        name, grid, t,
        [("alpha", a, ref_a), ("beta", b, ref_b), ("f1", f1, 2 * ref_b - f)],
        CHAIN_TOL,
    )


def p_form_gap(psi, f_value, R: float):
    """Ratio (2 beta - f + f) / (f1_pform + f): the p-form potential misses a factor R."""
    p = dx.p_vector(psi)
    _, beta = dx.alpha_beta_from_p(p, R)
    true_shift = dx.transformed_potential(beta, f_value) + f_value
    printed_shift = dx.p_form_potential(p, f_value) + f_value
    return true_shift / printed_shift


# presets ------------------------------------------------------------------

def _seed_traj_reports(solution, eps, f, grid, tag):
    traj = Trajectory(grid, solution(grid.samples))
    sys = TwoLevelSystem(eps, f)
    t_in, r = residual_profile(traj, sys)
    return [
        _report(f"{tag}_seed_residual", grid, t_in, r, FORM_INVARIANCE_TOL),
        check_p_evolution(traj, sys, name=f"{tag}_p_evolution"),
        check_isotropy(traj, name=f"{tag}_isotropy"),
    ]


@dataclass(frozen=True)
class _Preset:
    seed_potential: PotentialSpec
    new_potential: PotentialSpec
    pair: dx.DarbouxPair
    transformed: Callable
    structured_seed: Callable
    seed_eps: complex


def _perturbed(pair: dx.DarbouxPair, rel: float) -> dx.DarbouxPair:
    return dx.DarbouxPair(pair.alpha, lambda t: pair.beta(t) * (1 + rel), pair.R)


def build_preset(name: str, **kw) -> _Preset:
    if name == "case1":
        P = cf.Case1Params(kw.get("R0", 1.0), kw.get("c0", 0.3), kw.get("gamma0", 0.0))
        pair = cf.case1_pair(P)
        seed = seeds.constant_seed_solver(P.c0, p0=kw.get("p0", 1.0), q0=kw.get("q0", 0.5))

        def transformed(eps, t):
            a, b = pair(t)
            return dx.transform_spinor(a, b, eps, seed(eps, t))

        return _Preset(
            Constant(P.c0), Case1(P.R0, P.c0, P.gamma0), pair, transformed,
            lambda t: seeds.constant_seed_real(P.c0, P.R0, P.gamma0, t), -1j * P.R0,
        )
    if name == "case2":
        P = cf.Case2Params(
            cf.Case1Params(kw.get("R0", 1.0), kw.get("c0", 0.3), kw.get("gamma0", 0.0)),
            kw.get("R1", 2.0), kw.get("gamma1", 0.0),
        )
        base = P.base
        pair0, pair1 = cf.case1_pair(base), cf.case2_pair(P)
        seed = seeds.constant_seed_solver(base.c0, p0=kw.get("p0", 1.0), q0=kw.get("q0", 0.5))

        def transformed(eps, t):
            a0, b0 = pair0(t)
            a1, b1 = pair1(t)
            return dx.transform_spinor(a1, b1, eps, dx.transform_spinor(a0, b0, eps, seed(eps, t)))

        def step1_solution(t):
            # the case-1 potential's real-structured solution at eps = -iR1
            a0, b0 = pair0(t)
            return dx.transform_spinor(a0, b0, -1j * P.R1, seeds.constant_seed_real(base.c0, P.R1, P.gamma1, t))

        return _Preset(
            Case1(base.R0, base.c0, base.gamma0), Case2(base.R0, P.R1, base.c0, base.gamma0, P.gamma1),
            pair1, transformed, step1_solution, -1j * P.R1,
        )
    if name == "case3":
        P = cf.Case3Params(kw.get("r0", 1.0), kw.get("r1", 0.0), kw.get("T", 1.0), kw.get("R", 2.0), kw.get("p", 1.0))
        pair = cf.case3_pair(P)
        c1, c2 = kw.get("c1", 1.0), kw.get("c2", 0.5)

        def transformed(eps, t):
            a, b = pair(t)
            return dx.transform_spinor(a, b, eps, seeds.tanh_seed_general(P.r0, P.r1, P.T, eps, c1, c2, t))

        return _Preset(
            TanhStep(P.r0, P.r1, P.T), Case3(P.r0, P.r1, P.T, P.R, P.p), pair, transformed,
            lambda t: seeds.tanh_seed_real(P.seed(), t), P.seed().epsilon,
        )
    raise ValueError(f"unknown preset {name!r}")


def run_preset(
    name: str,
    grid: TimeGrid,
    epsilons: Sequence[complex] = (0.5, 1.0, 2.0),
    rel_tol: float = DEFAULT_RTOL,
    abs_tol: float = DEFAULT_ATOL,
    negative_control: bool = False,
    **params,
) -> tuple:
    """Full check set for one family. Returns (reports, discrepancies).

    With ``negative_control`` the pair's beta is scaled by 1 + 1e-3 and the new
    potential shifted by 1e-3, so every differential check must fail.
    """
    pre = build_preset(name, **params)
    pair, f, f1 = pre.pair, pre.seed_potential, pre.new_potential
    transformed = pre.transformed
    if negative_control:
        pair = _perturbed(pair, 1e-3)
        f1 = Custom(lambda t, g=pre.new_potential: potential_eval(g, t) + 1e-3)
    reports = _seed_traj_reports(pre.structured_seed, pre.seed_eps, f, grid, name)
    reports.append(check_first_integral(pair, grid))
    reports.append(check_alpha_beta_ode(pair, f, grid))
    reports.append(check_mu_equation(pair, f, grid))
    reports.extend(check_intertwining(f, pair, grid, f1=f1 if negative_control else None))
    reports.extend(verify_pair(f1, transformed, epsilons, grid))
    reports.append(check_rk_oracle(f1, transformed, epsilons[0], grid, rel_tol, abs_tol))
    discrepancies = []
    if name == "case1":
        rep, d = case1_chain_comparison(cf.Case1Params(params.get("R0", 1.0), params.get("c0", 0.3), params.get("gamma0", 0.0)), grid)
        reports.append(rep)
        discrepancies += d
    elif name == "case2":
        P = pre.new_potential.params()
        rep, d = case2_chain_comparison(P, grid)
        reports.append(rep)
        discrepancies += d
        _, dp = case2_chain_comparison(P, grid, printed=True)
        discrepancies += dp
    else:
        P = cf.Case3Params(params.get("r0", 1.0), params.get("r1", 0.0), params.get("T", 1.0), params.get("R", 2.0), params.get("p", 1.0))
        rep, d = case3_p_path_comparison(P, grid)
        reports.append(rep)
        discrepancies += d
        _, dp = case3_p_path_comparison(P, grid, printed=True)
        discrepancies += dp
    return reports, discrepancies
