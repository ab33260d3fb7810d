"""Numeric substrate: time grids, adaptive Runge-Kutta integration of complex
2-vectors, and 4th-order central finite differences.

The integrator is a Dormand-Prince 5(4) embedded pair with PI step control.
Grid samples are filled in from the method's 4th-order continuous extension,
so the sampling grid never constrains the step-size controller.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GridTooCoarse, NonFiniteState, NonFiniteValue, StepUnderflow

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


@dataclass(frozen=True)
class TimeGrid:
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1 or s.size < 2:
            raise ValueError("a TimeGrid needs at least 2 samples")
        if not np.all(np.isfinite(s)):
            raise ValueError("TimeGrid samples must be finite")
        if np.any(np.diff(s) <= 0):
            raise ValueError("TimeGrid samples must be strictly increasing")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def uniform(cls, t_start: float, t_end: float, n: int) -> "TimeGrid":
        return cls(np.linspace(t_start, t_end, int(n)))

    @property
    def t_start(self) -> float:
        return float(self.samples[0])

    @property
    def t_end(self) -> float:
        return float(self.samples[-1])

    def __len__(self) -> int:
        return self.samples.size

    def spacing(self) -> float:
        """Uniform spacing; raises ValueError when the grid is not uniform."""
        d = np.diff(self.samples)
        h = (self.t_end - self.t_start) / (self.samples.size - 1)
        if np.max(np.abs(d - h)) > 1e-9 * max(abs(h), 1.0):
            raise ValueError("operation requires a uniform grid")
        return h


@dataclass(frozen=True)
class Trajectory:
    """States (N, 2) on a grid; ``error_estimate`` is the integrator's
    accumulated local-error bound (0 for closed-form trajectories)."""

    grid: TimeGrid
    states: np.ndarray
    error_estimate: float = 0.0
    n_steps: int = field(default=0, compare=False)

    def __post_init__(self):
        st = np.asarray(self.states, dtype=complex)
        if st.shape != (len(self.grid), 2):
            raise ValueError(
                f"states shape {st.shape} does not match grid of {len(self.grid)} samples"
            )
        object.__setattr__(self, "states", st)

    @classmethod
    def from_function(cls, fn: Callable[[np.ndarray], np.ndarray], grid: TimeGrid) -> "Trajectory":
        """Sample a vectorized spinor function ``fn(t) -> (..., 2)`` on the grid."""
        return cls(grid, np.asarray(fn(grid.samples), dtype=complex).reshape(len(grid), 2))


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
_E = _B5 - _B4

_SAFETY = 0.9
_BETA = 0.04  # PI controller memory term
_EXPO = 0.2 - 0.75 * _BETA
_FAC_MIN, _FAC_MAX = 0.2, 5.0


def _err_norm(err, y, y_new, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    return float(np.sqrt(np.mean((np.abs(err) / scale) ** 2)))


def _initial_step(rhs, t0, y0, f0, span, rtol, atol):
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((np.abs(y0) / scale) ** 2))
    d1 = np.sqrt(np.mean((np.abs(f0) / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    f1 = rhs(t0 + h0, y0 + h0 * f0)
    d2 = np.sqrt(np.mean((np.abs(f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


# 4th-order continuous extension of Dormand-Prince (Hairer's coefficients):
# y(t + s h) = y + h * sum_j k_j * (P[j] . (s, s^2, s^3, s^4))
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


def _dense(s, y, h, k):
    powers = np.cumprod(np.full(4, s))
    return y + h * (k.T @ (_P @ powers))


def rk_integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    grid: TimeGrid,
    rel_tol: float = DEFAULT_RTOL,
    abs_tol: float = DEFAULT_ATOL,
) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` for a complex 2-vector from ``grid.t_start``.

    Returns the state at every grid sample. ``Trajectory.error_estimate`` holds
    the sum of the accepted local error estimates, a crude global error bound.
    """
    if not (rel_tol > 0 and abs_tol > 0):
        raise ValueError("tolerances must be positive")
    y = np.array(y0, dtype=complex).reshape(2)
    if not np.all(np.isfinite(y)):
        raise NonFiniteState("initial state is not finite")

    ts = grid.samples
    t, t_end = grid.t_start, grid.t_end
    span = t_end - t
    h_min = 1e-14 * span
    out = np.empty((ts.size, 2), dtype=complex)
    out[0] = y
    idx = 1

    f = np.asarray(rhs(t, y), dtype=complex)
    h = _initial_step(rhs, t, y, f, span, rel_tol, abs_tol)
    err_prev = 1e-4
    global_err = 0.0
    n_steps = 0
    k = np.empty((7, 2), dtype=complex)

    while idx < ts.size:
        h = min(h, t_end - t)
        if h < h_min:
            raise StepUnderflow(f"step {h:.3e} fell below {h_min:.3e} at t={t:.6g}")
        k[0] = f
        for s in range(1, 7):
            ys = y + h * np.dot(_A[s], k[:s])
            k[s] = rhs(t + _C[s] * h, ys)
        y_new = y + h * np.dot(_B5, k)
        if not np.all(np.isfinite(y_new)):
            raise NonFiniteState(f"state became non-finite near t={t:.6g}")
        err_vec = h * np.dot(_E, k)
        err = _err_norm(err_vec, y, y_new, rel_tol, abs_tol)

        if err <= 1.0:
            t_new = t + h
            f_new = k[6]  # FSAL
            while idx < ts.size and ts[idx] <= t_new + 1e-12 * span:
                s_frac = min(1.0, (ts[idx] - t) / h)
                out[idx] = y_new if s_frac == 1.0 else _dense(s_frac, y, h, k)
                idx += 1
            global_err += float(np.max(np.abs(err_vec)))
            n_steps += 1
            t, y, f = t_new, y_new, f_new
            err = max(err, 1e-10)
            fac = _SAFETY * err ** (-_EXPO) * err_prev**_BETA
            h *= min(_FAC_MAX, max(_FAC_MIN, fac))
            err_prev = err
        else:
            h *= max(_FAC_MIN, _SAFETY * err ** (-_EXPO))

    return Trajectory(grid, out, error_estimate=global_err, n_steps=n_steps)


def finite_difference(f: Callable, t: float, h: float):
    """4th-order central difference estimate of f'(t)."""
    if not h > 0:
        raise ValueError("h must be positive")
    vals = [f(t + 2 * h), f(t + h), f(t - h), f(t - 2 * h)]
    if not all(np.all(np.isfinite(v)) for v in vals):
        raise NonFiniteValue(f"non-finite stencil value near t={t}")
    fp2, fp1, fm1, fm2 = vals
    return (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h)


def grid_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """4th-order central derivative of samples on a uniform grid along axis 0.

    Only interior points ``2 .. N-3`` are returned, so the result has N-4 rows.
    """
    v = np.asarray(values)
    if v.shape[0] < 9:
        raise GridTooCoarse(f"need at least 9 samples, got {v.shape[0]}")
    return (-v[4:] + 8 * v[3:-1] - 8 * v[1:-3] + v[:-4]) / (12 * h)
