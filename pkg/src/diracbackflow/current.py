"""Probability current through phi = 0 as a function of time for a given superposition."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ModeTable, ParameterError, RingParams

DEFAULT_GRID = np.linspace(-0.6, 0.6, 1201)
ZOOM_GRID = np.linspace(-0.505, -0.495, 1001)
GRID_LIMIT = 0.6


@dataclass(frozen=True)
class CurrentTrace:
    t_over_T: np.ndarray
    j_times_T: np.ndarray
    params: RingParams
    coeffs: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict)

    def rows(self):
        return zip(self.t_over_T.tolist(), self.j_times_T.tolist())


def _check_grid(t):
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ParameterError("time grid must be a nonempty 1-D array")
    if np.any(np.abs(t) > GRID_LIMIT + 1e-12):
        raise ParameterError(f"time grid must lie within [-{GRID_LIMIT}, {GRID_LIMIT}] (units of T)")
    return t


def mode_frequencies(table: ModeTable) -> np.ndarray:
    """Angular frequencies per unit t/T, offset so mode 0 is near zero.

    omega_l = 4 alpha (eps_l - 1) / chi^2 = 4 alpha q_l / (eps_l + 1); the
    common offset drops out of every phase difference.
    """
    return 4.0 * table.params.alpha * table.casimir / (table.eps + 1.0)


def current_at(params: RingParams, coeffs, t_over_T, table: ModeTable | None = None) -> np.ndarray:
    """J(0, t) T for real coefficients c_0..c_N on the given time grid.

    The double sum over (l, l') factorizes into 2 Re(S_a conj(S_b)) with
    S_x(t) = sum_l x_l exp(i omega_l t), a_l = c_l A_l v_l, b_l = c_l A_l,
    v_l = (l - beta)/(1 + eps_l), so the result is real by construction.
    """
    c = np.asarray(coeffs, dtype=float)
    t = np.atleast_1d(np.asarray(t_over_T, dtype=float))
    if table is None or table.n_max != c.size - 1 or table.params != params:
        table = ModeTable(params, c.size - 1)
    b = c * table.norm
    a = b * table.velocity
    omega = mode_frequencies(table)
    out = np.empty(t.size)
    # chunked to bound the (time x mode) phase matrix
    for lo in range(0, t.size, 256):
        phase = np.exp(1j * np.outer(t[lo : lo + 256], omega))
        sa = phase @ a
        sb = phase @ b
        out[lo : lo + 256] = 2.0 * (sa * sb.conj()).real
    return 4.0 * params.alpha * out


def current_double_sum(params: RingParams, coeffs, t_over_T) -> np.ndarray:
    """Direct complex O(N^2) evaluation; used as a cross-check.  Returns complex values."""
    c = np.asarray(coeffs, dtype=float)
    table = ModeTable(params, c.size - 1)
    b = c * table.norm
    v = table.velocity
    omega = mode_frequencies(table)
    weight = b[:, None] * (v[:, None] + v[None, :]) * b[None, :]
    t = np.atleast_1d(np.asarray(t_over_T, dtype=float))
    dw = omega[:, None] - omega[None, :]
    return np.array([4.0 * params.alpha * np.sum(weight * np.exp(1j * dw * ti)) for ti in t])


def current_trace(result, grid=None) -> CurrentTrace:
    """Current of the state stored in an extremal result (its ``best_vector``)."""
    t = _check_grid(DEFAULT_GRID if grid is None else grid)
    c = np.asarray(result.best_vector, dtype=float)
    j = current_at(result.params, c, t)
    return CurrentTrace(t, j, result.params, c, {"n_max": c.size - 1, "coeff_cutoff": 0.0})


def state_trace(params: RingParams, coeffs, grid=None) -> CurrentTrace:
    t = _check_grid(DEFAULT_GRID if grid is None else grid)
    c = np.asarray(coeffs, dtype=float)
    return CurrentTrace(t, current_at(params, c, t), params, c, {"n_max": c.size - 1})


def window_integral(trace: CurrentTrace, min_points=200) -> float:
    """Trapezoidal integral of J T over t/T in [-1/2, 1/2]."""
    t, j = trace.t_over_T, trace.j_times_T
    tol = 1e-9
    inside = (t >= -0.5 - tol) & (t <= 0.5 + tol)
    ts, js = t[inside], j[inside]
    if ts.size < min_points:
        raise ParameterError(f"grid has {ts.size} points in [-1/2, 1/2], need >= {min_points}")
    if abs(ts.min() + 0.5) > tol or abs(ts.max() - 0.5) > tol:
        raise ParameterError("grid must contain both window endpoints t/T = -1/2 and 1/2")
    order = np.argsort(ts)
    return float(np.trapezoid(js[order], ts[order]))
