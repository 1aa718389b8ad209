"""Extremal backflow: infimum of the flux over all normalized states, and scans of it.

The infimum at fixed (chi, beta, alpha) is the smallest eigenvalue of the
flux kernel, obtained by truncating to modes 0..N for a schedule of N and
extrapolating quadratically in 1/N.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .eig import EigenPair, min_eigpair
from .extrapolate import ExtrapolationResult, escalated, quad_extrapolate, resolve_schedule
from .kernel import FluxKernel, build_kernel, nonrel_kernel
from .model import RingParams
from .search import grid_then_golden, golden_section

log = logging.getLogger(__name__)

# alpha/pi search window (0, 1.5] at step 0.01; widened for large chi, where
# the optimum sits near alpha/pi ~ 0.23 chi
ALPHA_WINDOW = 1.5
ALPHA_STEP = 0.01
ALPHA_TOL = 1e-4
BETA_CHECK_GRID = tuple(-0.1 * k for k in range(10))


@dataclass(frozen=True)
class ExtremalResult:
    params: RingParams
    p_value: float
    best_vector: np.ndarray
    extrapolation: ExtrapolationResult
    eigenpairs: tuple[tuple[int, EigenPair], ...] = field(repr=False)
    k00: float = 0.0

    @property
    def samples(self):
        return [(n, pair.value) for n, pair in self.eigenpairs]

    @property
    def n_max(self) -> int:
        return self.eigenpairs[-1][0]


@dataclass
class ScanSurface:
    """Grid of infimum values; ``values`` has one axis per entry of ``axes``."""

    axes: dict
    values: np.ndarray
    errors: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def rows(self):
        names = list(self.axes)
        grids = [np.asarray(self.axes[n]) for n in names]
        for idx in np.ndindex(self.values.shape):
            yield tuple(float(g[i]) for g, i in zip(grids, idx)) + (float(self.values[idx]),)


@dataclass(frozen=True)
class GlobalMinimum:
    chi: float
    alpha_over_pi: float
    beta: float
    p_value: float
    curve: ScanSurface
    beta_check: tuple[tuple[float, float, float], ...]


def _pmap(fn, items, workers):
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def truncated_minima(kernel: FluxKernel, sizes, workers=1):
    """min_eigpair of the leading (N+1)x(N+1) block for each N in ``sizes``."""
    k = kernel.entries

    def one(n):
        if n > kernel.n_max:
            raise ValueError(f"truncation {n} exceeds kernel size {kernel.n_max}")
        return n, min_eigpair(k[: n + 1, : n + 1])

    return _pmap(one, sorted(sizes), workers)


def lambda_min(params: RingParams, n: int) -> float:
    """Smallest eigenvalue of the kernel truncated at N = n (no extrapolation)."""
    return min_eigpair(build_kernel(params, n).entries).value


def backflow_infimum(params: RingParams, schedule="accurate", workers=1, escalate=True) -> ExtremalResult:
    sizes = resolve_schedule(schedule)
    kernel = build_kernel(params, sizes[-1])
    pairs = truncated_minima(kernel, sizes, workers)
    fit = quad_extrapolate((n, p.value) for n, p in pairs)
    if fit.poor_fit and escalate:
        bigger = escalated(sizes)
        log.warning("escalating N schedule to %s for %s", bigger, params)
        kernel = build_kernel(params, bigger[-1])
        pairs = truncated_minima(kernel, bigger, workers)
        fit = quad_extrapolate((n, p.value) for n, p in pairs)
    return ExtremalResult(
        params=params,
        p_value=fit.value_at_zero,
        best_vector=pairs[-1][1].vector,
        extrapolation=fit,
        eigenpairs=tuple(pairs),
        k00=float(kernel.entries[0, 0]),
    )


def nonrel_infimum(alpha, beta=0.0, schedule="accurate"):
    """Extrapolated smallest eigenvalue of the nonrelativistic kernel.  Returns (p, fit)."""
    sizes = resolve_schedule(schedule)
    kernel = nonrel_kernel(alpha, beta, sizes[-1])
    fit = quad_extrapolate((n, p.value) for n, p in truncated_minima(kernel, sizes))
    return fit.value_at_zero, fit


def minimize_nonrel_alpha(beta=0.0, schedule="accurate", grid=None, tol=ALPHA_TOL):
    """Nonrelativistic infimum minimized over alpha/pi.  Returns (alpha_over_pi, p)."""
    sizes = resolve_schedule(schedule)
    grid = alpha_grid(0.0) if grid is None else np.asarray(grid, dtype=float)
    coarse = lambda ap: min_eigpair(nonrel_kernel(math.pi * ap, beta, sizes[0]).entries).value
    res = grid_then_golden(lambda ap: nonrel_infimum(math.pi * ap, beta, sizes)[0], grid, tol=tol,
                           grid_values=[coarse(ap) for ap in grid])
    return res.x, res.fun


def alpha_grid(chi, window=ALPHA_WINDOW, step=ALPHA_STEP):
    """Coarse alpha/pi grid: ``step`` spacing on (0, window], stretched for large chi."""
    hi = max(window, 0.5 * chi)
    n = int(round(window / step))
    return np.round(np.arange(1, n + 1) * (hi / n), 12)


def minimize_alpha(chi, beta=0.0, schedule="accurate", grid=None, tol=None, workers=1):
    """Minimize the infimum over alpha at fixed chi, beta.

    The coarse grid is scanned with the truncated lambda_min at
    the smallest N of the schedule; golden-section refinement uses the full
    extrapolated value.  Returns (alpha_over_pi, ExtremalResult).
    """
    sizes = resolve_schedule(schedule)
    grid = alpha_grid(chi) if grid is None else np.asarray(grid, dtype=float)
    if tol is None:
        tol = ALPHA_TOL * max(1.0, grid[-1] / ALPHA_WINDOW)
    cache = {}

    def full(ap):
        if ap not in cache:
            cache[ap] = backflow_infimum(RingParams.from_alpha_over_pi(chi, beta, ap), sizes, escalate=False)
        return cache[ap].p_value

    def coarse(ap):
        return lambda_min(RingParams.from_alpha_over_pi(chi, beta, ap), sizes[0])

    values = np.array(_pmap(coarse, grid, workers))
    res = grid_then_golden(full, grid, tol=tol, grid_values=values)
    best = cache.get(res.x)
    if best is None:
        best = backflow_infimum(RingParams.from_alpha_over_pi(chi, beta, res.x), sizes, escalate=False)
    return res.x, best


def scan_alpha(chi, beta, alpha_over_pi_grid, schedule="accurate", workers=1) -> ScanSurface:
    grid = np.asarray(alpha_over_pi_grid, dtype=float)
    if grid.size == 0:
        raise ValueError("alpha grid is empty")
    sizes = resolve_schedule(schedule)
    errors = {}

    def one(i):
        try:
            params = RingParams.from_alpha_over_pi(chi, beta, grid[i])
            return backflow_infimum(params, sizes).p_value
        except Exception as exc:  # recorded per point, scan continues
            errors[i] = f"{type(exc).__name__}: {exc}"
            return math.nan

    t0 = time.time()
    values = np.array(_pmap(one, range(grid.size), workers))
    return ScanSurface(
        axes={"alpha_over_pi": grid, "beta": np.array([beta]), "chi": np.array([chi])},
        values=values.reshape(-1, 1, 1),
        errors=errors,
        meta={"schedule": list(sizes), "elapsed_s": time.time() - t0},
    )


def p_of_chi(chi, schedule="accurate", beta=0.0):
    """Infimum minimized over alpha at fixed chi.  Returns (alpha_over_pi, p)."""
    ap, res = minimize_alpha(chi, beta, schedule)
    return ap, res.p_value


def global_minimum(chi_grid, schedule="accurate", beta_grid=BETA_CHECK_GRID, chi_tol=1e-3,
                   workers=1, final_schedule=None) -> GlobalMinimum:
    """Minimize over (chi, alpha, beta).

    For each chi the infimum is minimized over alpha at beta = 0, giving the
    p(chi) curve; the best grid cell in chi is refined by golden section, and a
    coarse beta scan at the optimum confirms (or overturns) beta = 0.
    """
    chis = np.asarray(sorted(chi_grid), dtype=float)
    if chis.size == 0:
        raise ValueError("chi grid is empty")
    sizes = resolve_schedule(schedule)
    memo = {}

    def at(chi):
        chi = float(chi)
        if chi not in memo:
            memo[chi] = p_of_chi(chi, sizes)
        return memo[chi]

    curve_vals = _pmap(at, chis, workers)
    for c, v in zip(chis, curve_vals):
        memo.setdefault(float(c), v)
    values = np.array([v[1] for v in curve_vals])
    i = int(np.argmin(values))
    if chis.size > 1:
        lo, hi = chis[max(i - 1, 0)], chis[min(i + 1, chis.size - 1)]
        golden_section(lambda c: at(c)[1], lo, hi, tol=chi_tol)
    chi_star = min(memo, key=lambda c: memo[c][1])
    ap_star, p_star = memo[chi_star]

    checks = [(0.0, ap_star, p_star)]
    for beta in beta_grid:
        if beta == 0.0:
            continue
        ap_b, res_b = minimize_alpha(chi_star, beta, sizes)
        checks.append((float(beta), ap_b, res_b.p_value))
    beta_star, ap_star, p_star = min(checks, key=lambda t: t[2])
    if final_schedule is not None:
        p_star = backflow_infimum(
            RingParams.from_alpha_over_pi(chi_star, beta_star, ap_star), final_schedule
        ).p_value

    curve = ScanSurface(
        axes={"chi": chis},
        values=values,
        meta={
            "schedule": list(sizes),
            "alpha_over_pi": [v[0] for v in curve_vals],
            "refined": sorted((c, a, p) for c, (a, p) in memo.items()),
        },
    )
    return GlobalMinimum(chi_star, ap_star, beta_star, p_star, curve, tuple(checks))


def massless_estimates(chi_values=(20, 500, 1000, 10000, 100000), schedule="accurate", workers=1):
    """Rows (chi, alpha_over_pi, p) for large chi at beta = 0."""

    def one(chi):
        ap, res = minimize_alpha(float(chi), 0.0, schedule)
        return float(chi), ap, res.p_value

    return _pmap(one, chi_values, workers)
