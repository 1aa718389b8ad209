"""One-dimensional minimization: coarse grid scan followed by golden-section refinement."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
INV_PHI2 = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class LineSearchResult:
    x: float
    fun: float
    grid: np.ndarray
    grid_values: np.ndarray
    n_evals: int


def golden_section(f, a, b, tol=1e-6):
    """Minimize a unimodal ``f`` on [a, b] until the bracket is narrower than ``tol``.

    Returns (x, f(x)) for the best point evaluated.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    c = a + INV_PHI2 * h
    d = a + INV_PHI * h
    fc, fd = f(c), f(d)
    best = min((fc, c), (fd, d))
    while h > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            h = INV_PHI * h
            c = a + INV_PHI2 * h
            fc = f(c)
            best = min(best, (fc, c))
        else:
            a, c, fc = c, d, fd
            h = INV_PHI * h
            d = a + INV_PHI * h
            fd = f(d)
            best = min(best, (fd, d))
    return best[1], best[0]


def grid_then_golden(f, grid, tol=1e-6, coarse=None, grid_values=None):
    """Scan ``grid`` (with ``coarse`` if given, else ``f``), then refine the best cell with ``f``.

    ``coarse`` lets a cheap surrogate locate the basin before the expensive
    objective is refined; the refinement bracket is the two grid cells around
    the coarse minimum.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a nonempty 1-D sequence")
    surrogate = coarse is not None or grid_values is not None
    if grid_values is None:
        g = coarse or f
        grid_values = np.array([g(x) for x in grid])
    i = int(np.argmin(grid_values))
    if grid.size == 1:
        x = float(grid[0])
        return LineSearchResult(x, float(f(x)), grid, grid_values, 1)

    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]
    calls = [0]

    def counted(x):
        calls[0] += 1
        return f(x)

    x, fx = golden_section(counted, lo, hi, tol=tol)
    n_evals = calls[0]
    if not surrogate and grid_values[i] < fx:
        x, fx = float(grid[i]), float(grid_values[i])
    return LineSearchResult(float(x), float(fx), grid, grid_values, n_evals)
