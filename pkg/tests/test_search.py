import math

import numpy as np
import pytest

from diracbackflow.search import golden_section, grid_then_golden


def test_golden_parabola():
    x, fx = golden_section(lambda x: (x - 0.3) ** 2 + 1, 0.0, 1.0, tol=1e-8)
    assert x == pytest.approx(0.3, abs=1e-8)
    assert fx == pytest.approx(1.0)


def test_grid_then_golden_picks_global_basin():
    f = lambda x: math.cos(3 * x) + 0.1 * x
    res = grid_then_golden(f, np.linspace(0, 6, 61), tol=1e-7)
    assert res.fun <= min(f(x) for x in np.linspace(0, 6, 601))


def test_surrogate_grid_values():
    f = lambda x: (x - 0.42) ** 2
    res = grid_then_golden(f, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6], grid_values=[5, 4, 3, 0, 2, 9], tol=1e-9)
    assert res.x == pytest.approx(0.42, abs=1e-8)


def test_single_point_grid():
    res = grid_then_golden(lambda x: x * x, [2.0])
    assert (res.x, res.fun) == (2.0, 4.0)
