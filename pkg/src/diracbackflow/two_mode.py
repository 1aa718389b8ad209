"""Closed-form backflow for superpositions of two eigenstates l1 < l2."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernel import sinc
from .model import ParameterError, RingParams, mode_energy, mode_norm
from .search import grid_then_golden

# coarse alpha/pi grid for the two-mode curve: step 0.005 on (0, 1]
ALPHA_OVER_PI_GRID = np.round(np.arange(1, 201) * 0.005, 10)


@dataclass(frozen=True)
class TwoModeCoeffs:
    A: float
    B: float
    C: float
    D: float
    l1: int
    l2: int


def _check_pair(l1, l2):
    if int(l1) != l1 or int(l2) != l2:
        raise ParameterError(f"mode indices must be integers, got {l1!r}, {l2!r}")
    if l1 < 0 or l2 <= l1:
        raise ParameterError(f"need 0 <= l1 < l2, got l1={l1}, l2={l2}")


def _coeffs(chi, beta, alpha, l1, l2):
    e1, e2 = mode_energy(chi, beta, l1), mode_energy(chi, beta, l2)
    a1, a2 = mode_norm(chi, beta, l1), mode_norm(chi, beta, l2)
    s1, s2 = l1 - beta, l2 - beta
    v1, v2 = s1 / (1.0 + e1), s2 / (1.0 + e2)
    four_pi = 4.0 * math.pi
    A = four_pi * (a2 * a2 * v2 + a1 * a1 * v1)
    B = four_pi * (a2 * a2 * v2 - a1 * a1 * v1)
    C = four_pi * a2 * a1 * (v2 + v1)
    D = 2.0 * alpha * (s2 * (s2 + 1.0) - s1 * (s1 + 1.0)) / (e2 + e1)
    return TwoModeCoeffs(A, B, C, D, int(l1), int(l2))


def two_mode_coeffs(params: RingParams, l1: int, l2: int) -> TwoModeCoeffs:
    _check_pair(l1, l2)
    return _coeffs(params.chi, params.beta, params.alpha, l1, l2)


def two_mode_prob(params: RingParams, l1: int, l2: int, phi: float, gamma_phase: float) -> float:
    """Flux for c_l1 = cos(phi/2), c_l2 = exp(i gamma) sin(phi/2)."""
    if not 0.0 <= phi <= math.pi:
        raise ParameterError(f"phi must lie in [0, pi], got {phi}")
    if not 0.0 <= gamma_phase < 2.0 * math.pi:
        raise ParameterError(f"gamma must lie in [0, 2 pi), got {gamma_phase}")
    k = two_mode_coeffs(params, l1, l2)
    return params.alpha / math.pi * (
        k.A - k.B * math.cos(phi) + k.C * sinc(k.D) * math.cos(gamma_phase) * math.sin(phi)
    )


def two_mode_min(params: RingParams, l1: int = 0, l2: int = 1) -> float:
    """Minimum of :func:`two_mode_prob` over both angles."""
    k = two_mode_coeffs(params, l1, l2)
    sd = sinc(k.D)
    return params.alpha / math.pi * (k.A - math.hypot(k.B, k.C * sd))


def two_mode_min_raw(chi, beta, alpha, l1, l2):
    """:func:`two_mode_min` without the fundamental-domain check on beta."""
    _check_pair(l1, l2)
    k = _coeffs(chi, beta, alpha, l1, l2)
    return alpha / math.pi * (k.A - math.hypot(k.B, k.C * sinc(k.D)))


def minimize_two_mode(chi, beta=0.0, l1=0, l2=1, grid=ALPHA_OVER_PI_GRID, tol=1e-7):
    """Minimize the two-mode backflow over alpha.  Returns (alpha/pi, p_min)."""

    def f(ap):
        return two_mode_min(RingParams.from_alpha_over_pi(chi, beta, ap), l1, l2)

    res = grid_then_golden(f, grid, tol=tol)
    return res.x, res.fun


def two_mode_curve(chi, betas, grid=ALPHA_OVER_PI_GRID, l1=0, l2=1):
    """Rows (alpha_over_pi, beta, chi, p_min) for each beta over the alpha grid."""
    rows = []
    for beta in betas:
        for ap in grid:
            p = two_mode_min(RingParams.from_alpha_over_pi(chi, beta, ap), l1, l2)
            rows.append((float(ap), float(beta), float(chi), p))
    return rows
