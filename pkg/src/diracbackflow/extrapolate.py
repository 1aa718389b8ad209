"""Quadratic extrapolation of truncated minimum eigenvalues to infinite size."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

ACCURATE_SCHEDULE = (500, 700, 1000, 1400, 2000)
FAST_SCHEDULE = (200, 300, 450, 700, 1000)
PROFILES = {"accurate": ACCURATE_SCHEDULE, "fast": FAST_SCHEDULE}

SSR_WARN = 1e-8
MIN_SAMPLES = 4
MIN_SIZE = 50


@dataclass(frozen=True)
class ExtrapolationResult:
    value_at_zero: float
    coeffs: tuple[float, float, float]  # c0 + c1 x + c2 x^2, x = 1/N
    ssr: float
    points: tuple[tuple[int, float], ...]

    @property
    def poor_fit(self) -> bool:
        return self.ssr > SSR_WARN

    def predict(self, n):
        x = 1.0 / np.asarray(n, dtype=float)
        c0, c1, c2 = self.coeffs
        return c0 + c1 * x + c2 * x * x


def quad_extrapolate(samples, min_size=MIN_SIZE) -> ExtrapolationResult:
    """Least-squares fit of lambda_min(N) = c0 + c1/N + c2/N^2; returns c0 as the limit.

    ``samples`` is an iterable of (N, lambda_min) pairs; N may also be a real
    cutoff such as z_max.  The fit is done by SVD-based least squares in the
    rescaled variable x / max(x).
    """
    pts = sorted((n if isinstance(n, float) else int(n), float(v)) for n, v in samples)
    if len(pts) < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {len(pts)}")
    sizes = [n for n, _ in pts]
    if len(set(sizes)) != len(sizes):
        raise ValueError(f"duplicate truncation sizes in {sizes}")
    if min(sizes) < min_size:
        raise ValueError(f"all truncation sizes must be >= {min_size}, got {min(sizes)}")

    x = 1.0 / np.array(sizes, dtype=float)
    y = np.array([v for _, v in pts])
    scale = x.max()
    t = x / scale
    design = np.vander(t, 3, increasing=True)
    c, *_ = np.linalg.lstsq(design, y, rcond=None)
    coeffs = (float(c[0]), float(c[1] / scale), float(c[2] / scale**2))
    ssr = float(np.sum((design @ c - y) ** 2))
    res = ExtrapolationResult(coeffs[0], coeffs, ssr, tuple(pts))
    if res.poor_fit:
        log.warning("quadratic 1/N fit has SSR %.3e > %.0e for sizes %s", ssr, SSR_WARN, sizes)
    return res


def resolve_schedule(schedule) -> tuple[int, ...]:
    if schedule is None:
        return ACCURATE_SCHEDULE
    if isinstance(schedule, str):
        try:
            return PROFILES[schedule]
        except KeyError:
            raise ValueError(f"unknown profile {schedule!r}; choose from {sorted(PROFILES)}") from None
    out = tuple(sorted(int(n) for n in schedule))
    if not out:
        raise ValueError("empty N schedule")
    return out


def escalated(schedule) -> tuple[int, ...]:
    """Schedule with the smallest size dropped and one larger size appended."""
    s = tuple(schedule)
    ratio = s[-1] / s[-2] if len(s) > 1 else 1.4
    return s[1:] + (int(round(s[-1] * ratio)),)
