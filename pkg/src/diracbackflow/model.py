"""Dimensionless spectrum and single-eigenstate quantities of a Dirac fermion on a ring.

Everything is expressed through three knobs: ``chi`` (reduced Compton wavelength
over ring radius), ``beta`` (magnetic flux in units of the flux quantum) and
``alpha`` (dimensionless length of the observation window).  Energies are in
units of mc^2, fluxes are time-integrated over the window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class ParameterError(ValueError):
    """Raised for parameters outside the admissible domain."""


@dataclass(frozen=True)
class RingParams:
    chi: float
    beta: float = 0.0
    alpha: float = 1.0

    def __post_init__(self):
        for name in ("chi", "beta", "alpha"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.chi <= 0:
            raise ParameterError(f"chi must be > 0, got {self.chi}")
        if self.alpha <= 0:
            raise ParameterError(f"alpha must be > 0, got {self.alpha}")
        if not -1.0 < self.beta <= 0.0:
            raise ParameterError(
                f"beta must lie in the fundamental domain (-1, 0], got {self.beta}; "
                "the spectrum is invariant under beta -> beta - 1 with l -> l - 1, "
                "so any flux can be reduced to this interval"
            )

    @classmethod
    def from_alpha_over_pi(cls, chi, beta, alpha_over_pi):
        return cls(chi=chi, beta=beta, alpha=math.pi * alpha_over_pi)

    @property
    def alpha_over_pi(self) -> float:
        return self.alpha / math.pi

    def with_alpha(self, alpha: float) -> "RingParams":
        return RingParams(self.chi, self.beta, alpha)


def _shifted(l, beta):
    return np.asarray(l, dtype=float) - beta


def _casimir(l, beta):
    # (l - beta)(l - beta + 1)
    s = _shifted(l, beta)
    return s * (s + 1.0)


def epsilon(params: RingParams, l):
    """Energy of mode ``l`` in units of mc^2: sqrt(1 + chi^2 (l-b)(l-b+1))."""
    return mode_energy(params.chi, params.beta, l)


def mode_energy(chi, beta, l):
    """Unchecked form of :func:`epsilon`; accepts any beta and negative l."""
    out = np.sqrt(1.0 + chi * chi * _casimir(l, beta))
    return out if np.ndim(out) else float(out)


def norm_const(params: RingParams, l):
    """Normalization A_l of the positive-energy spinor, including 1/sqrt(2 pi)."""
    return mode_norm(params.chi, params.beta, l)


def mode_norm(chi, beta, l):
    """Unchecked form of :func:`norm_const`."""
    s = _shifted(l, beta)
    eps = mode_energy(chi, beta, l)
    ratio = chi * s / (1.0 + eps)
    out = INV_SQRT_2PI / np.sqrt(1.0 + ratio * ratio)
    return out if np.ndim(out) else float(out)


def eigenstate_flux(params: RingParams, l):
    """Probability that flows through phi = 0 during the window for eigenstate ``l``.

    Equals J_l * T = 8 alpha A_l^2 (l - beta) / (1 + eps_l).
    """
    return mode_flux(params.chi, params.beta, params.alpha, l)


def mode_flux(chi, beta, alpha, l):
    s = _shifted(l, beta)
    eps = mode_energy(chi, beta, l)
    a = mode_norm(chi, beta, l)
    out = 8.0 * alpha * a * a * s / (1.0 + eps)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class ModeTable:
    """Per-mode quantities for l = 0..n_max, computed once and shared read-only."""

    params: RingParams
    n_max: int
    ell: np.ndarray = field(init=False, repr=False)
    eps: np.ndarray = field(init=False, repr=False)
    norm: np.ndarray = field(init=False, repr=False)
    # (l - beta) / (1 + eps_l), the velocity-like factor in every kernel entry
    velocity: np.ndarray = field(init=False, repr=False)
    casimir: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = int(self.n_max)
        if n < 0:
            raise ParameterError(f"n_max must be >= 0, got {self.n_max}")
        object.__setattr__(self, "n_max", n)
        p = self.params
        ell = np.arange(n + 1)
        eps = mode_energy(p.chi, p.beta, ell)
        values = {
            "ell": ell,
            "eps": np.atleast_1d(eps),
            "norm": np.atleast_1d(mode_norm(p.chi, p.beta, ell)),
            "velocity": (ell - p.beta) / (1.0 + np.atleast_1d(eps)),
            "casimir": _casimir(ell, p.beta),
        }
        for name, arr in values.items():
            arr = np.array(arr, dtype=float if name != "ell" else int)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.n_max + 1
