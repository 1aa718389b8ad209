"""Flux kernel K[l, l'] whose quadratic form is the probability crossing phi = 0.

For a normalized superposition with real coefficients ``c`` the probability that
flows through the point during the window is ``c @ K @ c``.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .model import ParameterError, RingParams, mode_energy, mode_norm

_SINC_TAYLOR_CUTOFF = 1e-4
_DUMP_MAGIC = b"DBFK"
_DUMP_HEADER = struct.Struct("<4sIqddd")


def sinc(x):
    """Unnormalized sinc, sin(x)/x, with sinc(0) = 1."""
    x = np.abs(np.asarray(x, dtype=float))
    small = x < _SINC_TAYLOR_CUTOFF
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(small, 0.0, np.sin(x) / np.where(small, 1.0, x))
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, out)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class FluxKernel:
    """Dense symmetric kernel for modes l = 0..n_max.

    ``chi`` is None for the nonrelativistic kernel.
    """

    entries: np.ndarray
    alpha: float
    beta: float
    chi: float | None = None

    @property
    def n_max(self) -> int:
        return self.entries.shape[0] - 1

    @property
    def params(self) -> RingParams:
        if self.chi is None:
            raise AttributeError("nonrelativistic kernel has no chi")
        return RingParams(self.chi, self.beta, self.alpha)

    def quadratic_form(self, c) -> float:
        c = np.asarray(c, dtype=float)
        return float(c @ self.entries[: len(c), : len(c)] @ c)

    def block(self, idx) -> np.ndarray:
        idx = np.asarray(idx)
        return self.entries[np.ix_(idx, idx)]

    def dump(self, path) -> None:
        """Write a debugging dump: header (N, chi, beta, alpha) then row-major float64."""
        header = _DUMP_HEADER.pack(
            _DUMP_MAGIC, 1, self.n_max, 0.0 if self.chi is None else self.chi,
            self.beta, self.alpha,
        )
        with open(Path(path), "wb") as fh:
            fh.write(header)
            fh.write(np.ascontiguousarray(self.entries, dtype="<f8").tobytes())

    @classmethod
    def load(cls, path) -> "FluxKernel":
        raw = Path(path).read_bytes()
        magic, _version, n, chi, beta, alpha = _DUMP_HEADER.unpack_from(raw)
        if magic != _DUMP_MAGIC:
            raise ValueError(f"{path}: not a kernel dump")
        data = np.frombuffer(raw, dtype="<f8", offset=_DUMP_HEADER.size)
        entries = data.reshape(n + 1, n + 1).astype(float)
        return cls(entries, alpha, beta, None if chi == 0.0 else chi)


def _check_size(n_max):
    if int(n_max) != n_max or n_max < 1:
        raise ParameterError(f"n_max must be an integer >= 1, got {n_max!r}")
    return int(n_max)


def kernel_entries(chi, beta, alpha, n_max, offset=0):
    """Raw kernel entries for modes offset..offset+n_max, with no domain checks.

    The sinc argument 2 alpha (eps_l - eps_l') / chi^2 is evaluated through
    eps_l - eps_l' = chi^2 (q_l - q_l') / (eps_l + eps_l'), q_l = (l-b)(l-b+1),
    which avoids cancellation when chi is small or l is large.
    """
    ell = np.arange(offset, offset + n_max + 1, dtype=float)
    s = ell - beta
    q = s * (s + 1.0)
    eps = np.atleast_1d(mode_energy(chi, beta, ell))
    a = np.atleast_1d(mode_norm(chi, beta, ell))
    u = s / (1.0 + eps)
    arg = 2.0 * alpha * (q[:, None] - q[None, :]) / (eps[:, None] + eps[None, :])
    return (4.0 * alpha) * (a[:, None] * a[None, :]) * (u[:, None] + u[None, :]) * sinc(arg)


def build_kernel(params: RingParams, n_max: int) -> FluxKernel:
    n = _check_size(n_max)
    k = kernel_entries(params.chi, params.beta, params.alpha, n)
    k.setflags(write=False)
    return FluxKernel(k, params.alpha, params.beta, params.chi)


def nonrel_entries(alpha, beta, n_max, offset=0):
    ell = np.arange(offset, offset + n_max + 1, dtype=float)
    s = ell - beta
    q = s * (s + 1.0)
    return (alpha / np.pi) * (s[:, None] + s[None, :]) * sinc(alpha * (q[:, None] - q[None, :]))


def nonrel_kernel(alpha: float, beta: float, n_max: int) -> FluxKernel:
    """chi -> 0 limit of the relativistic kernel."""
    n = _check_size(n_max)
    if alpha <= 0:
        raise ParameterError(f"alpha must be > 0, got {alpha}")
    if not -1.0 < beta <= 0.0:
        raise ParameterError(f"beta must lie in (-1, 0], got {beta}")
    k = nonrel_entries(alpha, beta, n)
    k.setflags(write=False)
    return FluxKernel(k, float(alpha), float(beta), None)
