"""Line limit of the ring problem: an integral eigenvalue equation on z in [0, inf).

The kernel depends on the single relativistic parameter ``eps``; the equation
is discretized by Nystrom quadrature on [0, z_max] and symmetrized with the
square roots of the weights so the symmetric eigensolver applies.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .eig import min_eigpair
from .extrapolate import ExtrapolationResult, quad_extrapolate
from .kernel import sinc
from .model import ParameterError

log = logging.getLogger(__name__)

DEFAULT_Z_MAX = 20.0
DEFAULT_NODES = 400
# cutoff schedule for 1/z_max extrapolation; node count grows like z_max^2
Z_MAX_SCHEDULE = (40.0, 50.0, 60.0, 70.0, 80.0)
PANEL_ORDER = 6
PANEL_WIDTH_U = math.pi  # panel width in u = z^2, one half-period of sinc(u - u')
CUTOFF_WARN = 1e-3


@dataclass(frozen=True)
class LineParams:
    eps: float
    z_max: float = DEFAULT_Z_MAX
    n_nodes: int = DEFAULT_NODES
    rule: str = "legendre"

    def __post_init__(self):
        if not self.eps > 0:
            raise ParameterError(f"eps must be > 0, got {self.eps}")
        if not self.z_max > 0:
            raise ParameterError(f"z_max must be > 0, got {self.z_max}")
        if int(self.n_nodes) != self.n_nodes or self.n_nodes < 50:
            raise ParameterError(f"n_nodes must be an integer >= 50, got {self.n_nodes}")
        if self.rule not in ("legendre", "panels"):
            raise ParameterError(f"unknown quadrature rule {self.rule!r}")


def gamma_of_z(eps, z):
    out = np.sqrt(1.0 + (eps * np.asarray(z, dtype=float)) ** 2)
    return out if out.ndim else float(out)


def line_kernel(eps, z, zp):
    """Kernel of the line eigenvalue equation; broadcasts over ``z`` and ``zp``."""
    z = np.asarray(z, dtype=float)
    zp = np.asarray(zp, dtype=float)
    g, gp = gamma_of_z(eps, z), gamma_of_z(eps, zp)
    num = z * (gp + 1.0) + zp * (g + 1.0)
    # factored per node so that k(z, z') == k(z', z) bit for bit
    den = np.sqrt(g * (g + 1.0)) * np.sqrt(gp * (gp + 1.0))
    # (2/eps^2)(g - g') rewritten without cancellation
    arg = 2.0 * (z * z - zp * zp) / (g + gp)
    out = num / den * sinc(arg) / math.pi
    return out if np.ndim(out) else float(out)


def nonrel_line_kernel(z, zp):
    z = np.asarray(z, dtype=float)
    zp = np.asarray(zp, dtype=float)
    return (z + zp) * sinc(z * z - zp * zp) / math.pi


def quadrature(z_max, n_nodes, rule="legendre"):
    """Nodes and weights on [0, z_max].

    "legendre" is a single Gauss-Legendre rule.  "panels" splits [0, z_max]
    into panels of equal width in u = z^2 (so each panel spans a fixed number of
    kernel oscillations) with PANEL_ORDER Gauss points each.
    """
    if rule == "legendre":
        x, w = np.polynomial.legendre.leggauss(int(n_nodes))
        return (x + 1.0) * (z_max / 2.0), w * (z_max / 2.0)
    n_panels = max(1, int(n_nodes) // PANEL_ORDER)
    edges = np.sqrt(np.linspace(0.0, z_max * z_max, n_panels + 1))
    x, w = np.polynomial.legendre.leggauss(PANEL_ORDER)
    a, b = edges[:-1, None], edges[1:, None]
    z = ((x + 1.0) / 2.0 * (b - a) + a).ravel()
    wz = (w * (b - a) / 2.0).ravel()
    return z, wz


def panel_nodes_for(z_max):
    """Node count for the panel rule that keeps PANEL_WIDTH_U fixed."""
    return PANEL_ORDER * max(1, int(math.ceil(z_max * z_max / PANEL_WIDTH_U)))


def nystrom_matrix(eps, z, w, chunk=1024):
    """Symmetrized Nystrom matrix sqrt(w_i) k(z_i, z_j) sqrt(w_j), built in row blocks."""
    n = z.size
    s = np.sqrt(w)
    m = np.empty((n, n))
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        m[lo:hi] = line_kernel(eps, z[lo:hi, None], z[None, :]) * (s[lo:hi, None] * s[None, :])
    return m


def line_min_eig(params: LineParams, check_convergence=False) -> float:
    """Smallest eigenvalue of the discretized line operator at cutoff ``z_max``."""
    z, w = quadrature(params.z_max, params.n_nodes, params.rule)
    value = min_eigpair(nystrom_matrix(params.eps, z, w)).value
    if check_convergence:
        finer = LineParams(params.eps, params.z_max, 2 * params.n_nodes, params.rule)
        wider = LineParams(params.eps, 2 * params.z_max, 4 * params.n_nodes, params.rule)
        for label, other in (("n_nodes", finer), ("z_max", wider)):
            v2 = line_min_eig(other)
            if abs(v2 - value) > CUTOFF_WARN:
                log.warning("line eigenvalue moves by %.2e when doubling %s (%.6f -> %.6f)",
                            abs(v2 - value), label, value, v2)
    return value


@dataclass(frozen=True)
class LineResult:
    eps: float
    value: float
    extrapolation: ExtrapolationResult
    table: tuple[tuple[float, int, float], ...]  # (z_max, nodes, lambda_min)


def line_infimum(eps, z_max_schedule=Z_MAX_SCHEDULE) -> LineResult:
    """Cutoff-extrapolated line infimum: lambda_min(z_max) fit quadratically in 1/z_max.

    The eigenfunction decays slowly, so the error of a single cutoff is
    O(1/z_max); this mirrors the 1/N extrapolation on the ring, where the
    truncation corresponds to z_max = sqrt(alpha) N.
    """
    table = []
    for zm in sorted(float(z) for z in z_max_schedule):
        n = panel_nodes_for(zm)
        v = line_min_eig(LineParams(eps, zm, n, "panels"))
        table.append((zm, n, v))
    fit = quad_extrapolate([(zm, v) for zm, _, v in table], min_size=1.0)
    return LineResult(float(eps), fit.value_at_zero, fit, tuple(table))
