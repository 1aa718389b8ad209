"""Smallest eigenpair of a dense real symmetric matrix."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

# above this size LAPACK's subset driver is slower than Lanczos on one core
LANCZOS_THRESHOLD = 4000


class EigenSolverError(RuntimeError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float


def _check_symmetric(m):
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = np.max(np.abs(m)) if m.size else 0.0
    asym = np.max(np.abs(m - m.T)) if m.size else 0.0
    if asym > 1e-12 * max(scale, np.finfo(float).tiny):
        raise ValueError(f"matrix is not symmetric (max |M - M^T| = {asym:.3e})")


def min_eigpair(matrix, method="auto", tol=1e-9) -> EigenPair:
    """Algebraically smallest eigenvalue and its unit eigenvector.

    The eigenvector is signed so its largest-magnitude entry is positive.
    ``method`` is "dense", "lanczos" or "auto".  Raises EigenSolverError if the
    residual ||Kv - lv|| exceeds ``tol * ||K||_F``.
    """
    m = np.asarray(matrix, dtype=float)
    _check_symmetric(m)
    n = m.shape[0]
    if n == 0:
        raise ValueError("empty matrix")
    if method == "auto":
        method = "lanczos" if n > LANCZOS_THRESHOLD else "dense"

    if method == "dense" or n < 3:
        w, v = scipy.linalg.eigh(m, subset_by_index=[0, 0], check_finite=False)
        value, vec = float(w[0]), v[:, 0]
    elif method == "lanczos":
        v0 = np.ones(n) / np.sqrt(n)
        try:
            w, v = eigsh(m, k=1, which="SA", v0=v0, tol=1e-12, maxiter=20 * n)
        except ArpackNoConvergence as exc:
            raise EigenSolverError(
                "Lanczos iteration did not converge",
                {"n": n, "converged": len(exc.eigenvalues)},
            ) from exc
        value, vec = float(w[0]), v[:, 0]
    else:
        raise ValueError(f"unknown method {method!r}")

    vec = vec / np.linalg.norm(vec)
    if vec[np.argmax(np.abs(vec))] < 0:
        vec = -vec
    residual = float(np.linalg.norm(m @ vec - value * vec))
    fro = float(np.linalg.norm(m))
    if residual > tol * fro and residual > 0.0:
        raise EigenSolverError(
            f"eigenpair residual {residual:.3e} exceeds {tol:g} * ||K||_F",
            {"n": n, "residual": residual, "frobenius": fro, "method": method},
        )
    return EigenPair(value, vec, residual)
