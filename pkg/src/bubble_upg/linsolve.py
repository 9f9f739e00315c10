"""Direct solvers: pivotless Thomas elimination, dense LU oracle, generalized sine eigensystem."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .assembly import TridiagonalMatrix
from .errors import SingularMatrixError, SizeError, ZeroPivotError

log = logging.getLogger(__name__)

_TINY_PIVOT = np.finfo(float).tiny


def thomas_batched(sub, diag, sup, rhs):
    """Thomas elimination for a batch of tridiagonal systems.

    All arrays carry the batch along axis 0: ``diag`` and ``rhs`` are
    (batch, m), ``sub`` and ``sup`` are (batch, m-1). Raises ZeroPivotError on a
    zero or denormal pivot.
    """
    diag = np.asarray(diag, dtype=float)
    sub = np.asarray(sub, dtype=float)
    sup = np.asarray(sup, dtype=float)
    d = np.array(rhs, dtype=float)
    m = diag.shape[1]
    c = np.empty_like(diag)
    piv = diag[:, 0].copy()
    if np.any(np.abs(piv) < _TINY_PIVOT):
        raise ZeroPivotError("zero pivot in row 0")
    d[:, 0] /= piv
    for i in range(1, m):
        c[:, i - 1] = sup[:, i - 1] / piv
        piv = diag[:, i] - sub[:, i - 1] * c[:, i - 1]
        if np.any(np.abs(piv) < _TINY_PIVOT):
            raise ZeroPivotError(f"zero pivot in row {i}")
        d[:, i] = (d[:, i] - sub[:, i - 1] * d[:, i - 1]) / piv
    for i in range(m - 2, -1, -1):
        d[:, i] -= c[:, i] * d[:, i + 1]
    return d


def thomas_solve(A: TridiagonalMatrix, rhs) -> np.ndarray:
    """Solve A x = rhs by pivotless elimination; rhs may be a vector or an (m, k) block."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != A.size:
        raise SizeError(f"rhs length {rhs.shape[0]} does not match matrix size {A.size}")
    if rhs.ndim == 1:
        return thomas_batched(A.sub[None], A.diag[None], A.sup[None], rhs[None])[0]
    k = rhs.shape[1]
    rep = lambda a: np.broadcast_to(a, (k, a.size))
    return thomas_batched(rep(A.sub), rep(A.diag), rep(A.sup), rhs.T).T


def dense_lu_solve(A, rhs) -> np.ndarray:
    """Partial-pivoting LU solve of a dense system."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SizeError(f"dense solve needs a square matrix, got shape {A.shape}")
    with warnings.catch_warnings():
        # singularity is reported through SingularMatrixError below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    if np.min(np.abs(np.diag(lu))) < 1e-300:
        raise SingularMatrixError("matrix is numerically singular")
    return scipy.linalg.lu_solve((lu, piv), np.asarray(rhs, dtype=float))


def residual_ok(A: TridiagonalMatrix, x, rhs, rtol: float = 1e-12) -> bool:
    r = np.max(np.abs(A.matvec(x) - rhs)) if np.size(rhs) else 0.0
    scale = A.norm_inf() * np.max(np.abs(x), initial=0.0) + np.max(np.abs(rhs), initial=0.0)
    return bool(np.isfinite(r) and r <= rtol * scale)


def solve_tridiagonal(A: TridiagonalMatrix, rhs, rtol: float = 1e-12):
    """Thomas solve with a residual check and a dense-LU fallback.

    Returns (x, residual) with residual = max |A x - rhs|.
    """
    rhs = np.asarray(rhs, dtype=float)
    try:
        x = thomas_solve(A, rhs)
        if residual_ok(A, x, rhs, rtol):
            return x, float(np.max(np.abs(A.matvec(x) - rhs), initial=0.0))
        log.warning("Thomas residual check failed (m=%d); retrying with dense LU", A.size)
    except ZeroPivotError as exc:
        log.warning("%s; retrying with dense LU", exc)
    x = dense_lu_solve(A.to_dense(), rhs)
    return x, float(np.max(np.abs(A.matvec(x) - rhs), initial=0.0))


@dataclass(frozen=True)
class SineEigensystem:
    """Generalized eigenpairs of S z = lambda M z with S = tridiag(-1, 2, -1), M = (h/6) tridiag(1, 4, 1).

    Columns of Q are sine vectors scaled so that Q^T M Q = I.
    """

    m: int
    h: float
    lambdas: np.ndarray = field(repr=False)
    Q: np.ndarray = field(repr=False)


def sine_eigensystem(m: int, h: float) -> SineEigensystem:
    if m < 1:
        raise SizeError(f"need m >= 1, got {m}")
    n = m + 1
    k = np.arange(1, n)
    cos_t = np.cos(k * np.pi / n)
    lambdas = (2.0 - 2.0 * cos_t) / (h / 6.0 * (4.0 + 2.0 * cos_t))
    V = np.sin(np.pi * (np.outer(k, k) % (2 * n)) / n)  # V[l, k] = sin(l k pi / n), argument reduced exactly
    # v_k^T v_k = n/2 and v_k^T M v_k = (h/6)(4 + 2 cos theta_k) n/2
    V /= np.sqrt(h / 6.0 * (4.0 + 2.0 * cos_t) * n / 2.0)[None, :]
    lambdas.setflags(write=False)
    V.setflags(write=False)
    return SineEigensystem(m, h, lambdas, V)
