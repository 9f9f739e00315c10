"""Green's function of -eps u'' + u' on (0, 1) with zero Dirichlet data, and its nodal matrix.

The nodal matrix G[j, i] = G(x_j, x_i) is the exact inverse of the
exponential-bubble UPG matrix; this module evaluates it independently of
any assembly code so it can serve as an oracle.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assembly import assemble_upg_matrix
from .bubbles import eval_exponential_bubble, exponential_average
from .errors import DomainError, SizeError


def green_value(x, s, epsilon: float):
    """G(x, s), written with nonpositive exponents only (finite for every eps > 0)."""
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any((x < 0) | (x > 1)) or np.any((s < 0) | (s > 1)):
        raise DomainError("Green's function arguments must lie in [0, 1]")
    x, s = np.broadcast_arrays(x, s)
    denom = -np.expm1(-1.0 / epsilon)
    with np.errstate(over="ignore"):
        # s < x
        left = (-np.expm1((x - 1.0) / epsilon)) * (-np.expm1(-s / epsilon))
        # s >= x: (e^{(x-s)/eps} - e^{-s/eps}) (1 - e^{(s-1)/eps})
        right = np.exp(np.minimum(x - s, 0.0) / epsilon) * (-np.expm1(-x / epsilon)) * (-np.expm1((s - 1.0) / epsilon))
    out = np.where(s < x, left, right) / denom
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GreenMatrix:
    n: int
    epsilon: float
    entries: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.n - 1


def green_matrix(n: int, epsilon: float) -> GreenMatrix:
    if n < 2:
        raise SizeError(f"need n >= 2, got {n}")
    z = np.arange(1, n) / n
    G = green_value(z[:, None], z[None, :], epsilon)
    G = np.atleast_2d(G)
    G.setflags(write=False)
    return GreenMatrix(n, epsilon, G)


def verify_inverse_identity(n: int, epsilon: float, perturb: float = 0.0) -> float:
    """max |(M^e G - I)_{ji}| for the exponential-bubble matrix M^e.

    ``perturb`` is added to the diagonal of M^e first; it exists so that
    verification harnesses can prove they detect a broken matrix.
    """
    A = assemble_upg_matrix(n, epsilon, exponential_average(1.0 / n, epsilon))
    if perturb:
        A = type(A)(A.sub, A.diag + perturb, A.sup)
    G = green_matrix(n, epsilon).entries
    return float(np.max(np.abs(A.matvec(G) - np.eye(n - 1))))


def exponential_test_functions(s, n: int, epsilon: float) -> np.ndarray:
    """g_i(s) = phi_i(s) + B_i(s) - B_{i+1}(s) with the (uncollapsed) exponential bubble.

    Returns shape (len(s), n-1).
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    h = 1.0 / n
    e = np.clip(np.floor(s * n).astype(int), 0, n - 1)
    t = np.clip(s - e * h, 0.0, h)
    B = eval_exponential_bubble(t, h, epsilon, collapse=False)
    g = np.zeros((s.size, n - 1))
    idx = np.arange(s.size)
    ok = e <= n - 2
    g[idx[ok], e[ok]] = t[ok] / h + B[ok]
    ok = e >= 1
    g[idx[ok], e[ok] - 1] = 1.0 - t[ok] / h - B[ok]
    return g


def green_in_test_space_check(n: int, epsilon: float, j: int, samples: int = 20) -> float:
    """max over samples of |G(x_j, s) - sum_i G(x_j, x_i) g_i(s)|, j is 1-based."""
    if not 1 <= j <= n - 1:
        raise DomainError(f"node index must be in 1..{n - 1}, got {j}")
    h = 1.0 / n
    local = np.linspace(0.0, h, samples)
    s = np.clip((np.arange(n)[:, None] * h + local[None, :]).ravel(), 0.0, 1.0)
    xj = j * h
    row = green_matrix(n, epsilon).entries[j - 1]
    lhs = green_value(xj, s, epsilon)
    rhs = exponential_test_functions(s, n, epsilon) @ row
    return float(np.max(np.abs(lhs - rhs)))
