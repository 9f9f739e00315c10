"""2D quadratic-bubble UPG for -eps Laplace(u) + u_x = f on the unit square.

Trial functions phi_l(x) phi_k(y), test functions g_i(x) phi_j(y) with the
bubble only in the flow direction x. With X[l, k] = u_{lk} the system
A U = F, A = M (x) C^e + (eps/h) S (x) M^q and U ordered x-index fastest, is
the matrix equation

    C^e X M + (eps/h) M^q X S = F,     F[i, j] = (f, g_i(x) phi_j(y)).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .assembly import TridiagonalMatrix, assemble_M, assemble_Mq, assemble_S, assemble_upg_matrix
from .bubbles import BubbleSpec, special_beta
from .core import (
    PiecewiseLinearFE2D,
    Problem2D,
    UniformMesh1D,
    fixture_example1_v,
    fixture_example1_v_prime,
)
from .errors import ParameterError, SizeError
from .linsolve import dense_lu_solve, sine_eigensystem, thomas_batched
from .quadrature import ERROR_GAUSS_POINTS, LAYER_REACH, CompositeRule, composite_rule, left_layer_breaks, right_layer_breaks

DENSE_LIMIT = 4096


@dataclass(frozen=True)
class TensorSystem2D:
    n: int
    epsilon: float
    beta: float
    M: TridiagonalMatrix
    Ce: TridiagonalMatrix
    S: TridiagonalMatrix
    Mq: TridiagonalMatrix
    rhs: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return 1.0 / self.n

    def apply(self, X):
        """C^e X M + (eps/h) M^q X S, i.e. A^q applied to the column-stacked X."""
        X = np.asarray(X, dtype=float)
        t1 = self.M.matvec(self.Ce.matvec(X).T).T
        t2 = self.S.matvec(self.Mq.matvec(X).T).T
        return t1 + self.epsilon * self.n * t2


@dataclass(frozen=True)
class Solution2D:
    u_h: PiecewiseLinearFE2D
    epsilon: float
    residual: float


def x_rule(n: int, epsilon: float, npts: int = 5) -> CompositeRule:
    breaks = right_layer_breaks(epsilon) if LAYER_REACH * epsilon < 1.0 else ()
    return composite_rule(n, global_breaks=breaks, npts=npts)


def y_rule(n: int, layer_width: Optional[float], npts: int = 5) -> CompositeRule:
    if layer_width is None:
        return composite_rule(n, npts=npts)
    d = left_layer_breaks(layer_width)
    return composite_rule(n, global_breaks=np.concatenate((d, 1.0 - d)), npts=npts)


def _test_matrix(rule: CompositeRule, bubble: BubbleSpec) -> np.ndarray:
    """g_i(x_p) for every quadrature point, shape (points, n-1)."""
    G = rule.hat_matrix()
    B = bubble.values(rule.t)
    n = rule.n
    idx = np.arange(rule.x.size)
    ok = rule.elem <= n - 2
    G[idx[ok], rule.elem[ok]] += B[ok]
    ok = rule.elem >= 1
    G[idx[ok], rule.elem[ok] - 1] -= B[ok]
    return G


def _eval_grid(fn, x, y):
    return np.broadcast_to(np.asarray(fn(x[:, None], y[None, :]), dtype=float), (x.size, y.size))


def assemble_2d(problem: Problem2D, n: int, beta=None, mass: str = "stated") -> TensorSystem2D:
    """Tensor factors and load matrix. ``beta`` defaults to the special scaling.

    ``mass`` selects the x-direction matrix in the eps-term: 'stated' is
    M + beta (h/3) tridiag(-1, 0, 1); 'inner-product' is the transpose, which
    is what (phi_l, g_i) evaluates to row by row.
    """
    if mass not in ("stated", "inner-product"):
        raise ParameterError(f"unknown mass variant {mass!r}")
    mesh = UniformMesh1D(n)
    h, eps, m = mesh.h, problem.epsilon, n - 1
    beta = special_beta(h, eps) if beta is None else float(beta)
    bubble = BubbleSpec("quadratic", eps, h, beta)
    Ce = assemble_upg_matrix(n, eps, bubble.average_b)

    rx = x_rule(n, eps)
    ry = y_rule(n, problem.y_layer_width)
    Gx = _test_matrix(rx, bubble) * rx.w[:, None]
    Py = ry.hat_matrix() * ry.w[:, None]
    fv = _eval_grid(problem.f, rx.x, ry.x)
    F = Gx.T @ fv @ Py
    F.setflags(write=False)
    Mq = assemble_Mq(m, h, beta)
    if mass == "inner-product":
        Mq = TridiagonalMatrix(Mq.sup, Mq.diag, Mq.sub)
    return TensorSystem2D(n, eps, beta, assemble_M(m, h), Ce, assemble_S(m), Mq, F)


def solve_2d_fast(sys: TensorSystem2D) -> Solution2D:
    """Diagonalize the y-direction with the generalized sine basis; one tridiagonal solve per mode."""
    m, n = sys.n - 1, sys.n
    es = sine_eigensystem(m, sys.h)
    Q = es.Q
    FQ = np.asarray(sys.rhs) @ Q
    c = sys.epsilon * n * es.lambdas  # (eps/h) lambda_k
    sub = sys.Ce.sub[None, :] + c[:, None] * sys.Mq.sub[None, :]
    diag = sys.Ce.diag[None, :] + c[:, None] * sys.Mq.diag[None, :]
    sup = sys.Ce.sup[None, :] + c[:, None] * sys.Mq.sup[None, :]
    W = thomas_batched(sub, diag, sup, FQ.T).T
    X = W @ Q.T
    res = float(np.max(np.abs(sys.apply(X) - sys.rhs)))
    return Solution2D(PiecewiseLinearFE2D(UniformMesh1D(n), X), sys.epsilon, res)


def dense_matrix_2d(sys: TensorSystem2D) -> np.ndarray:
    """A^q = M (x) C^e + (eps/h) S (x) M^q, rows and columns ordered x-index fastest."""
    m = sys.n - 1
    if m * m > DENSE_LIMIT:
        raise SizeError(f"dense 2D oracle limited to {DENSE_LIMIT} unknowns, got {m * m}")
    return np.kron(sys.M.to_dense(), sys.Ce.to_dense()) + sys.epsilon * sys.n * np.kron(sys.S.to_dense(), sys.Mq.to_dense())


def solve_2d_dense(sys: TensorSystem2D) -> Solution2D:
    m = sys.n - 1
    A = dense_matrix_2d(sys)
    F = np.asarray(sys.rhs).ravel(order="F")
    U = dense_lu_solve(A, F)
    res = float(np.max(np.abs(A @ U - F)))
    return Solution2D(PiecewiseLinearFE2D(UniformMesh1D(sys.n), U.reshape((m, m), order="F")), sys.epsilon, res)


# ---------------------------------------------------------------------------
# manufactured problems


def fixture_example1(epsilon: float) -> Problem2D:
    """u = v(x) sin(pi y) with v the e^x solution; elliptic layer at x = 1."""
    v = fixture_example1_v(epsilon)
    dv = fixture_example1_v_prime(epsilon)
    pi = np.pi

    def u(x, y):
        return v(x) * np.sin(pi * y)

    def grad(x, y):
        return dv(x) * np.sin(pi * y), v(x) * pi * np.cos(pi * y)

    def f(x, y):
        return (np.exp(x) + epsilon * pi**2 * v(x)) * np.sin(pi * y)

    return Problem2D(epsilon, f, u, grad, None, 0.0, "example1")


def fixture_example2(epsilon: float) -> Problem2D:
    """u = v(x) w(y), w = y(1-y) + e^{-y/sqrt(eps)} + e^{-(1-y)/sqrt(eps)}.

    w does not vanish at y = 0, 1; ``boundary_mismatch`` records max |u| on
    those edges, and the discrete problem still uses zero boundary data.
    """
    v = fixture_example1_v(epsilon)
    dv = fixture_example1_v_prime(epsilon)
    r = np.sqrt(epsilon)

    def layers(y):
        return np.exp(-y / r) + np.exp(-(1.0 - y) / r)

    def w(y):
        return y * (1.0 - y) + layers(y)

    def dw(y):
        return 1.0 - 2.0 * y + (np.exp(-(1.0 - y) / r) - np.exp(-y / r)) / r

    def u(x, y):
        return v(x) * w(y)

    def grad(x, y):
        return dv(x) * w(y), v(x) * dw(y)

    def f(x, y):
        # -eps v'' + v' = e^x and eps w'' = -2 eps + layers(y)
        return w(y) * np.exp(x) - v(x) * (layers(y) - 2.0 * epsilon)

    xs = np.linspace(0.0, 1.0, 10_001)
    mismatch = float(np.max(np.abs(v(xs)))) * float(w(0.0))
    return Problem2D(epsilon, f, u, grad, r, mismatch, "example2")


# ---------------------------------------------------------------------------
# errors


@dataclass(frozen=True)
class ErrorReport2D:
    disc_inf: float
    disc_inf_sub: float
    l2_full: float
    h1_full: float
    l2_sub: float
    h1_sub: float
    max_uh_sub: float
    max_interp_sub: float
    delta: float
    y_strip: float
    empty_subdomain: bool = False


def error_report_2d(problem: Problem2D, sol: Solution2D, delta: float = 0.01, y_strip: float = 0.0) -> ErrorReport2D:
    """Nodal, L2 and H1 errors on the square and on (0, 1-delta) x (y_strip, 1-y_strip).

    The subdomain is the union of whole mesh cells inside that rectangle.
    """
    if problem.exact_u is None or problem.exact_grad is None:
        raise ParameterError("error report needs the exact solution and its gradient")
    v = sol.u_h
    n = v.mesh.n
    h = v.mesh.h
    z = v.mesh.interior
    U = np.asarray(v.coeffs)

    I = _eval_grid(problem.exact_u, z, z)
    nodal = np.abs(I - U)
    tol = 1e-12
    node_x = z <= 1.0 - delta + tol
    node_y = (z >= y_strip - tol) & (z <= 1.0 - y_strip + tol)
    # a cell [e h, (e+1) h] is kept when it lies in the rectangle
    cell_x = (np.arange(n) + 1) * h <= 1.0 - delta + tol
    cell_y = (np.arange(n) * h >= y_strip - tol) & ((np.arange(n) + 1) * h <= 1.0 - y_strip + tol)
    empty = not (cell_x.any() and cell_y.any())
    node_mask = node_x[:, None] & node_y[None, :]

    rx = x_rule(n, problem.epsilon, ERROR_GAUSS_POINTS)
    ry = y_rule(n, problem.y_layer_width, ERROR_GAUSS_POINTS)
    Px, Dx = rx.hat_matrix(), rx.hat_slope_matrix()
    Py, Dy = ry.hat_matrix(), ry.hat_slope_matrix()
    E = _eval_grid(problem.exact_u, rx.x, ry.x) - Px @ U @ Py.T
    gx, gy = problem.exact_grad(rx.x[:, None], ry.x[None, :])
    Ex = np.broadcast_to(gx, E.shape) - Dx @ U @ Py.T
    Ey = np.broadcast_to(gy, E.shape) - Px @ U @ Dy.T
    W = rx.w[:, None] * ry.w[None, :]
    sub = cell_x[rx.elem][:, None] & cell_y[ry.elem][None, :]

    def integ(a, mask=None):
        a = W * a
        return float(np.sqrt(np.sum(a if mask is None else a[mask])))

    nan = float("nan")
    has_nodes = bool(node_mask.any())
    return ErrorReport2D(
        disc_inf=float(nodal.max()),
        disc_inf_sub=float(nodal[node_mask].max()) if has_nodes else nan,
        l2_full=integ(E * E),
        h1_full=integ(Ex * Ex + Ey * Ey),
        l2_sub=nan if empty else integ(E * E, sub),
        h1_sub=nan if empty else integ(Ex * Ex + Ey * Ey, sub),
        max_uh_sub=float(np.abs(U[node_mask]).max()) if has_nodes else nan,
        max_interp_sub=float(np.abs(I[node_mask]).max()) if has_nodes else nan,
        delta=delta,
        y_strip=y_strip,
        empty_subdomain=empty or not has_nodes,
    )
