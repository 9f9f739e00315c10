"""1D UPG system assembly: constant-stencil tridiagonal matrices and the load vector (f, g_j)."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np
from scipy.special import gammainc

from .bubbles import BubbleSpec
from .core import Problem1D, UniformMesh1D
from .errors import ParameterError, QuadratureError, SizeError
from .quadrature import composite_rule


@dataclass(frozen=True)
class TridiagonalMatrix:
    sub: np.ndarray = field(repr=False)
    diag: np.ndarray = field(repr=False)
    sup: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = np.array(self.diag, dtype=float)
        lo = np.array(self.sub, dtype=float)
        up = np.array(self.sup, dtype=float)
        if d.ndim != 1 or d.size == 0:
            raise SizeError("tridiagonal matrix needs a nonempty diagonal")
        if lo.shape != (d.size - 1,) or up.shape != (d.size - 1,):
            raise SizeError(f"off-diagonals must have length {d.size - 1}")
        for a in (d, lo, up):
            a.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "sub", lo)
        object.__setattr__(self, "sup", up)

    @classmethod
    def from_stencil(cls, m: int, lower: float, center: float, upper: float) -> "TridiagonalMatrix":
        if m < 1:
            raise SizeError(f"matrix size must be >= 1, got {m}")
        return cls(np.full(m - 1, lower), np.full(m, center), np.full(m - 1, upper))

    @property
    def size(self) -> int:
        return self.diag.size

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        y = self.diag[:, None] * x if x.ndim == 2 else self.diag * x
        if self.size > 1:
            if x.ndim == 2:
                y[1:] += self.sub[:, None] * x[:-1]
                y[:-1] += self.sup[:, None] * x[1:]
            else:
                y[1:] += self.sub * x[:-1]
                y[:-1] += self.sup * x[1:]
        return y

    __matmul__ = matvec

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1)

    def norm_inf(self) -> float:
        a = np.abs(self.diag).copy()
        a[1:] += np.abs(self.sub)
        a[:-1] += np.abs(self.sup)
        return float(a.max())

    def __add__(self, other):
        return TridiagonalMatrix(self.sub + other.sub, self.diag + other.diag, self.sup + other.sup)

    def __sub__(self, other):
        return TridiagonalMatrix(self.sub - other.sub, self.diag - other.diag, self.sup - other.sup)

    def __rmul__(self, a: float):
        return TridiagonalMatrix(a * self.sub, a * self.diag, a * self.sup)


# stencils are (lower, center, upper), i.e. the coefficients of u_{j-1}, u_j, u_{j+1} in row j

def assemble_S(m: int) -> TridiagonalMatrix:
    return TridiagonalMatrix.from_stencil(m, -1.0, 2.0, -1.0)


def assemble_C(m: int) -> TridiagonalMatrix:
    return TridiagonalMatrix.from_stencil(m, -0.5, 0.0, 0.5)


def assemble_M(m: int, h: float) -> TridiagonalMatrix:
    if not h > 0:
        raise ParameterError(f"h must be positive, got {h}")
    return TridiagonalMatrix.from_stencil(m, h / 6.0, 4.0 * h / 6.0, h / 6.0)


def assemble_Mq(m: int, h: float, beta: float) -> TridiagonalMatrix:
    """M + beta (h/3) tridiag(-1, 0, 1)."""
    M = assemble_M(m, h)
    return TridiagonalMatrix(M.sub - beta * h / 3.0, M.diag, M.sup + beta * h / 3.0)


def assemble_upg_matrix(n: int, epsilon: float, b: float) -> TridiagonalMatrix:
    """(eps/h + b) S + C for the UPG scheme whose bubble has average b."""
    if n < 2:
        raise SizeError(f"need n >= 2, got {n}")
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    if not b > 0:
        raise ParameterError(f"bubble average must be positive, got {b}")
    a = epsilon * n + b
    return TridiagonalMatrix.from_stencil(n - 1, -a - 0.5, 2.0 * a, -a + 0.5)


# ---------------------------------------------------------------------------
# load vector


def _moment(q: int, c: float, L: float) -> float:
    """int_0^L t^q e^{c t} dt without cancellation for either sign of c."""
    x = c * L
    if x == 0.0:
        return L ** (q + 1) / (q + 1)
    if x < -1.0:
        lam = -c
        return factorial(q) * gammainc(q + 1, lam * L) / lam ** (q + 1)
    if x > 50.0:
        # forward recursion is stable for a growing exponential
        val = np.expm1(x) / c
        for p in range(1, q + 1):
            val = (L**p * np.exp(x) - p * val) / c
        return val
    total, term, k = 0.0, 1.0, 0
    while True:
        contrib = term / (q + k + 1)
        total += contrib
        k += 1
        term *= x / k
        if k > abs(x) and abs(term) < 1e-18 * abs(total):
            break
    return L ** (q + 1) * total


def _closed_form_pieces(problem: Problem1D, mesh: UniformMesh1D, spec: BubbleSpec):
    """Per-element integrals of f against t/h, 1 - t/h and the bubble (t = offset in the element)."""
    n, h, eps = mesh.n, mesh.h, problem.epsilon
    xl = np.arange(n) * h
    IR = np.zeros(n)
    IL = np.zeros(n)
    IB = np.zeros(n)
    for c, k, a in problem.terms:
        m = [_moment(p, a, h) for p in range(k + 3)]
        if spec.family == "exponential" and not spec.collapsed:
            mexp = [_moment(p, a - 1.0 / eps, h) for p in range(k + 1)]
            l0 = -1.0 / np.expm1(-h / eps)
        scale = c * np.exp(a * xl)
        for q in range(k + 1):
            wgt = scale * comb(k, q) * xl ** (k - q)
            r = m[q + 1] / h
            IR += wgt * r
            IL += wgt * (m[q] - r)
            if spec.family == "quadratic":
                ib = 4.0 * spec.beta / h**2 * (h * m[q + 1] - m[q + 2])
            elif spec.collapsed:
                ib = m[q] - r
            else:
                ib = l0 * (m[q] - mexp[q]) - r
            IB += wgt * ib
    return IR, IL, IB


def _quadrature_pieces(problem: Problem1D, mesh: UniformMesh1D, spec: BubbleSpec, refine: int):
    rule = composite_rule(mesh.n, local_breaks=spec.layer_breaks(), refine=refine)
    fw = np.asarray(problem.f(rule.x), dtype=float) * rule.w
    s = rule.t / mesh.h
    B = spec.values(rule.t)
    n = mesh.n
    IR = np.bincount(rule.elem, fw * s, minlength=n)
    IL = np.bincount(rule.elem, fw * (1.0 - s), minlength=n)
    IB = np.bincount(rule.elem, fw * B, minlength=n)
    return IR, IL, IB


def _combine(IR, IL, IB):
    # element e carries phi of its right node (index e) plus the bubble, and
    # phi of its left node (index e-1) minus the bubble
    return (IR + IB)[:-1] + (IL - IB)[1:]


def assemble_rhs_1d(problem: Problem1D, mesh: UniformMesh1D, spec: BubbleSpec,
                    method: str = "auto", rtol: float = 1e-9, max_refine: int = 6) -> np.ndarray:
    """Load vector with entries (f, phi_j + B_j - B_{j+1}), j = 1..n-1.

    ``method='auto'`` uses closed-form moments for poly-exp data and
    composite Gauss quadrature otherwise. The quadrature path refines every
    piece by bisection until two successive levels agree to ``rtol``
    (relative to the largest entry).
    """
    if method == "auto":
        method = "closed" if problem.f_class == "poly-exp" else "quadrature"
    if method == "closed":
        if problem.f_class != "poly-exp":
            raise ParameterError("closed-form moments need poly-exp data")
        return _combine(*_closed_form_pieces(problem, mesh, spec))
    if method != "quadrature":
        raise ParameterError(f"unknown rhs method {method!r}")

    prev = _combine(*_quadrature_pieces(problem, mesh, spec, 0))
    est = np.inf
    for level in range(1, max_refine + 1):
        cur = _combine(*_quadrature_pieces(problem, mesh, spec, level))
        scale = np.max(np.abs(cur))
        diff = np.max(np.abs(cur - prev))
        est = 0.0 if diff == 0.0 else diff / scale if scale > 0 else np.inf
        if est <= rtol:
            return cur
        prev = cur
    raise QuadratureError("load vector quadrature did not converge", est)
