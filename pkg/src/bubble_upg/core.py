"""Meshes, model problems, piecewise-linear FE functions and exact-solution fixtures.

Every exponential in this module is written so that only nonpositive
arguments reach ``np.exp``; ``exp(1/eps)`` overflows once eps < 1/709.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError, ParameterError

ScalarField = Callable[[np.ndarray], np.ndarray]


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class UniformMesh1D:
    """n equal subintervals of [0, 1]."""

    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ParameterError(f"mesh needs n >= 2 subintervals, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n

    @property
    def interior(self) -> np.ndarray:
        return np.arange(1, self.n) / self.n


# ---------------------------------------------------------------------------
# poly-exp right-hand sides: f(x) = sum c * x**k * exp(a*x)

PolyExpTerm = tuple  # (c, k, a)


def _poly_exp_eval(terms: Sequence[PolyExpTerm], x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for c, k, a in terms:
        out = out + c * x**k * np.exp(a * x)
    return out


def _poly_exp_derivative(terms: Sequence[PolyExpTerm]) -> list:
    d = []
    for c, k, a in terms:
        if k > 0:
            d.append((c * k, k - 1, a))
        if a != 0.0:
            d.append((c * a, k, a))
    return d


@dataclass(frozen=True)
class Problem1D:
    """-eps u'' + u' = f on (0, 1) with u(0) = u(1) = 0.

    ``f`` must accept numpy arrays. ``terms`` is set only for poly-exp data
    and enables the closed-form right-hand side.
    """

    epsilon: float
    f: ScalarField
    f_prime: Optional[ScalarField] = None
    f_class: str = "general"
    terms: tuple = ()
    name: str = "custom"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")
        if self.f_class not in ("general", "poly-exp"):
            raise ParameterError(f"unknown f_class {self.f_class!r}")
        if self.f_class == "poly-exp" and not self.terms:
            raise ParameterError("poly-exp problem needs its terms")

    @classmethod
    def from_terms(cls, epsilon: float, terms, name: str = "custom") -> "Problem1D":
        terms = tuple((float(c), int(k), float(a)) for c, k, a in terms)
        for _, k, _ in terms:
            if not 0 <= k <= 3:
                raise ParameterError(f"closed-form moments support x**k with k <= 3, got k={k}")
        dterms = tuple(_poly_exp_derivative(terms))
        return cls(
            epsilon=epsilon,
            f=lambda x: _poly_exp_eval(terms, x),
            f_prime=lambda x: _poly_exp_eval(dterms, x),
            f_class="poly-exp",
            terms=terms,
            name=name,
        )


@dataclass(frozen=True)
class Problem2D:
    """-eps Laplace(u) + u_x = f on the unit square, u = 0 on the boundary.

    ``y_layer_width`` marks parabolic layers at y = 0 and y = 1 for the
    error quadrature; ``boundary_mismatch`` is max |exact_u| on the
    boundary (nonzero when the manufactured solution misses the zero data).
    """

    epsilon: float
    f: Callable
    exact_u: Optional[Callable] = None
    exact_grad: Optional[Callable] = None
    y_layer_width: Optional[float] = None
    boundary_mismatch: float = 0.0
    name: str = "custom"

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ParameterError(f"epsilon must be positive, got {self.epsilon}")


# ---------------------------------------------------------------------------
# FE functions


@dataclass(frozen=True)
class PiecewiseLinearFE1D:
    mesh: UniformMesh1D
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = _frozen(self.coeffs)
        if c.shape != (self.mesh.n - 1,):
            raise ParameterError(f"expected {self.mesh.n - 1} interior coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @property
    def nodal_values(self) -> np.ndarray:
        return np.concatenate(([0.0], self.coeffs, [0.0]))

    def __call__(self, x):
        return eval_fe_1d(self, x)

    def __add__(self, other):
        return PiecewiseLinearFE1D(self.mesh, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return PiecewiseLinearFE1D(self.mesh, self.coeffs - other.coeffs)

    def __rmul__(self, a):
        return PiecewiseLinearFE1D(self.mesh, a * self.coeffs)


def _locate(n: int, x: np.ndarray):
    """Element index e (0-based, element e = [x_e, x_{e+1}]) and local coordinate in [0, 1]."""
    s = x * n
    e = np.clip(np.floor(s).astype(int), 0, n - 1)
    return e, s - e


def eval_fe_1d(v: PiecewiseLinearFE1D, x):
    """Evaluate the continuous piecewise-linear function at x (scalar or array)."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0) or np.any(np.isnan(xa)):
        raise DomainError("FE functions live on [0, 1]")
    vals = v.nodal_values
    n = v.mesh.n
    e, t = _locate(n, xa)
    out = vals[e] * (1.0 - t) + vals[e + 1] * t
    # nodes return the stored value bitwise, even when x*n rounds off an integer
    s = xa * n
    r = np.rint(s)
    out = np.where(np.abs(s - r) <= 1e-12, vals[r.astype(int)], out)
    return float(out) if np.ndim(out) == 0 else out


def eval_fe_1d_prime(v: PiecewiseLinearFE1D, x):
    """Derivative of the FE function; at a node the right-element slope is used."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0):
        raise DomainError("FE functions live on [0, 1]")
    vals = v.nodal_values
    slopes = np.diff(vals) * v.mesh.n
    e, _ = _locate(v.mesh.n, xa)
    out = slopes[e]
    return float(out) if np.ndim(out) == 0 else out


def nodal_interpolant_1d(u: ScalarField, mesh: UniformMesh1D) -> PiecewiseLinearFE1D:
    return PiecewiseLinearFE1D(mesh, np.asarray(u(mesh.interior), dtype=float))


@dataclass(frozen=True)
class PiecewiseLinearFE2D:
    """Bilinear FE function; ``coeffs[l, k]`` multiplies phi_l(x) phi_k(y) (0-based interior indices)."""

    mesh: UniformMesh1D
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = _frozen(self.coeffs)
        m = self.mesh.n - 1
        if c.shape != (m, m):
            raise ParameterError(f"expected ({m}, {m}) coefficients, got {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @property
    def nodal_values(self) -> np.ndarray:
        return np.pad(self.coeffs, 1)

    def __call__(self, x, y):
        xa = np.asarray(x, dtype=float)
        ya = np.asarray(y, dtype=float)
        if np.any((xa < 0) | (xa > 1)) or np.any((ya < 0) | (ya > 1)):
            raise DomainError("FE functions live on the unit square")
        xa, ya = np.broadcast_arrays(xa, ya)
        V = self.nodal_values
        n = self.mesh.n
        ex, tx = _locate(n, xa)
        ey, ty = _locate(n, ya)
        out = (
            V[ex, ey] * (1 - tx) * (1 - ty)
            + V[ex + 1, ey] * tx * (1 - ty)
            + V[ex, ey + 1] * (1 - tx) * ty
            + V[ex + 1, ey + 1] * tx * ty
        )
        return float(out) if np.ndim(out) == 0 else out


def nodal_interpolant_2d(u: Callable, mesh: UniformMesh1D) -> PiecewiseLinearFE2D:
    z = mesh.interior
    vals = np.broadcast_to(np.asarray(u(z[:, None], z[None, :]), dtype=float), (z.size, z.size))
    return PiecewiseLinearFE2D(mesh, vals)


# ---------------------------------------------------------------------------
# exact-solution fixtures


def _check_eps(epsilon):
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")


def fixture_f1_exact(epsilon: float) -> ScalarField:
    """Exact solution for f = 1: u(x) = x - (e^{x/eps} - 1)/(e^{1/eps} - 1)."""
    _check_eps(epsilon)
    denom = -np.expm1(-1.0 / epsilon)

    def u(x):
        x = np.asarray(x, dtype=float)
        return x - np.exp((x - 1.0) / epsilon) * (-np.expm1(-x / epsilon)) / denom

    return u


def fixture_f1_exact_prime(epsilon: float) -> ScalarField:
    _check_eps(epsilon)
    denom = -np.expm1(-1.0 / epsilon)

    def du(x):
        x = np.asarray(x, dtype=float)
        return 1.0 - np.exp((x - 1.0) / epsilon) / (epsilon * denom)

    return du


def _example1_parts(epsilon):
    if not 0 < epsilon < 1:
        raise ParameterError(f"the e^x fixture needs 0 < epsilon < 1, got {epsilon}")
    scale = 1.0 / (1.0 - epsilon)
    jump = (np.e - 1.0) / (-np.expm1(-1.0 / epsilon))
    return scale, jump


def fixture_example1_v(epsilon: float) -> ScalarField:
    """Solution of -eps v'' + v' = e^x, v(0) = v(1) = 0."""
    scale, jump = _example1_parts(epsilon)

    def v(x):
        x = np.asarray(x, dtype=float)
        return scale * (np.exp(x) - np.e - jump * (np.exp((x - 1.0) / epsilon) - 1.0))

    return v


def fixture_example1_v_prime(epsilon: float) -> ScalarField:
    scale, jump = _example1_parts(epsilon)

    def dv(x):
        x = np.asarray(x, dtype=float)
        return scale * (np.exp(x) - jump * np.exp((x - 1.0) / epsilon) / epsilon)

    return dv
