"""End-to-end 1D UPG solves and error measurement."""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from .assembly import assemble_rhs_1d, assemble_upg_matrix
from .bubbles import BubbleSpec
from .core import PiecewiseLinearFE1D, Problem1D, UniformMesh1D
from .errors import BoundUnavailableError, DomainError, ParameterError
from .linsolve import solve_tridiagonal
from .quadrature import ERROR_GAUSS_POINTS, LAYER_REACH, composite_rule, right_layer_breaks


@dataclass(frozen=True)
class DiscretizationConfig:
    """Bubble family and scaling policy.

    ``beta`` is 'special' (match the exponential bubble's average) or a
    positive number; it is ignored for the exponential family.
    """

    bubble: str = "quadratic"
    beta: Union[str, float] = "special"
    collapse: bool = True
    rhs_method: str = "auto"

    def __post_init__(self):
        if self.bubble not in ("quadratic", "exponential"):
            raise ParameterError(f"unknown bubble family {self.bubble!r}")
        if isinstance(self.beta, str):
            if self.beta != "special":
                raise ParameterError(f"beta policy must be 'special' or a number, got {self.beta!r}")
        elif not self.beta > 0:
            raise ParameterError(f"beta must be positive, got {self.beta}")

    def bubble_spec(self, h: float, epsilon: float) -> BubbleSpec:
        if self.bubble == "quadratic":
            return BubbleSpec.quadratic(h, epsilon, self.beta)
        return BubbleSpec.exponential(h, epsilon, self.collapse)


@dataclass(frozen=True)
class Solution1D:
    u_h: PiecewiseLinearFE1D
    config: DiscretizationConfig
    epsilon: float
    residual: float
    bubble: BubbleSpec

    @property
    def mesh(self) -> UniformMesh1D:
        return self.u_h.mesh


def solve_1d(problem: Problem1D, n: int, config: Optional[DiscretizationConfig] = None) -> Solution1D:
    """Solve ((eps/h + b) S + C) U = F for the interior nodal values."""
    config = config or DiscretizationConfig()
    mesh = UniformMesh1D(n)
    spec = config.bubble_spec(mesh.h, problem.epsilon)
    A = assemble_upg_matrix(n, problem.epsilon, spec.average_b)
    F = assemble_rhs_1d(problem, mesh, spec, method=config.rhs_method)
    U, res = solve_tridiagonal(A, F)
    return Solution1D(PiecewiseLinearFE1D(mesh, U), config, problem.epsilon, res, spec)


# ---------------------------------------------------------------------------
# errors


def _fe(sol) -> PiecewiseLinearFE1D:
    return sol.u_h if isinstance(sol, Solution1D) else sol


def discrete_inf_error(u_exact, sol) -> float:
    """max_j |u(x_j) - u_j| over interior nodes."""
    v = _fe(sol)
    if v.mesh.n < 2 or v.coeffs.size == 0:
        return 0.0
    return float(np.max(np.abs(np.asarray(u_exact(v.mesh.interior)) - v.coeffs)))


def _error_rule(v: PiecewiseLinearFE1D, sub_right: float, layer_width: Optional[float]):
    if not 0.0 < sub_right <= 1.0:
        raise DomainError(f"subdomain right end must lie in (0, 1], got {sub_right}")
    breaks = [sub_right] if sub_right < 1.0 else []
    if layer_width is not None and LAYER_REACH * layer_width < 1.0:
        breaks = np.concatenate((breaks, right_layer_breaks(layer_width, 1 / 8)))
    rule = composite_rule(v.mesh.n, global_breaks=breaks, npts=ERROR_GAUSS_POINTS)
    if sub_right < 1.0:
        rule = rule.restrict(rule.x < sub_right)
    return rule


def _layer_width(sol, layer_width):
    if layer_width is not None:
        return layer_width
    return sol.epsilon if isinstance(sol, Solution1D) else None


def l2_error(u_exact, sol, sub_right: float = 1.0, layer_width: Optional[float] = None) -> float:
    """||u - u_h|| on [0, sub_right]; elements near an x = 1 layer are graded first."""
    v = _fe(sol)
    rule = _error_rule(v, sub_right, _layer_width(sol, layer_width))
    vals = v.nodal_values
    s = rule.t * v.mesh.n
    uh = vals[rule.elem] * (1.0 - s) + vals[rule.elem + 1] * s
    e = np.asarray(u_exact(rule.x)) - uh
    return float(np.sqrt(np.sum(rule.w * e * e)))


def h1_semi_error(u_exact, u_exact_prime, sol, sub_right: float = 1.0, layer_width: Optional[float] = None) -> float:
    """|u - u_h|_{H^1} on [0, sub_right]. ``u_exact`` is accepted for symmetry with l2_error."""
    v = _fe(sol)
    rule = _error_rule(v, sub_right, _layer_width(sol, layer_width))
    slopes = np.diff(v.nodal_values) * v.mesh.n
    e = np.asarray(u_exact_prime(rule.x)) - slopes[rule.elem]
    return float(np.sqrt(np.sum(rule.w * e * e)))


def fe_norms(v: PiecewiseLinearFE1D):
    """Exact (|v|_{H^1}, ||v||_{L^2}, max_j |v_j|) of a piecewise-linear function."""
    h = v.mesh.h
    a = v.nodal_values
    d = np.diff(a)
    h1 = np.sqrt(np.sum(d * d) / h)
    l2 = np.sqrt(np.sum(h / 3.0 * (a[:-1] ** 2 + a[:-1] * a[1:] + a[1:] ** 2)))
    inf = float(np.max(np.abs(a)))
    return float(h1), float(l2), inf


def norm_inequality_check(v: PiecewiseLinearFE1D):
    """(h/(2 sqrt 3)) |v|, ||v||, ||v||_{h,inf}; the three are nondecreasing for every FE function."""
    h1, l2, inf = fe_norms(v)
    return v.mesh.h / (2.0 * np.sqrt(3.0)) * h1, l2, inf


class ThmBound(NamedTuple):
    bound: float
    hypothesis: bool  # exp(-h/eps) <= h
    f_sup: float
    fp_sup: float


def _sup(g, samples: int = 10_001) -> float:
    x = np.linspace(0.0, 1.0, samples)
    return float(np.max(np.abs(np.broadcast_to(g(x), x.shape))))


def thm_t_bound(problem: Problem1D, n: int) -> ThmBound:
    """6 eps ||f||_inf + (3/4) h^2 ||f'||_inf for the specially scaled quadratic bubble.

    Sup norms come from dense sampling on [0, 1] (endpoints included). The
    bound is only claimed when ``hypothesis`` holds.
    """
    if problem.f_prime is None:
        raise BoundUnavailableError("the nodal error bound needs f'")
    h = 1.0 / n
    fs = _sup(problem.f)
    fps = _sup(problem.f_prime)
    hyp = bool(np.exp(-h / problem.epsilon) <= h)
    return ThmBound(6.0 * problem.epsilon * fs + 0.75 * h * h * fps, hyp, fs, fps)


@dataclass(frozen=True)
class ErrorReport1D:
    disc_inf: float
    l2_full: float
    h1_full: float
    l2_sub: float
    h1_sub: float
    delta: float
    thm_bound: Optional[float] = None
    hypothesis: Optional[bool] = None


def error_report_1d(u_exact, u_exact_prime, sol: Solution1D, delta: Optional[float] = None,
                    problem: Optional[Problem1D] = None) -> ErrorReport1D:
    """All error measures for one solve; ``delta`` defaults to h (subdomain [0, 1 - h])."""
    h = sol.mesh.h
    delta = h if delta is None else delta
    bound = hyp = None
    if problem is not None and problem.f_prime is not None:
        tb = thm_t_bound(problem, sol.mesh.n)
        bound, hyp = tb.bound, tb.hypothesis
    return ErrorReport1D(
        disc_inf=discrete_inf_error(u_exact, sol),
        l2_full=l2_error(u_exact, sol),
        h1_full=h1_semi_error(u_exact, u_exact_prime, sol),
        l2_sub=l2_error(u_exact, sol, 1.0 - delta),
        h1_sub=h1_semi_error(u_exact, u_exact_prime, sol, 1.0 - delta),
        delta=delta,
        thm_bound=bound,
        hypothesis=hyp,
    )
