"""Convergence studies over sequences of uniform meshes."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .core import (
    Problem1D,
    eval_fe_1d_prime,
    fixture_example1_v,
    fixture_example1_v_prime,
    fixture_f1_exact,
    fixture_f1_exact_prime,
)
from .errors import ParameterError
from .solver1d import (
    DiscretizationConfig,
    discrete_inf_error,
    h1_semi_error,
    l2_error,
    solve_1d,
    thm_t_bound,
)
from .solver2d import assemble_2d, error_report_2d, fixture_example1, fixture_example2, solve_2d_fast

log = logging.getLogger(__name__)

PROBLEMS_1D = ("f1", "ex", "custom")
PROBLEMS_2D = ("example1", "example2")
ORDER_FLOOR = 1e-14

ERROR_COLUMNS = ("disc_inf", "l2_full", "l2_sub", "h1_full", "h1_sub")


@dataclass(frozen=True)
class StudySpec:
    """One convergence study.

    ``epsilon_policy`` is 'fixed' (use ``epsilon``), 'h2' (eps = h^2) or
    'ch2' (eps = epsilon_scale * h^2). ``deltas`` lists subdomain cut-offs
    (0, 1 - delta); the string 'h' means one mesh width. ``y_strip`` is the
    excluded strip at y = 0 and y = 1 for example2 (default 40 sqrt(eps)).
    2D meshes are capped at ``max_n_2d`` to keep runtimes at desk scale.
    """

    problem: str
    ns: Sequence[int]
    epsilon: Optional[float] = None
    epsilon_policy: str = "fixed"
    epsilon_scale: float = 1.0
    bubble: str = "quadratic"
    beta: Union[str, float] = "special"
    deltas: Sequence[Union[float, str]] = ()
    y_strip: Optional[float] = None
    terms: Sequence = ()
    workers: int = 1
    max_n_2d: int = 256

    def __post_init__(self):
        if self.problem not in PROBLEMS_1D + PROBLEMS_2D:
            raise ParameterError(f"unknown problem {self.problem!r}")
        ns = [int(n) for n in self.ns]
        if len(ns) < 2:
            raise ParameterError("a study needs at least two meshes")
        if any(b <= a for a, b in zip(ns, ns[1:])) or ns[0] < 2:
            raise ParameterError("mesh sequence must be strictly increasing with n >= 2")
        object.__setattr__(self, "ns", tuple(ns))
        if not self.is_1d and ns[-1] > self.max_n_2d:
            raise ParameterError(f"2D studies are capped at n <= {self.max_n_2d}; raise max_n_2d to go further")
        if self.epsilon_policy not in ("fixed", "h2", "ch2"):
            raise ParameterError(f"unknown epsilon policy {self.epsilon_policy!r}")
        if self.epsilon_policy == "fixed" and not (self.epsilon and self.epsilon > 0):
            raise ParameterError("fixed epsilon policy needs a positive epsilon")
        if self.problem == "custom" and not self.terms:
            raise ParameterError("custom problem needs poly-exp terms")
        if not self.deltas:
            object.__setattr__(self, "deltas", ("h",) if self.is_1d else (0.01,))
        DiscretizationConfig(self.bubble, self.beta)  # validates

    @property
    def is_1d(self) -> bool:
        return self.problem in PROBLEMS_1D

    def epsilon_for(self, n: int) -> float:
        h = 1.0 / n
        if self.epsilon_policy == "fixed":
            return float(self.epsilon)
        if self.epsilon_policy == "h2":
            return h * h
        return self.epsilon_scale * h * h


@dataclass
class StudyRow:
    n: int
    h: float
    epsilon: float
    disc_inf: Optional[float] = None
    l2_full: Optional[float] = None
    l2_sub: Optional[float] = None
    h1_full: Optional[float] = None
    h1_sub: Optional[float] = None
    disc_inf_sub: Optional[float] = None
    thm_bound: Optional[float] = None
    hypothesis_flag: Optional[bool] = None
    max_uh_sub: Optional[float] = None
    max_interp_sub: Optional[float] = None
    extra: dict = field(default_factory=dict)  # further deltas: name -> value
    status: str = "ok"


@dataclass
class StudyResult:
    spec: StudySpec
    rows: list
    orders: dict  # column -> list of consecutive-pair orders (None where undefined)

    def column(self, name: str) -> list:
        return [getattr(r, name) if hasattr(r, name) else r.extra.get(name) for r in self.rows]


def observed_order(errors: Sequence[Optional[float]], ns: Optional[Sequence[int]] = None) -> list:
    """log(e_i / e_{i+1}) / log(n_{i+1} / n_i); log2 of the ratio when the mesh width halves.

    Pairs with a missing, non-finite or tiny (<= 1e-14) error give None.
    """
    if ns is None:
        ns = [2**i for i in range(len(errors))]
    out = []
    for (a, na), (b, nb) in zip(zip(errors, ns), zip(errors[1:], ns[1:])):
        ok = all(v is not None and math.isfinite(v) and v > ORDER_FLOOR for v in (a, b))
        out.append(math.log(a / b) / math.log(nb / na) if ok else None)
    return out


def _delta_value(d, h):
    return h if d == "h" else float(d)


def _delta_name(d):
    return "h" if d == "h" else f"{float(d):g}"


def _reference_1d(spec: StudySpec, eps: float):
    if spec.problem == "f1":
        return Problem1D.from_terms(eps, [(1.0, 0, 0.0)], "f1"), fixture_f1_exact(eps), fixture_f1_exact_prime(eps)
    if spec.problem == "ex":
        return Problem1D.from_terms(eps, [(1.0, 0, 1.0)], "ex"), fixture_example1_v(eps), fixture_example1_v_prime(eps)
    return Problem1D.from_terms(eps, spec.terms, "custom"), None, None


def _row_1d(spec: StudySpec, n: int) -> StudyRow:
    eps = spec.epsilon_for(n)
    h = 1.0 / n
    row = StudyRow(n, h, eps)
    problem, u, du = _reference_1d(spec, eps)
    sol = solve_1d(problem, n, DiscretizationConfig(spec.bubble, spec.beta))
    if u is None:
        # the uncollapsed exponential-bubble scheme is nodally exact, so its
        # piecewise-linear solution stands in for the interpolant of u
        ref = solve_1d(problem, n, DiscretizationConfig("exponential", collapse=False)).u_h
        u, du = ref, (lambda x: eval_fe_1d_prime(ref, x))
    row.disc_inf = discrete_inf_error(u, sol)
    row.l2_full = l2_error(u, sol)
    row.h1_full = h1_semi_error(u, du, sol)
    for i, d in enumerate(spec.deltas):
        right = 1.0 - _delta_value(d, h)
        l2s = l2_error(u, sol, right)
        h1s = h1_semi_error(u, du, sol, right)
        if i == 0:
            row.l2_sub, row.h1_sub = l2s, h1s
        else:
            row.extra[f"l2_sub@{_delta_name(d)}"] = l2s
            row.extra[f"h1_sub@{_delta_name(d)}"] = h1s
    tb = thm_t_bound(problem, n)
    row.thm_bound, row.hypothesis_flag = tb.bound, tb.hypothesis
    return row


def _row_2d(spec: StudySpec, n: int) -> StudyRow:
    eps = spec.epsilon_for(n)
    row = StudyRow(n, 1.0 / n, eps)
    problem = fixture_example1(eps) if spec.problem == "example1" else fixture_example2(eps)
    strip = spec.y_strip
    if strip is None:
        strip = 40.0 * math.sqrt(eps) if spec.problem == "example2" else 0.0
    beta = None if spec.beta == "special" else float(spec.beta)
    sol = solve_2d_fast(assemble_2d(problem, n, beta))
    for i, d in enumerate(spec.deltas):
        rep = error_report_2d(problem, sol, _delta_value(d, row.h), strip)
        if i == 0:
            row.disc_inf, row.l2_full, row.h1_full = rep.disc_inf, rep.l2_full, rep.h1_full
            row.l2_sub, row.h1_sub, row.disc_inf_sub = rep.l2_sub, rep.h1_sub, rep.disc_inf_sub
            row.max_uh_sub, row.max_interp_sub = rep.max_uh_sub, rep.max_interp_sub
            if rep.empty_subdomain:
                row.status = "empty-subdomain"
        else:
            name = _delta_name(d)
            row.extra[f"disc_inf_sub@{name}"] = rep.disc_inf_sub
            row.extra[f"l2_sub@{name}"] = rep.l2_sub
            row.extra[f"h1_sub@{name}"] = rep.h1_sub
    return row


def _run_row(spec: StudySpec, n: int) -> StudyRow:
    try:
        return _row_1d(spec, n) if spec.is_1d else _row_2d(spec, n)
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        log.error("solve failed for n=%d: %s", n, exc)
        return StudyRow(n, 1.0 / n, spec.epsilon_for(n), status=f"failed: {exc}")


def run_study(spec: StudySpec) -> StudyResult:
    """Solve on every mesh, measure errors, and compute observed orders per column.

    Rows may run on a thread pool (``spec.workers``); results keep mesh order.
    """
    if spec.workers > 1:
        with ThreadPoolExecutor(spec.workers) as pool:
            rows = list(pool.map(lambda n: _run_row(spec, n), spec.ns))
    else:
        rows = [_run_row(spec, n) for n in spec.ns]

    names = list(ERROR_COLUMNS) + ["disc_inf_sub"]
    for r in rows:
        for k in r.extra:
            if k not in names:
                names.append(k)
    result = StudyResult(spec, rows, {})
    for name in names:
        vals = [None if r.status.startswith("failed") else v for v, r in zip(result.column(name), rows)]
        result.orders[name] = observed_order(vals, spec.ns)
    return result
