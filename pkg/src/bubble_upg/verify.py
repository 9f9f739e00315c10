"""Built-in verification suites: Green-matrix inverse, Green function in the test space, nodal exactness."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .core import Problem1D, fixture_example1_v, fixture_f1_exact
from .green import green_in_test_space_check, verify_inverse_identity
from .solver1d import DiscretizationConfig, discrete_inf_error, solve_1d

INVERSE_GRID = ((4, 16, 64), (0.1, 1e-3, 1e-6))
INVERSE_TOL = 1e-8
TEST_SPACE_GRID = ((4, 16), (0.1, 0.01))
TEST_SPACE_TOL = 1e-10
EXACTNESS_GRID = ((8, 16, 32), (0.1, 0.01))
EXACTNESS_TOL = 1e-9
EXACTNESS_MAX_RATIO = 20.0  # h/eps


@dataclass(frozen=True)
class CheckResult:
    suite: str
    case: str
    residual: float
    threshold: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.threshold)


def inverse_suite(perturb: float = 0.0) -> List[CheckResult]:
    out = []
    for n in INVERSE_GRID[0]:
        for eps in INVERSE_GRID[1]:
            r = verify_inverse_identity(n, eps, perturb)
            out.append(CheckResult("inverse-identity", f"n={n}, eps={eps:g}", r, INVERSE_TOL))
    return out


def green_space_suite() -> List[CheckResult]:
    out = []
    for n in TEST_SPACE_GRID[0]:
        for eps in TEST_SPACE_GRID[1]:
            r = max(green_in_test_space_check(n, eps, j) for j in range(1, n))
            out.append(CheckResult("green-in-test-space", f"n={n}, eps={eps:g}", r, TEST_SPACE_TOL))
    return out


def exactness_suite() -> List[CheckResult]:
    out = []
    cfg = DiscretizationConfig("exponential")
    for n in EXACTNESS_GRID[0]:
        for eps in EXACTNESS_GRID[1]:
            if 1.0 / (n * eps) > EXACTNESS_MAX_RATIO:
                continue
            for label, terms, exact in (("f=1", [(1.0, 0, 0.0)], fixture_f1_exact),
                                        ("f=e^x", [(1.0, 0, 1.0)], fixture_example1_v)):
                sol = solve_1d(Problem1D.from_terms(eps, terms, label), n, cfg)
                r = discrete_inf_error(exact(eps), sol)
                out.append(CheckResult("nodal-exactness", f"{label}, n={n}, eps={eps:g}", r, EXACTNESS_TOL))
    return out


def run_all(perturb: float = 0.0) -> List[CheckResult]:
    return inverse_suite(perturb) + green_space_suite() + exactness_suite()


def markdown_report(results: List[CheckResult]) -> str:
    ok = all(r.passed for r in results)
    lines = [
        "# Verification report\n",
        f"Overall: {'PASS' if ok else 'FAIL'} ({sum(r.passed for r in results)}/{len(results)} checks)\n",
        "| suite | case | residual | threshold | result |",
        "|---|---|---|---|---|",
    ]
    for r in results:
        lines.append(f"| {r.suite} | {r.case} | {r.residual:.3e} | {r.threshold:.0e} | {'pass' if r.passed else 'FAIL'} |")
    return "\n".join(lines) + "\n"
