import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from bubble_upg.assembly import assemble_rhs_1d, assemble_upg_matrix
from bubble_upg.bubbles import BubbleSpec, exponential_average
from bubble_upg.core import Problem1D, UniformMesh1D, fixture_f1_exact
from bubble_upg.errors import DomainError
from bubble_upg.green import (
    exponential_test_functions,
    green_in_test_space_check,
    green_matrix,
    green_value,
    verify_inverse_identity,
)

# 40-digit mpmath values of the textbook (overflow-prone) form of G
GREEN_REFERENCE = [
    (0.25, 0.5, 0.1, 0.07484276504070405746223558928),
    (0.5, 0.25, 0.1, 0.9117715331107262314190404500),
    (0.75, 0.8125, 0.01, 0.001930454122339765377249491381),
    (0.5, 0.5, 0.001, 1.0),
]


@pytest.mark.parametrize("x,s,eps,ref", GREEN_REFERENCE)
def test_green_reference_values(x, s, eps, ref):
    assert green_value(x, s, eps) == pytest.approx(ref, rel=1e-13)


def test_green_boundary_zeros():
    x = np.linspace(0, 1, 11)
    assert np.all(green_value(x, 0.0, 0.01) == 0)
    assert np.all(np.abs(green_value(x, 1.0, 0.01)) <= 1e-300)
    with pytest.raises(DomainError):
        green_value(1.5, 0.5, 0.1)
    with pytest.raises(DomainError):
        green_value(0.5, 0.5, 0.0)


@given(st.floats(0, 1), st.floats(1e-4, 10))
def test_green_continuous_across_diagonal(x, eps):
    a = green_value(x, np.nextafter(x, -1) if x > 0 else x, eps)
    b = green_value(x, x, eps)
    assert abs(a - b) <= 1e-13


@pytest.mark.parametrize("x", [0.25, 0.5, 0.9])
def test_green_integral_reproduces_constant_data_solution(x):
    eps = 0.05
    val, _ = quad(lambda s: green_value(x, s, eps), 0, 1, points=[x], epsabs=1e-13, limit=200)
    assert val == pytest.approx(fixture_f1_exact(eps)(x), abs=1e-8)


def test_green_matrix_properties():
    G = green_matrix(8, 0.01).entries
    assert np.all(G >= 0)
    g2 = green_matrix(2, 0.3).entries
    assert g2.shape == (1, 1) and g2[0, 0] == green_value(0.5, 0.5, 0.3)
    A = assemble_upg_matrix(2, 0.3, exponential_average(0.5, 0.3))
    assert A.diag[0] * g2[0, 0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.isfinite(green_matrix(64, 1e-12).entries))


def test_green_rows_give_nodal_values():
    n, eps = 16, 0.02
    mesh = UniformMesh1D(n)
    F = assemble_rhs_1d(Problem1D.from_terms(eps, [(1.0, 0, 0.0)]), mesh, BubbleSpec.exponential(mesh.h, eps))
    u = green_matrix(n, eps).entries @ F
    np.testing.assert_allclose(u, fixture_f1_exact(eps)(mesh.interior), atol=1e-10)


@pytest.mark.parametrize("n,eps,tol", [(16, 0.01, 1e-8), (32, 1e-4, 1e-8), (2, 0.7, 1e-12), (2, 1e-5, 1e-12)])
def test_inverse_identity(n, eps, tol):
    assert verify_inverse_identity(n, eps) <= tol


def test_inverse_identity_detects_perturbation():
    assert verify_inverse_identity(16, 0.01, perturb=1e-3) > 1e-4


def test_green_in_test_space():
    assert green_in_test_space_check(4, 0.1, 2) <= 1e-11
    assert max(green_in_test_space_check(8, 0.01, j) for j in range(1, 8)) <= 1e-10
    with pytest.raises(DomainError):
        green_in_test_space_check(8, 0.01, 8)


def test_test_functions_are_nodal():
    n, eps = 8, 0.05
    g = exponential_test_functions(np.arange(1, n) / n, n, eps)
    np.testing.assert_allclose(g, np.eye(n - 1), atol=1e-13)


def test_off_diagonal_decay():
    n = 16
    h = 1 / n
    eps = h / 10
    G = green_matrix(n, eps).entries
    bound = np.exp(-h / eps)
    for j in range(1, n):
        for i in range(2, n):
            if i in (1, j + 1):
                continue
            assert abs(G[j - 1, i - 1] - G[j - 1, i - 2]) <= bound + 1e-15
