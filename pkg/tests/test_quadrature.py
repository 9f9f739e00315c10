import numpy as np
import pytest

from bubble_upg.quadrature import (
    composite_rule,
    gauss_legendre,
    graded_distances,
    left_layer_breaks,
    piece_rule,
    right_layer_breaks,
)


def test_gauss_rule_exact_for_degree_nine():
    x, w = gauss_legendre(5)
    assert np.sum(w) == pytest.approx(2.0, abs=1e-15)
    assert np.sum(w * x**8) == pytest.approx(2 / 9, abs=1e-15)


def test_graded_distances_double_up_to_reach():
    d = graded_distances(0.01, 0.0025, 0.4)
    np.testing.assert_allclose(d[:4], [0.0025, 0.005, 0.01, 0.02])
    assert d[-1] == pytest.approx(0.4)
    assert np.all(np.diff(d) > 0)


def test_piece_rule_refinement_keeps_integrals():
    b = np.array([0.0, 0.3, 1.0])
    for refine in range(4):
        x, w = piece_rule(b, refine=refine)
        assert np.sum(w) == pytest.approx(1.0, abs=1e-15)
        assert np.sum(w * np.exp(x)) == pytest.approx(np.e - 1, abs=5e-14)
        assert x.size == 5 * 2 * 2**refine


def test_composite_rule_hat_partition_of_unity():
    n = 8
    r = composite_rule(n, global_breaks=right_layer_breaks(1e-3))
    assert np.sum(r.w) == pytest.approx(1.0, abs=1e-14)
    P = r.hat_matrix()
    # hats integrate to h, their slopes to zero
    np.testing.assert_allclose(r.w @ P, 1 / n, atol=1e-15)
    np.testing.assert_allclose(r.w @ r.hat_slope_matrix(), 0.0, atol=1e-12)
    assert np.all((r.t >= 0) & (r.t <= 1 / n))


def test_layer_breaks_resolve_exponential_layer():
    eps = 1e-6
    r = composite_rule(16, global_breaks=right_layer_breaks(eps))
    val = np.sum(r.w * np.exp((r.x - 1) / eps))
    assert val == pytest.approx(eps * (1 - np.exp(-1 / eps)), rel=1e-12)
    r = composite_rule(16, global_breaks=left_layer_breaks(eps))
    assert np.sum(r.w * np.exp(-r.x / eps)) == pytest.approx(eps, rel=1e-12)
