import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from bubble_upg.bubbles import (
    BubbleSpec,
    bubble_average,
    eval_exponential_bubble,
    eval_quadratic_bubble,
    exponential_average,
    special_beta,
    tanh_half_ratio,
)
from bubble_upg.errors import DomainError

# 40-digit mpmath references
TANH_1 = 0.7615941559557648881194582826
BETA_AT_H_2EPS = 0.2347764641244984777271209352
EXP_AVG_AT_H_2EPS = 0.1565176427496656518180806235

ratios = st.floats(1e-6, 1e6)


def test_tanh_half_ratio():
    assert tanh_half_ratio(1e-2, 1e-10) == pytest.approx(1.0, abs=1e-15)
    assert tanh_half_ratio(0.02, 0.01) == pytest.approx(TANH_1, abs=1e-15)
    assert tanh_half_ratio(1e-12, 1.0) < 1e-12
    with pytest.raises(DomainError):
        tanh_half_ratio(0.0, 1.0)


def test_special_beta_values():
    assert special_beta(0.02, 0.01) == pytest.approx(BETA_AT_H_2EPS, abs=1e-14)
    # the quoted 7-digit value is 0.2347766; the exact value rounds to 0.2347765
    assert special_beta(0.02, 0.01) == pytest.approx(0.2347766, abs=2e-7)

def test_special_beta_approaches_three_quarters_algebraically():
    # once coth saturates, beta = 3/4 - (3/2) eps/h exactly: the approach is O(eps/h)
    for h_over_eps in (60.0, 1e3, 1e8, 1e13):
        beta = special_beta(1.0, 1.0 / h_over_eps)
        assert 0.75 - beta == pytest.approx(1.5 / h_over_eps, rel=1e-9)
    assert special_beta(1.0, 1e-13) == pytest.approx(0.75, abs=1e-12)


@given(st.floats(1e-4, 1.0), ratios)
def test_special_beta_consistency(h, r):
    eps = h / r
    t = tanh_half_ratio(h, eps)
    assert abs(2 * special_beta(h, eps) / 3 + eps / h - 1 / (2 * t)) <= 1e-14 * max(1.0, eps / h)


def test_special_beta_bounds_and_monotone():
    r = np.logspace(-6, 8, 1000)
    b = np.array([special_beta(1.0, 1.0 / x) for x in r])
    assert np.all(b > 0) and np.all(b < 0.75 + 1e-16)
    assert np.all(np.diff(b) >= 0)
    assert np.all(np.diff(b[:900]) > 0)  # strict until the 3/4 plateau is reached in double


def test_quadratic_bubble():
    h, beta = 0.1, 0.3
    assert eval_quadratic_bubble(0.0, h, beta) == 0.0
    assert eval_quadratic_bubble(h, h, beta) == 0.0
    assert eval_quadratic_bubble(h / 2, h, beta) == pytest.approx(beta, rel=1e-15)
    x, w = np.polynomial.legendre.leggauss(64)
    t = (x + 1) * h / 2
    avg = np.sum(w * h / 2 * eval_quadratic_bubble(t, h, beta)) / h
    assert avg == pytest.approx(2 * beta / 3, abs=1e-14)
    with pytest.raises(DomainError):
        eval_quadratic_bubble(1.1 * h, h, beta)


@pytest.mark.parametrize("h,eps", [(0.1, 0.1), (0.1, 0.01), (0.02, 0.01), (0.5, 0.05)])
def test_exponential_bubble_average(h, eps):
    assert eval_exponential_bubble(0.0, h, eps) == 0.0
    assert abs(eval_exponential_bubble(h, h, eps)) <= 1e-15
    val, _ = quad(lambda t: eval_exponential_bubble(t, h, eps), 0, h, epsabs=1e-15, epsrel=1e-13, limit=200,
                  points=[min(h / 2, 5 * eps)])
    assert val / h == pytest.approx(1 / (2 * tanh_half_ratio(h, eps)) - eps / h, abs=1e-12)


def test_exponential_bubble_collapse():
    h = 0.1
    for eps in (h / 40, h / 1e3, 1e-12):
        assert eval_exponential_bubble(h / 2, h, eps) == pytest.approx(0.5, abs=1e-12)
    # the uncollapsed formula and the collapse agree away from the layer
    # the collapse drops terms of size exp(-t/eps)
    t = np.linspace(0.0, h, 41)
    eps = h / 40
    diff = np.abs(eval_exponential_bubble(t, h, eps, collapse=False) - eval_exponential_bubble(t, h, eps))
    assert np.all(diff <= np.exp(-t / eps) + 1e-15)
    with pytest.raises(DomainError):
        eval_exponential_bubble(-0.01, h, 0.01)


@given(st.floats(1e-3, 1.0), ratios, st.floats(0, 1))
def test_bubbles_nonnegative(h, r, s):
    eps = h / r
    assert eval_exponential_bubble(s * h, h, eps) >= 0
    assert eval_exponential_bubble(s * h, h, eps, collapse=False) >= 0
    assert eval_quadratic_bubble(s * h, h, special_beta(h, eps)) >= 0


def test_bubble_average_examples():
    assert bubble_average(BubbleSpec.quadratic(0.1, 0.01, 0.75)) == 0.5
    assert bubble_average(BubbleSpec.exponential(0.02, 0.01)) == pytest.approx(EXP_AVG_AT_H_2EPS, abs=1e-14)


@given(st.floats(1e-4, 1.0), ratios)
def test_special_quadratic_matches_exponential_average(h, r):
    eps = h / r
    q = bubble_average(BubbleSpec.quadratic(h, eps))
    e = bubble_average(BubbleSpec.exponential(h, eps))
    assert abs(q - e) <= 1e-14
    assert exponential_average(h, eps) == e
