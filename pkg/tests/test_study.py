import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bubble_upg.errors import ParameterError
from bubble_upg.study import StudySpec, observed_order, run_study


def test_observed_order_examples():
    assert observed_order([0.04, 0.01]) == [pytest.approx(2.0)]
    assert observed_order([0.1, 0.05, 0.025]) == [pytest.approx(1.0), pytest.approx(1.0)]
    assert observed_order([0.1, 0.0, 0.01]) == [None, None]
    assert observed_order([1e-15, 1e-16]) == [None]
    assert observed_order([0.1, None, float("nan")]) == [None, None]
    # non-doubling sequences use the actual mesh ratio
    assert observed_order([1.0, 1 / 9], [2, 6]) == [pytest.approx(2.0)]


@given(st.floats(1e-10, 1e3), st.floats(-3, 6), st.integers(2, 6))
def test_observed_order_recovers_power_law(c, p, k):
    ns = [2**i for i in range(3, 3 + k)]
    errs = [c * n ** (-p) for n in ns]
    for o in observed_order(errs, ns):
        if o is not None:
            assert o == pytest.approx(p, abs=1e-9)


def test_spec_validation():
    with pytest.raises(ParameterError):
        StudySpec("ex", [32], epsilon=0.1)
    with pytest.raises(ParameterError):
        StudySpec("ex", [64, 32], epsilon=0.1)
    with pytest.raises(ParameterError):
        StudySpec("ex", [32, 64])
    with pytest.raises(ParameterError):
        StudySpec("nope", [32, 64], epsilon=0.1)
    with pytest.raises(ParameterError):
        StudySpec("example1", [256, 512], epsilon=1e-8)
    assert StudySpec("ex", [8, 16], epsilon_policy="ch2", epsilon_scale=0.5).epsilon_for(16) == 0.5 / 256


def test_nodal_exactness_study():
    r = run_study(StudySpec("f1", [8, 16, 32], epsilon=0.01, bubble="exponential"))
    assert all(row.disc_inf <= 1e-9 for row in r.rows)
    assert all(o is None for o in r.orders["disc_inf"])


def test_quadratic_study_order_and_bound():
    r = run_study(StudySpec("ex", [32, 64, 128, 256, 512, 1024], epsilon_policy="h2"))
    assert all(o >= 1.8 for o in r.orders["disc_inf"])
    for row in r.rows:
        assert row.hypothesis_flag
        assert row.disc_inf <= row.h**2 * (6 * np.e + 0.75 * np.e)
        assert row.disc_inf <= row.thm_bound


def test_zero_data_study():
    r = run_study(StudySpec("custom", [8, 16, 32], epsilon=0.01, terms=[(0.0, 0, 0.0)]))
    for row in r.rows:
        assert row.disc_inf == row.l2_full == row.l2_sub == row.h1_full == row.h1_sub == 0.0


def test_custom_study_uses_exact_reference():
    r = run_study(StudySpec("custom", [32, 64, 128], epsilon=1e-3, bubble="exponential", terms=[(1.0, 1, 1.0)]))
    assert all(row.disc_inf <= 1e-12 for row in r.rows)


def test_collapsed_bubble_costs_order_eps():
    # h/eps = 62.5 triggers the collapsed exponential bubble: nodal error is O(eps), not zero
    eps = 1e-3
    r = run_study(StudySpec("custom", [16, 20], epsilon=eps, bubble="exponential", terms=[(1.0, 1, 1.0)]))
    assert all(0 < row.disc_inf <= 5 * eps * math.e for row in r.rows)


def test_example1_study_orders():
    r = run_study(StudySpec("example1", [32, 64, 128], epsilon=1e-8, deltas=(0.01, 0.001), workers=3))
    assert [row.n for row in r.rows] == [32, 64, 128]
    assert all(o >= 0.8 for o in r.orders["h1_sub"])
    assert all(o >= 1.8 for o in r.orders["l2_sub"])
    assert all(o >= 1.8 for o in r.orders["disc_inf"])
    assert all(o >= 1.8 for o in r.orders["disc_inf_sub@0.001"])


def test_parallel_rows_match_serial():
    a = run_study(StudySpec("ex", [16, 32, 64, 128], epsilon=1e-4))
    b = run_study(StudySpec("ex", [16, 32, 64, 128], epsilon=1e-4, workers=4))
    assert [r.disc_inf for r in a.rows] == [r.disc_inf for r in b.rows]
    assert a.orders == b.orders


def test_failed_rows_are_recorded(monkeypatch):
    import bubble_upg.study as study

    real = study.solve_1d

    def flaky(problem, n, config=None):
        if n == 32:
            raise ArithmeticError("boom")
        return real(problem, n, config)

    monkeypatch.setattr(study, "solve_1d", flaky)
    r = run_study(StudySpec("ex", [16, 32, 64], epsilon=1e-3))
    assert r.rows[1].status.startswith("failed")
    assert r.orders["disc_inf"] == [None, None]
    assert r.rows[0].status == "ok"
