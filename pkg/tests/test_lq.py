import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arcwalk.lq import (CriticalPoint, LqQuery, UndeterminedError, classify_critical_point,
                        conditional_median, golden_section, lq_derivative_at_x,
                        lq_minimizer, lq_objective)
from arcwalk.seeding import make_rng


def mc_objective(query, z, n, seed):
    """Monte Carlo oracle for E|z - X|^q under the one-step law."""
    g = make_rng(seed)
    left = g.random(n) < query.w0
    u = g.random(n)
    xs = np.where(left, query.x * u, query.x + (1 - query.x) * u)
    vals = np.abs(z - xs) ** query.q
    return vals.mean(), vals.std() / np.sqrt(n)


def test_objective_examples():
    assert lq_objective(LqQuery(0, 2, 0.5), 0.5) == pytest.approx(1 / 12)
    for x in (0.2, 0.7):
        for z in (0.0, 0.3, 0.9):
            assert lq_objective(LqQuery(1, 2, x), z) == pytest.approx(z * z - z + 1 / 3)
    assert lq_objective(LqQuery(0, 1, 0.3), 0.3) == pytest.approx(0.25)


def test_objective_against_monte_carlo():
    q = LqQuery(0, 1, 0.3)
    est, se = mc_objective(q, 0.3, 1_000_000, seed=8)
    assert abs(lq_objective(q, 0.3) - est) < 4 * se
    q = LqQuery(-0.7, 2.6, 0.15)
    est, se = mc_objective(q, 0.6, 1_000_000, seed=9)
    assert abs(lq_objective(q, 0.6) - est) < 4 * se


def test_derivative_examples():
    for q in (0.3, 1.0, 2.0, 3.5):
        for x in (0.1, 0.42, 0.9):
            assert lq_derivative_at_x(LqQuery(1 - q, q, x)) == 0.0
    assert lq_derivative_at_x(LqQuery(0, 2, 0.3)) == pytest.approx(-0.2)
    # conditional mean x/2 + 1/4 gives f'(x) = 2 (x - mean)
    assert lq_derivative_at_x(LqQuery(0, 2, 0.3)) == pytest.approx(2 * (0.3 - 0.4))
    for p, q in [(0.3, 1.4), (-2.0, 0.5), (4.0, 2.0)]:
        assert lq_derivative_at_x(LqQuery(p, q, 0.5)) == pytest.approx(0.0, abs=1e-15)


def test_derivative_matches_finite_differences(richardson_fd):
    g = make_rng(17)
    h = 1e-6
    for _ in range(200):
        p = g.uniform(-3, 3)
        q = g.uniform(1, 4)
        x = g.uniform(0.05, 0.95)
        query = LqQuery(p, q, x)
        fd = richardson_fd(query, h)
        d = lq_derivative_at_x(query)
        assert abs(d - fd) <= 1e-5 * max(abs(fd), 1e-3), (p, q, x)



def test_derivative_matches_finite_differences_below_one(richardson_fd):
    g = make_rng(18)
    for _ in range(200):
        query = LqQuery(g.uniform(-3, 3), g.uniform(0.2, 1.0), g.uniform(0.05, 0.95))
        fd = richardson_fd(query, 1e-6)
        assert abs(lq_derivative_at_x(query) - fd) <= 1e-5 * max(abs(fd), 1e-3), query


def test_query_validation():
    with pytest.raises(ValueError):
        LqQuery(0, 0, 0.5)
    with pytest.raises(ValueError):
        LqQuery(0, 2, 1.0)


def test_golden_section():
    assert golden_section(lambda z: (z - 0.3) ** 2, 0, 1) == pytest.approx(0.3, abs=1e-8)
    # minimum at the boundary
    assert golden_section(lambda z: z, 0, 1) == 0.0


def test_minimizer_examples():
    assert lq_minimizer(LqQuery(0, 1, 0.3)) == pytest.approx(0.3, abs=1e-12)
    assert lq_minimizer(LqQuery(-1, 2, 0.3)) == pytest.approx(0.3, abs=1e-7)
    for x in (0.1, 0.6):
        assert lq_minimizer(LqQuery(1, 2, x)) == pytest.approx(0.5, abs=1e-7)
    with pytest.raises(ValueError):
        lq_minimizer(LqQuery(0.5, 0.5, 0.3))


def test_median_is_half_cdf_point():
    for p, x in [(2.0, 0.3), (-1.0, 0.8), (0.0, 0.45)]:
        query = LqQuery(p, 1, x)
        m = conditional_median(query)
        w0 = query.w0
        cdf = w0 * m / x if m <= x else w0 + (1 - w0) * (m - x) / (1 - x)
        assert cdf == pytest.approx(0.5, abs=1e-14)


@pytest.mark.parametrize("q", [1.0, 1.5, 2.0, 3.0])
def test_minimizer_is_current_state(q):
    xs = [k / 20 for k in range(1, 20)]
    gap = max(abs(lq_minimizer(LqQuery(1 - q, q, x)) - x) for x in xs)
    assert gap <= 1e-6


def test_negative_control():
    m = lq_minimizer(LqQuery(0, 2, 0.3))
    assert abs(m - 0.3) == pytest.approx(0.1, abs=1e-6)


@settings(max_examples=50)
@given(st.floats(-2, 2), st.floats(1.01, 4), st.floats(0.05, 0.95))
def test_objective_is_convex_for_q_above_one(p, q, x):
    query = LqQuery(p, q, x)
    z = np.linspace(0, 1, 81)
    f = np.array([lq_objective(query, v) for v in z])
    assert np.all(f[:-2] - 2 * f[1:-1] + f[2:] >= -1e-12)


def test_classify_examples():
    assert classify_critical_point(LqQuery(-1, 2, 0.3)) is CriticalPoint.MINIMUM
    assert classify_critical_point(LqQuery(0.5, 0.5, 0.3)) is CriticalPoint.INFLECTION
    assert classify_critical_point(LqQuery(0, 1, 0.5)) is CriticalPoint.MINIMUM


@pytest.mark.parametrize("q", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("x", [0.2, 0.3, 0.4])
def test_inflection_suite(q, x):
    assert classify_critical_point(LqQuery(1 - q, q, x)) is CriticalPoint.INFLECTION


def test_classify_requires_critical_point():
    with pytest.raises(ValueError):
        classify_critical_point(LqQuery(0, 2, 0.3))


def test_classify_reports_disagreement():
    # the odd term only wins below ~2e-3 here, so a coarse step disagrees
    with pytest.raises(UndeterminedError):
        classify_critical_point(LqQuery(0.25, 0.75, 0.4), steps=(1e-2, 1e-4))


def test_symmetric_point_is_not_an_inflection():
    # x = 1/2: the law is uniform(0, 1) and f(z) ~ z**(q+1) + (1-z)**(q+1)
    assert classify_critical_point(LqQuery(0.5, 0.5, 0.5)) is CriticalPoint.MINIMUM
