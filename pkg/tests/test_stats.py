import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from oracles import r_from_t, two_tailed_p_by_quadrature
from vocalmir.errors import DegenerateSample, EmptyInput, LengthMismatch, NonConvergence, ZeroVariance
from vocalmir.stats import (
    Sample,
    correlate,
    mean,
    p_value_two_tailed,
    pearson_r,
    regularized_incomplete_beta,
    t_statistic,
)

TABLE1_AMBITUS = [27, 17, 17, 15, 15, 14, 13, 12, 10, 9, 8]
TABLE2_ENTROPY = [0.854020, 0.778169, 0.741163, 0.737659, 0.724993, 0.722081, 0.717530, 0.706387, 0.699415,
                  0.682210]


def test_mean_examples():
    assert mean(TABLE1_AMBITUS) == pytest.approx(14.27, abs=0.005)
    assert mean(Sample((5,))) == 5
    assert mean(TABLE2_ENTROPY) == pytest.approx(0.73636, abs=1e-5)


def test_mean_empty():
    with pytest.raises(EmptyInput):
        mean([])


def test_sample_rejects_nan():
    with pytest.raises(ValueError):
        Sample((1.0, math.nan))
    with pytest.raises(ValueError):
        mean([1.0, math.inf])


def test_pearson_examples():
    assert pearson_r([1, 2, 3, 4], [1, 2, 3, 4]) == 1.0
    assert pearson_r([1, 2, 3, 4], [-2 * x + 7 for x in [1, 2, 3, 4]]) == -1.0
    # sxy = 8, sxx = syy = 10
    assert pearson_r([1, 2, 3, 4, 5], [2, 1, 4, 3, 5]) == pytest.approx(0.8, abs=1e-15)


def test_pearson_errors():
    with pytest.raises(LengthMismatch):
        pearson_r([1, 2, 3], [1, 2])
    with pytest.raises(ZeroVariance):
        pearson_r([1, 2, 3], [4, 4, 4])
    with pytest.raises(EmptyInput):
        pearson_r([], [])
    with pytest.raises(DegenerateSample):
        pearson_r([1, 2], [3, 4])


samples = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=3, max_size=30)


@given(samples, st.floats(0.01, 100), st.floats(-100, 100), st.randoms(use_true_random=False))
def test_pearson_affine_invariance(x, a, b, rnd):
    y = [rnd.uniform(-10, 10) for _ in x]
    assume(np.std(x) > 1e-3 and np.std(y) > 1e-3)
    r = pearson_r(x, y)
    assert -1.0 <= r <= 1.0
    assert pearson_r([a * v + b for v in x], y) == pytest.approx(r, abs=1e-9)
    assert pearson_r([-a * v + b for v in x], y) == pytest.approx(-r, abs=1e-9)


def test_p_value_examples():
    assert p_value_two_tailed(0.0, 3) == 1.0
    assert p_value_two_tailed(0.0, 50) == 1.0
    assert p_value_two_tailed(-0.476, 10) == pytest.approx(0.165, abs=0.002)
    assert p_value_two_tailed(-0.0775, 9) == pytest.approx(0.843, abs=0.002)
    assert p_value_two_tailed(1.0, 10) == 0.0
    assert p_value_two_tailed(-1.0 + 1e-13, 10) == 0.0


def test_p_value_degenerate():
    with pytest.raises(DegenerateSample):
        p_value_two_tailed(0.5, 2)
    with pytest.raises(ValueError):
        p_value_two_tailed(1.5, 10)


@pytest.mark.parametrize("n", [4, 5, 10, 30])
def test_p_value_monotone_and_symmetric(n):
    rs = np.linspace(0, 0.999, 200)
    ps = [p_value_two_tailed(r, n) for r in rs]
    assert all(b < a for a, b in zip(ps, ps[1:]))
    for r in rs[::17]:
        assert p_value_two_tailed(r, n) == p_value_two_tailed(-r, n)


def test_p_value_matches_quadrature_oracle():
    worst = 0.0
    for dof in range(1, 31):
        n = dof + 2
        for t in np.linspace(-5, 5, 41):
            r = r_from_t(float(t), n)
            worst = max(worst, abs(p_value_two_tailed(r, n) - two_tailed_p_by_quadrature(float(t), dof)))
    assert worst < 1e-6


def test_incomplete_beta_examples():
    assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
    assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0
    assert regularized_incomplete_beta(0.5, 0.5, 0.5) == pytest.approx(0.5, abs=1e-12)
    # arcsine law: I_x(1/2, 1/2) = (2/pi) asin(sqrt x)
    assert regularized_incomplete_beta(0.5, 0.5, 0.25) == pytest.approx(1 / 3, abs=1e-12)
    for x in np.linspace(0.01, 0.99, 25):
        assert regularized_incomplete_beta(0.5, 0.5, x) == pytest.approx(
            2 / math.pi * math.asin(math.sqrt(x)), abs=1e-10)


def test_incomplete_beta_closed_forms():
    for x in np.linspace(0.01, 0.99, 25):
        assert regularized_incomplete_beta(1.0, 1.0, x) == pytest.approx(x, abs=1e-12)
        assert regularized_incomplete_beta(2.0, 1.0, x) == pytest.approx(x * x, abs=1e-12)
        assert regularized_incomplete_beta(1.0, 3.0, x) == pytest.approx(1 - (1 - x) ** 3, abs=1e-12)


def test_incomplete_beta_symmetry_grid():
    for a in (0.5, 1, 2, 4):
        for b in (0.5, 1, 2, 4):
            for x in np.arange(1, 10) / 10:
                total = regularized_incomplete_beta(a, b, x) + regularized_incomplete_beta(b, a, 1 - x)
                assert total == pytest.approx(1.0, abs=1e-9)


def test_incomplete_beta_domain():
    with pytest.raises(ValueError):
        regularized_incomplete_beta(0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        regularized_incomplete_beta(1.0, 1.0, 1.5)


def test_incomplete_beta_reports_nonconvergence(monkeypatch):
    import vocalmir.stats as stats
    monkeypatch.setattr(stats, "_CF_MAX_ITER", 2)
    with pytest.raises(NonConvergence):
        stats.regularized_incomplete_beta(50.0, 40.0, 0.55)


def test_correlate_result_fields():
    x = [1, 2, 3, 4, 5]
    y = [2, 1, 4, 3, 5]
    c = correlate(x, y, "demo")
    assert c.n == 5 and c.dof == 3
    assert c.t_statistic == pytest.approx(t_statistic(0.8, 5))
    assert math.copysign(1, c.t_statistic) == math.copysign(1, c.r)
    assert 0 <= c.p_two_tailed <= 1
    assert c.feature == "demo"
