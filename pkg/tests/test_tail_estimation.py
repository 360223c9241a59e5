import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import naive_hill, naive_t_hill
from robust_premium.errors import (
    EmptyOrTooSmall,
    KOutOfRange,
    NegativeOrNonFinite,
    NonPositiveGamma,
    NonPositiveTailValue,
    SOutOfRange,
)
from robust_premium.models import StrictPareto, random_stream, sample_model
from robust_premium.tail_estimation import (
    LossSample,
    estimate_gamma,
    gamma_path,
    hill_estimator,
    sort_sample,
    t_hill_asymptotic_variance,
    t_hill_estimator,
    weissman_quantile,
)

GEOM = sort_sample([1, 2, 4, 8, 16])

positive_samples = st.lists(
    st.floats(min_value=1e-3, max_value=1e6, allow_nan=False), min_size=3, max_size=60
)


def test_sort_sample_orders_and_keeps_ties():
    assert list(sort_sample([3, 1, 2]).values) == [1, 2, 3]
    assert list(sort_sample([5, 5, 5]).values) == [5, 5, 5]
    s = sort_sample([1, 2, 4, 8, 16])
    assert s.n == 5 and list(s.values) == [1, 2, 4, 8, 16]


@pytest.mark.parametrize(
    "raw, err",
    [([], EmptyOrTooSmall), ([1.0], EmptyOrTooSmall), ([1, -2], NegativeOrNonFinite),
     ([1, math.nan], NegativeOrNonFinite), ([1, math.inf], NegativeOrNonFinite)],
)
def test_sort_sample_rejects(raw, err):
    with pytest.raises(err):
        sort_sample(raw)


def test_loss_sample_is_read_only():
    with pytest.raises(ValueError):
        GEOM.values[0] = 10.0
    assert GEOM.threshold(2) == 4.0
    assert isinstance(GEOM, LossSample)


def test_hill_geometric_sample():
    assert hill_estimator(GEOM, 2).gamma_hat == pytest.approx(1.5 * math.log(2), rel=1e-14)


def test_hill_constant_sample_is_zero():
    s = sort_sample([3.0] * 4)
    assert all(hill_estimator(s, k).gamma_hat == 0 for k in (1, 2, 3))


def test_hill_scaled_geometric_sample():
    assert hill_estimator(GEOM.scaled(7), 2).gamma_hat == pytest.approx(
        hill_estimator(GEOM, 2).gamma_hat, rel=1e-12)


def test_t_hill_geometric_sample():
    assert t_hill_estimator(GEOM, 2).gamma_hat == pytest.approx(5 / 3, rel=1e-14)


def test_t_hill_constant_sample_is_zero():
    s = sort_sample([2.5] * 4)
    assert all(t_hill_estimator(s, k).gamma_hat == 0 for k in (1, 2, 3))


@pytest.mark.parametrize("m", [1e6, 1e12])
def test_single_outlier_bounded_vs_divergent(m):
    s = sort_sample([1, 2, 4, 8, m])
    limit = 1 / ((4 / 8) / 2) - 1  # drop the j = 1 ratio
    t = t_hill_estimator(s, 2).gamma_hat
    assert t < limit and limit - t < 40 / m  # gap is O(1/M)
    assert hill_estimator(s, 2).gamma_hat == pytest.approx((math.log(m / 4) + math.log(2)) / 2)
    assert hill_estimator(s, 2).gamma_hat > math.log(m) / 2 - 1


def test_t_hill_monotone_in_maximum():
    ms = np.geomspace(20, 1e15, 40)
    vals = [t_hill_estimator(sort_sample([1, 2, 4, 8, 16, m]), 3).gamma_hat for m in ms]
    assert np.all(np.diff(vals) >= 0)
    limit = 1 / ((4 / 16 + 4 / 8) / 3) - 1
    assert max(vals) <= limit


def test_k_and_threshold_checks():
    with pytest.raises(KOutOfRange):
        hill_estimator(GEOM, 0)
    with pytest.raises(KOutOfRange):
        t_hill_estimator(GEOM, 5)
    # zero threshold is an error, zeros below the threshold are fine
    with pytest.raises(NonPositiveTailValue):
        hill_estimator(sort_sample([0, 0, 1, 2]), 2)
    assert hill_estimator(sort_sample([0, 1, 2, 4]), 2).gamma_hat > 0
    with pytest.raises(ValueError):
        estimate_gamma(GEOM, 2, "pickands")


def test_weissman_examples():
    assert weissman_quantile(GEOM, 2, 0.8, 2 / 5) == 4.0
    assert weissman_quantile(GEOM, 2, 1.0, 0.1) == pytest.approx(16.0, rel=1e-14)
    assert weissman_quantile(GEOM, 2, 0.0, 0.01) == 4.0
    assert weissman_quantile(GEOM, 2, 3.0, 0.1) > 16  # gamma >= 1 is accepted
    for s in (0.0, 0.5):
        with pytest.raises(SOutOfRange):
            weissman_quantile(GEOM, 2, 1.0, s)


def test_t_hill_asymptotic_variance():
    assert t_hill_asymptotic_variance(0.6) == pytest.approx(0.36 * 2.56 / 2.2, rel=1e-14)
    assert t_hill_asymptotic_variance(0.6) == pytest.approx(0.41891, abs=1e-5)
    assert t_hill_asymptotic_variance(1.0) == pytest.approx(4 / 3, rel=1e-14)
    assert t_hill_asymptotic_variance(1e-9) < 1e-17
    with pytest.raises(NonPositiveGamma):
        t_hill_asymptotic_variance(0.0)


@given(positive_samples, st.data())
def test_estimators_match_naive_definitions(raw, data):
    s = sort_sample(raw)
    k = data.draw(st.integers(1, s.n - 1))
    assert hill_estimator(s, k).gamma_hat == pytest.approx(naive_hill(raw, k), rel=1e-10, abs=1e-12)
    assert t_hill_estimator(s, k).gamma_hat == pytest.approx(naive_t_hill(raw, k), rel=1e-10, abs=1e-12)


@given(positive_samples)
def test_path_matches_single_k(raw):
    s = sort_sample(raw)
    for method in ("hill", "t_hill"):
        path = gamma_path(s, s.n - 1, method)
        single = [estimate_gamma(s, k, method).gamma_hat for k in range(1, s.n)]
        np.testing.assert_allclose(path, np.maximum(single, 0), rtol=1e-10, atol=1e-12)


@given(positive_samples, st.floats(min_value=1e-6, max_value=1e6), st.data())
def test_scale_invariance(raw, c, data):
    s = sort_sample(raw)
    k = data.draw(st.integers(1, s.n - 1))
    for est in (hill_estimator, t_hill_estimator):
        a, b = est(s, k).gamma_hat, est(s.scaled(c), k).gamma_hat
        assert b == pytest.approx(a, rel=1e-12, abs=1e-12)


@given(positive_samples, st.data())
def test_t_hill_mean_ratio_in_unit_interval(raw, data):
    s = sort_sample(raw)
    k = data.draw(st.integers(1, s.n - 1))
    g = t_hill_estimator(s, k).gamma_hat
    s_k = 1 / (1 + g)
    assert 0 < s_k <= 1 and g >= 0


def test_consistency_on_strict_pareto():
    n, k, reps = 5000, math.floor(5000**0.6), 500
    h, t = [], []
    for rep in range(reps):
        s = sample_model(StrictPareto(0.6), n, random_stream(2024, rep))
        h.append(hill_estimator(s, k).gamma_hat)
        t.append(t_hill_estimator(s, k).gamma_hat)
    assert abs(np.mean(h) - 0.6) < 0.05
    assert abs(np.mean(t) - 0.6) < 0.05
