import math

import numpy as np
import pytest
import scipy.stats

from citerank import ValidationError, simple_ols
from citerank import tdist


def _closed_form_ols(x, y):
    """Independent oracle: textbook formulas plus scipy for tail probabilities."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    n = len(x)
    mx, my = x.mean(), y.mean()
    sxx = np.sum((x - mx) ** 2)
    slope = np.sum((x - mx) * (y - my)) / sxx
    intercept = my - slope * mx
    resid = y - intercept - slope * x
    rss = np.sum(resid**2)
    dof = n - 2
    sigma2 = rss / dof
    se_slope = math.sqrt(sigma2 / sxx)
    se_intercept = math.sqrt(sigma2 * (1.0 / n + mx * mx / sxx))
    out = {}
    for name, est, se in [("intercept", intercept, se_intercept), ("slope", slope, se_slope)]:
        t = est / se if se > 0 else math.inf * np.sign(est)
        out[name] = (est, se, t, 2 * scipy.stats.t.sf(abs(t), dof))
    return out


def test_perfect_line():
    fit = simple_ols([0, 1, 2], [1, 3, 5])
    assert fit.coefficient("slope") == pytest.approx(2.0, abs=1e-12)
    assert fit.coefficient("intercept") == pytest.approx(1.0, abs=1e-12)
    assert fit.r_squared == 1.0


def test_hand_computed_case():
    fit = simple_ols([1, 2, 3, 4], [2, 1, 4, 3])
    assert fit.coefficient("slope") == pytest.approx(0.6, abs=1e-12)
    assert fit.coefficient("intercept") == pytest.approx(1.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(0.36, abs=1e-12)
    oracle = _closed_form_ols([1, 2, 3, 4], [2, 1, 4, 3])
    slope_idx = fit.names.index("slope")
    assert fit.p_values[slope_idx] == pytest.approx(oracle["slope"][3], abs=1e-10)


def test_against_closed_form_oracle_on_random_data():
    rng = np.random.default_rng(42)
    for _ in range(40):
        n = int(rng.integers(3, 60))
        x = rng.normal(0, 3, n)
        while np.ptp(x) == 0:
            x = rng.normal(0, 3, n)
        y = rng.normal(1, 2, n) + rng.uniform(-2, 2) * x
        fit = simple_ols(x, y)
        oracle = _closed_form_ols(x, y)
        for i, name in enumerate(fit.names):
            est, se, t, p = oracle[name]
            assert fit.estimates[i] == pytest.approx(est, rel=1e-8, abs=1e-10)
            assert fit.standard_errors[i] == pytest.approx(se, rel=1e-8, abs=1e-10)
            assert fit.t_stats[i] == pytest.approx(t, rel=1e-8, abs=1e-10)
            assert fit.p_values[i] == pytest.approx(p, rel=1e-7, abs=1e-10)


def test_confidence_interval_brackets_estimate_and_matches_t_quantile():
    rng = np.random.default_rng(7)
    x = rng.uniform(0, 10, 25)
    y = 2 + 0.5 * x + rng.normal(0, 1, 25)
    fit = simple_ols(x, y)
    t_crit = scipy.stats.t.ppf(0.975, fit.n - fit.k)
    for est, se, (lo, hi) in zip(fit.estimates, fit.standard_errors, fit.ci95):
        assert lo <= est <= hi
        assert lo == pytest.approx(est - t_crit * se, rel=1e-9)
        assert hi == pytest.approx(est + t_crit * se, rel=1e-9)


def test_zero_variance_x_errors():
    with pytest.raises(ValidationError, match="zero variance"):
        simple_ols([2, 2, 2, 2], [1, 2, 3, 4])


def test_too_few_observations_errors():
    with pytest.raises(ValidationError):
        simple_ols([1, 2], [1, 2])


def test_mismatched_lengths_error():
    with pytest.raises(ValidationError):
        simple_ols([1, 2, 3], [1, 2])


def test_non_finite_input_errors():
    with pytest.raises(ValidationError):
        simple_ols([1, 2, float("nan")], [1, 2, 3])


def test_aic_matches_gaussian_likelihood_formula():
    rng = np.random.default_rng(3)
    x = rng.uniform(0, 5, 30)
    y = 1 + x + rng.normal(0, 0.5, 30)
    fit = simple_ols(x, y)
    n = fit.n
    expected_ll = -0.5 * n * (math.log(2 * math.pi) + math.log(fit.rss / n) + 1)
    assert fit.log_likelihood == pytest.approx(expected_ll, rel=1e-12)
    assert fit.aic == pytest.approx(
        n * math.log(2 * math.pi) + n * math.log(fit.rss / n) + n + 2 * (fit.k + 1), rel=1e-12
    )


@pytest.mark.parametrize("df", [1, 2, 5, 30, 500, 2805])
def test_t_tail_probabilities_match_scipy(df):
    for t in [-8.0, -2.5, -1.0, -0.1, 0.0, 0.3, 1.0, 1.96, 4.0, 12.0]:
        assert tdist.two_sided_p(t, df) == pytest.approx(
            2 * scipy.stats.t.sf(abs(t), df), abs=1e-10
        )
        assert tdist.sf(t, df) == pytest.approx(scipy.stats.t.sf(t, df), abs=1e-10)


@pytest.mark.parametrize("df", [1, 4, 27, 1000])
@pytest.mark.parametrize("q", [0.6, 0.9, 0.975, 0.999])
def test_t_quantiles_match_scipy(df, q):
    assert tdist.ppf(q, df) == pytest.approx(scipy.stats.t.ppf(q, df), rel=1e-9, abs=1e-10)
