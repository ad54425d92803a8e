from __future__ import annotations

import numpy as np
import pytest
from scipy import stats

from pyqdar.core import (
    SeriesSample,
    ThetaTau,
    WeightScheme,
    check_loss,
    cond_quantile,
    cond_quantile_path,
    lag_matrix,
    s_q,
    s_q_inv,
    self_weights,
)
from pyqdar.errors import DegenerateSeriesError, InsufficientDataError
from pyqdar.estimate import FitOptions, fit, fit_levels, forecast_levels, forecast_one_step
from pyqdar.simulate import CoefficientFunctions, build_design, constant, simulate_qdar


def _make_series(design: str = "dar-const", n: int = 1000, seed: int = 7) -> SeriesSample:
    return simulate_qdar(build_design(design), n, seed=seed)


def _options(**changes) -> FitOptions:
    return FitOptions(n_starts=4, seed=1, **changes)


def _objective(series: SeriesSample, result, vector) -> float:
    theta = ThetaTau.from_vector(result.tau, vector)
    y, X = lag_matrix(series.values, result.p, result.start)
    w = self_weights(series, result.p, result.weights, start=result.start)
    return float(w @ check_loss(y - cond_quantile_path(theta, X), result.tau)) / y.size


def test_fit_recovers_double_ar_parameters() -> None:
    series = _make_series(n=2000)
    result = fit(series, 0.25, 1, opts=_options())
    truth = build_design("dar-const").theta_at(0.25).as_vector()
    assert result.converged
    assert result.asd is not None and np.all(result.asd > 0)
    assert np.all(np.abs(result.theta.as_vector() - truth) < 4 * result.asd)


def test_returned_loss_never_exceeds_any_start() -> None:
    series = _make_series(n=600, seed=3)
    result = fit(series, 0.1, 1, opts=_options(covariance=False))
    assert len(result.start_points) == result.starts_tried == 4
    for start in result.start_points:
        assert result.loss <= _objective(series, result, start) + 1e-12
    assert result.loss == pytest.approx(_objective(series, result, result.theta.as_vector()))


def test_fit_is_deterministic_for_a_seed() -> None:
    series = _make_series(n=500)
    a = fit(series, 0.25, 1, opts=_options(covariance=False))
    b = fit(series, 0.25, 1, opts=_options(covariance=False, workers=4))
    assert a.theta == b.theta
    assert a.start_points == b.start_points


def test_pure_qar_data_gives_beta_near_zero() -> None:
    coefs = CoefficientFunctions(
        b_fn=lambda u: s_q_inv(stats.norm.ppf(u)),
        phi_fns=(constant(0.3),),
        beta_fns=(constant(0.0),),
    )
    series = simulate_qdar(coefs, 2000, seed=21)
    result = fit(series, 0.1, 1, opts=_options())
    assert abs(result.theta.beta[0]) < 4 * result.asd[2]


def test_fixed_beta_zero_fit() -> None:
    series = _make_series(n=800)
    result = fit(series, 0.05, 1, opts=_options(fix_beta_zero=True))
    assert result.theta.beta[0] == 0.0
    assert result.asd[2] == 0.0
    assert result.asd[0] > 0


def test_fitted_quantiles_scale_with_the_series() -> None:
    series = _make_series(n=1500, seed=5)
    scheme = WeightScheme.unit()
    base = fit(series, 0.25, 1, scheme, _options(covariance=False))
    scaled = series.scaled(2.0)
    doubled = fit(scaled, 0.25, 1, scheme, _options(covariance=False))
    diff = doubled.fitted(scaled) - 2.0 * base.fitted(series)
    assert np.mean(np.abs(diff)) < 0.02 * np.std(scaled.values)
    assert doubled.theta.phi[0] == pytest.approx(base.theta.phi[0], abs=0.02)


def test_fitted_quantiles_shift_with_the_series() -> None:
    series = _make_series(n=1500, seed=5)
    scheme = WeightScheme.unit()
    base = fit(series, 0.25, 1, scheme, _options(covariance=False))
    shifted = series.scaled(1.0, shift=0.1)
    moved = fit(shifted, 0.25, 1, scheme, _options(covariance=False))
    diff = moved.fitted(shifted) - (base.fitted(series) + 0.1)
    assert np.median(np.abs(diff)) < 0.1 * np.std(series.values)


def test_constant_series_is_degenerate() -> None:
    with pytest.raises(DegenerateSeriesError):
        fit(SeriesSample(np.full(200, 1.5)), 0.25, 1, opts=_options())


def test_short_series_is_rejected() -> None:
    with pytest.raises(InsufficientDataError):
        fit(_make_series(n=25), 0.25, 1, opts=_options())
    with pytest.raises(ValueError):
        fit(_make_series(n=200), 1.0, 1, opts=_options())


def test_near_median_level_warns(capsys: pytest.CaptureFixture[str]) -> None:
    fit(_make_series(n=300), 0.5, 1, opts=_options(covariance=False))
    assert "0.5" in capsys.readouterr().out


def test_forecast_one_step_delegates_to_cond_quantile() -> None:
    result = fit(_make_series(n=500), 0.05, 1, opts=_options(covariance=False))
    assert forecast_one_step(result, np.array([0.0])) == pytest.approx(s_q(result.theta.b))
    lags = np.array([1.3])
    assert forecast_one_step(result, lags) == cond_quantile(result.theta, lags)


def test_fit_result_json_schema() -> None:
    result = fit(_make_series(n=500), 0.25, 1, opts=_options())
    payload = result.to_dict()
    for key in ("tau", "p", "theta", "asd", "covariance", "loss", "bandwidth", "converged", "seed"):
        assert key in payload
    assert set(payload["theta"]) == {"phi", "b", "beta"}
    assert payload["bandwidth"]["rule"] == "hall-sheather"


def test_levels_are_rearranged() -> None:
    series = _make_series(n=600)
    multi = fit_levels(series, [0.3, 0.7], 1, opts=_options(covariance=False, warn_near_median=False))
    assert multi.ok.all()
    assert np.all(np.diff(multi.fitted, axis=0) >= 0)
    forecasts = forecast_levels(multi, series.last_values(1))
    assert np.all(np.diff(forecasts) >= 0)


def test_rearrangement_keeps_monotone_fits() -> None:
    series = _make_series(n=600)
    opts = _options(covariance=False)
    raw = fit_levels(series, [0.05, 0.95], 1, opts=opts, rearrange=False)
    assert np.all(np.diff(raw.fitted, axis=0) >= 0)
    sorted_ = fit_levels(series, [0.05, 0.95], 1, opts=opts)
    np.testing.assert_array_equal(sorted_.fitted, raw.fitted)


def test_levels_validate_ordering() -> None:
    with pytest.raises(ValueError):
        fit_levels(_make_series(n=300), [0.7, 0.3], 1)
    with pytest.raises(ValueError):
        fit_levels(_make_series(n=300), [0.0, 0.3], 1)


def test_failed_level_keeps_partial_results() -> None:
    series = _make_series(n=40)
    multi = fit_levels(series, [0.1, 0.9], 2, opts=_options(covariance=False))
    assert not multi.ok.any()
    assert all(status.startswith("error") for status in multi.statuses)
