from __future__ import annotations

import numpy as np
import pytest
from scipy import stats

from pyqdar.core import SeriesSample, ThetaTau, WeightScheme, cond_quantile_jacobian, lag_matrix, s_q_inv
from pyqdar.errors import SingularInformationError
from pyqdar.estimate import (
    FitOptions,
    FitResult,
    asymptotic_covariance,
    attach_covariance,
    density_cap,
    density_quotient,
    fit,
    information_inverse,
    psd_project,
)
from pyqdar.simulate import CoefficientFunctions, build_design, constant, simulate_qdar


def _manual_fit(series: SeriesSample, tau: float, vector, scheme: WeightScheme | None = None) -> FitResult:
    theta = ThetaTau.from_vector(tau, vector)
    return FitResult(
        theta=theta,
        loss=0.0,
        converged=True,
        starts_tried=1,
        weights=scheme or WeightScheme(),
        n=series.n,
        start=theta.p,
    )


def _iid_normal(n: int, seed: int) -> SeriesSample:
    coefs = CoefficientFunctions(lambda u: s_q_inv(stats.norm.ppf(u)), (constant(0.0),), (constant(0.0),))
    return simulate_qdar(coefs, n, seed=seed)


def test_sandwich_collapses_for_unit_weights_and_constant_density() -> None:
    series = simulate_qdar(build_design("dar-const"), 400, seed=2)
    fitted = _manual_fit(series, 0.25, [-0.2, -0.45, -0.18], WeightScheme.unit())
    c = 0.7
    fhat = np.full(series.n - 1, c)
    sandwich = asymptotic_covariance(series, fitted, fhat)

    _, X = lag_matrix(series.values, 1)
    Q = cond_quantile_jacobian(fitted.theta, X)
    expected = 0.25 * 0.75 / c**2 * np.linalg.inv(Q.T @ Q)
    np.testing.assert_allclose(sandwich.matrix, expected, rtol=1e-8)
    np.testing.assert_allclose(sandwich.asd, np.sqrt(np.diag(expected)), rtol=1e-8)
    assert sandwich.ridge == 0.0


def test_covariance_is_symmetric_psd() -> None:
    series = simulate_qdar(build_design("dar-const"), 800, seed=4)
    result = fit(series, 0.25, 1, opts=FitOptions(n_starts=4, seed=3))
    np.testing.assert_allclose(result.covariance, result.covariance.T)
    assert np.linalg.eigvalsh(result.covariance).min() >= -1e-14
    np.testing.assert_allclose(result.asd, np.sqrt(np.diag(result.covariance)))
    assert result.density.shape == (series.n - 1,)
    assert np.all(result.density >= 0)


def test_density_quotient_clips_degenerate_denominators() -> None:
    series = SeriesSample(np.linspace(-2.0, 2.0, 50))
    lo = _manual_fit(series, 0.2, [0.0, -1.0, 0.0])
    same = _manual_fit(series, 0.3, [0.0, -1.0, 0.0])
    crossed = _manual_fit(series, 0.3, [0.0, -4.0, 0.0])
    cap = density_cap(series)

    np.testing.assert_allclose(density_quotient(series, lo, same), cap)
    np.testing.assert_array_equal(density_quotient(series, lo, crossed), 0.0)
    with pytest.raises(ValueError):
        density_quotient(series, same, lo)


def test_density_quotient_recovers_the_normal_density() -> None:
    series = _iid_normal(5000, seed=12)
    opts = FitOptions(n_starts=4, seed=5, fix_beta_zero=True, warn_near_median=False)
    result = attach_covariance(series, fit(series, 0.5, 1, opts=opts.but(covariance=False)), opts)
    assert np.median(result.density) == pytest.approx(stats.norm.pdf(0.0), rel=0.15)

    doubled = series.scaled(2.0)
    scaled = attach_covariance(doubled, fit(doubled, 0.5, 1, opts=opts.but(covariance=False)), opts)
    assert np.median(scaled.density) == pytest.approx(np.median(result.density) / 2, rel=0.15)


def test_psd_projection_clips_negative_eigenvalues() -> None:
    matrix = np.array([[1.0, 2.0], [2.0, 1.0]])
    projected, deviation = psd_project(matrix)
    assert np.linalg.eigvalsh(projected).min() >= -1e-12
    assert deviation > 0
    same, zero = psd_project(np.eye(3))
    np.testing.assert_array_equal(same, np.eye(3))
    assert zero == 0.0


def test_information_inverse_adds_ridge_when_singular() -> None:
    singular = np.array([[1.0, 1.0], [1.0, 1.0]])
    inverse, ridge = information_inverse(singular)
    assert ridge == pytest.approx(1e-8)
    assert np.all(np.isfinite(inverse))
    with pytest.raises(SingularInformationError):
        information_inverse(np.zeros((2, 2)))
