from __future__ import annotations

import numpy as np
import pytest
from scipy import stats

from pyqdar.core import SeriesSample, psi
from pyqdar.diagnose import QacfReport, portmanteau, psd_factor, qacf, qacf_confidence_bands, sample_qacf
from pyqdar.errors import DegenerateSeriesError, InsufficientDataError
from pyqdar.estimate import FitOptions, fit
from pyqdar.simulate import build_design, simulate_qdar


def _report(K: int = 3, rho=None, r=None, pi_hat=None, n: int = 1000) -> QacfReport:
    rho = np.zeros(K) if rho is None else np.asarray(rho, dtype=float)
    r = np.zeros(K) if r is None else np.asarray(r, dtype=float)
    pi_hat = np.eye(2 * K) if pi_hat is None else pi_hat
    half = 1.96 * np.sqrt(np.diag(pi_hat)) / np.sqrt(n)
    return QacfReport(K, 0.25, n, rho, r, pi_hat, half, 0.0, 1.0, 1.0, 1.0)


def _fitted(n: int = 1000, seed: int = 7):
    series = simulate_qdar(build_design("dar-const"), n, seed=seed)
    return series, fit(series, 0.25, 1, opts=FitOptions(n_starts=4, seed=1))


def test_sample_qacf_matches_direct_formula() -> None:
    rng = np.random.default_rng(5)
    eta = rng.standard_normal(40)
    w = rng.uniform(0.2, 1.0, 40)
    tau, K = 0.3, 3
    moments = sample_qacf(eta, w, tau, K)

    mu1, mu2 = eta.mean(), np.abs(eta).mean()
    s1, s2 = np.mean((eta - mu1) ** 2), np.mean((np.abs(eta) - mu2) ** 2)
    for k in range(1, K + 1):
        rho = sum(w[t] * psi(eta[t], tau) * (eta[t - k] - mu1) for t in range(k, 40))
        r = sum(w[t] * psi(eta[t], tau) * (abs(eta[t - k]) - mu2) for t in range(k, 40))
        assert moments.rho[k - 1] == pytest.approx(rho / (40 * np.sqrt(tau * (1 - tau) * s1)))
        assert moments.r[k - 1] == pytest.approx(r / (40 * np.sqrt(tau * (1 - tau) * s2)))


def test_zero_weights_give_zero_qacf() -> None:
    eta = np.random.default_rng(1).standard_normal(30)
    moments = sample_qacf(eta, np.zeros(30), 0.25, 4)
    np.testing.assert_array_equal(moments.rho, 0.0)
    np.testing.assert_array_equal(moments.r, 0.0)


def test_sample_qacf_rejects_bad_input() -> None:
    with pytest.raises(InsufficientDataError):
        sample_qacf(np.arange(3.0), np.ones(3), 0.25, 3)
    with pytest.raises(DegenerateSeriesError):
        sample_qacf(np.ones(20), np.ones(20), 0.25, 2)
    with pytest.raises(ValueError):
        sample_qacf(np.arange(20.0), np.ones(19), 0.25, 2)


def test_qacf_report_on_a_fitted_model() -> None:
    series, result = _fitted()
    report = qacf(series, result, K=6)
    assert report.rho.shape == report.r.shape == (6,)
    assert report.pi_hat.shape == (12, 12)
    np.testing.assert_allclose(report.pi_hat, report.pi_hat.T)
    assert np.linalg.eigvalsh(report.pi_hat).min() >= -1e-12
    np.testing.assert_allclose(report.pi1, report.pi_hat[:6, :6])
    np.testing.assert_allclose(report.pi2, report.pi_hat[6:, 6:])
    np.testing.assert_allclose(report.ci_halfwidths, 1.959963984540054 * np.sqrt(np.diag(report.pi_hat) / series.n))
    # under the true model the autocorrelations stay near zero
    assert np.all(np.abs(report.rho) < 4 * report.ci_halfwidths[:6])
    assert np.all(np.abs(report.r) < 4 * report.ci_halfwidths[6:])


def test_qacf_needs_enough_residuals() -> None:
    series = simulate_qdar(build_design("dar-const"), 40, seed=3)
    result = fit(series, 0.25, 1, opts=FitOptions(n_starts=2, seed=1))
    with pytest.raises(InsufficientDataError):
        qacf(series, result, K=30)


def test_portmanteau_statistics_and_null_draws() -> None:
    report = _report(K=3, rho=[0.1, 0.0, 0.0], r=[0.0, 0.05, 0.0], n=100)
    result = portmanteau(report, B=2000, seed=3)
    assert result.q1 == pytest.approx(1.0)
    assert result.q2 == pytest.approx(0.25)
    assert result.q == result.q1 + result.q2
    for p in (result.p1, result.p2, result.p_comb):
        assert 0.0 <= p <= 1.0


def test_zero_statistic_has_unit_p_value() -> None:
    result = portmanteau(_report(K=2), B=1000, seed=1)
    assert result.p1 == 1.0
    assert result.p2 == 1.0


def test_identity_covariance_gives_chi_square_tail() -> None:
    K, n, B = 4, 1000, 20_000
    critical = stats.chi2.ppf(0.95, K)
    rho = np.full(K, np.sqrt(critical / (K * n)))
    result = portmanteau(_report(K=K, rho=rho, n=n), B=B, seed=11)
    assert result.p1 == pytest.approx(0.05, abs=3 * np.sqrt(0.05 * 0.95 / B))


def test_portmanteau_is_independent_of_thread_count() -> None:
    report = _report(K=2, rho=[0.05, 0.02], r=[0.01, 0.03], n=500)
    one = portmanteau(report, B=5000, seed=9)
    four = portmanteau(report, B=5000, seed=9, workers=4)
    assert one == four
    assert one.rejects(0.05) == (one.p1 < 0.05, one.p2 < 0.05, one.p_comb < 0.05)
    with pytest.raises(ValueError):
        portmanteau(report, B=500)


def test_psd_factor_methods_reconstruct_the_matrix() -> None:
    series, result = _fitted()
    pi_hat = qacf(series, result, K=3).pi_hat
    for method in ("eigh", "cholesky"):
        factor = psd_factor(pi_hat, method)
        np.testing.assert_allclose(factor @ factor.T, pi_hat, atol=1e-8)
    with pytest.raises(ValueError):
        psd_factor(pi_hat, "svd")


def test_p_values_do_not_depend_on_the_factorization() -> None:
    series, result = _fitted()
    report = qacf(series, result, K=6)
    B = 20_000
    eigh = portmanteau(report, B=B, seed=21)
    chol = portmanteau(report, B=B, seed=21, factorization="cholesky")
    assert (eigh.q1, eigh.q2, eigh.q) == (chol.q1, chol.q2, chol.q)
    for a, b in ((eigh.p1, chol.p1), (eigh.p2, chol.p2), (eigh.p_comb, chol.p_comb)):
        assert abs(a - b) < 2 / np.sqrt(B)


def test_confidence_bands() -> None:
    frame = qacf_confidence_bands(_report(K=2, n=10_000))
    assert len(frame) == 4
    assert list(frame.columns) == ["k", "statistic", "value", "band", "inside"]
    np.testing.assert_allclose(frame["band"], 0.0196, atol=1e-5)
    wider = qacf_confidence_bands(_report(K=2, n=10_000), n=2500)
    np.testing.assert_allclose(wider["band"], 2 * frame["band"])
    assert frame["inside"].all()
