from __future__ import annotations

import math
from types import SimpleNamespace

import numpy as np
import pytest

import pyqdar.selection.bic as bic_module
from pyqdar.core import SeriesSample
from pyqdar.errors import InsufficientDataError, QdarError
from pyqdar.estimate import FitOptions
from pyqdar.selection import bic_at_level, bic_formula, level_grid, select_order
from pyqdar.simulate import build_design, simulate_qdar


def _fake_fit(fail_taus: tuple[float, ...] = ()):
    def fake(series, tau, p, scheme, opts, start):
        if any(abs(tau - bad) < 1e-12 for bad in fail_taus):
            raise InsufficientDataError("forced failure")
        return SimpleNamespace(loss=0.5)

    return fake


def _noise(n: int = 200) -> SeriesSample:
    return SeriesSample(np.random.default_rng(0).standard_normal(n))


def test_penalty_grows_by_two_log_n_per_order() -> None:
    one, _ = bic_formula(0.3, 1, 500)
    two, _ = bic_formula(0.3, 2, 500)
    assert two - one == pytest.approx(2 * math.log(500))
    value, degenerate = bic_formula(0.3, 1, 500)
    assert value == pytest.approx(2 * 500 * math.log(0.3) + 3 * math.log(500))
    assert not degenerate


def test_single_observation_sample_is_degenerate() -> None:
    value, degenerate = bic_formula(0.3, 4, 1)
    assert degenerate
    assert value == pytest.approx(2 * math.log(0.3))


def test_level_grid() -> None:
    np.testing.assert_allclose(level_grid(9), np.arange(1, 10) / 10)
    np.testing.assert_allclose(level_grid(1), [0.5])


def test_bic_at_level_uses_the_common_sample() -> None:
    series = simulate_qdar(build_design("dar-const"), 400, seed=1)
    opts = FitOptions(n_starts=2, seed=4)
    value = bic_at_level(series, 0.25, 1, 3, opts=opts)
    assert math.isfinite(value)
    with pytest.raises(ValueError):
        bic_at_level(series, 0.25, 4, 3, opts=opts)


def test_ties_go_to_the_smaller_order(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(bic_module, "fit", _fake_fit())
    monkeypatch.setattr(bic_module, "bic_formula", lambda loss, p, n_eff: (1.0, False))
    table = select_order(_noise(), K=3, p_max=4)
    np.testing.assert_array_equal(table.combined, 1.0)
    assert table.chosen == 1


def test_failed_level_is_dropped(monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
    grid = level_grid(3)
    monkeypatch.setattr(bic_module, "fit", _fake_fit((float(grid[0]),)))
    table = select_order(_noise(), K=3, p_max=2)
    np.testing.assert_array_equal(table.used, [False, True, True])
    assert np.all(np.isnan(table.per_level[0]))
    assert "⚠" in capsys.readouterr().out


def test_all_levels_failing_raises(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(bic_module, "fit", _fake_fit(tuple(float(t) for t in level_grid(2))))
    with pytest.raises(QdarError):
        select_order(_noise(), K=2, p_max=2)


def test_order_two_design_selects_two() -> None:
    series = simulate_qdar(build_design("order2-const"), 1000, seed=13)
    opts = FitOptions(n_starts=4, seed=2)
    table = select_order(series, K=3, p_max=3, opts=opts, workers=4)
    assert table.chosen == 2
    used = table.per_level[table.used]
    np.testing.assert_array_equal(table.combined, used.mean(axis=0))
    assert np.argmin(table.combined) == np.argmin(table.combined_alt)

    again = select_order(series, K=3, p_max=3, opts=opts, workers=1)
    np.testing.assert_array_equal(again.combined, table.combined)


def test_single_level_grid_is_the_level_bic() -> None:
    series = simulate_qdar(build_design("dar-const"), 500, seed=8)
    table = select_order(series, K=1, p_max=2, opts=FitOptions(n_starts=2, seed=1))
    np.testing.assert_array_equal(table.combined, table.per_level[0])
    frame = table.to_frame()
    assert list(frame.columns) == ["p", "tau_0.5", "combined"]
