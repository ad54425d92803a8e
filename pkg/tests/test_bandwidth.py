from __future__ import annotations

import pytest

from pyqdar.estimate import BandwidthRule, bandwidth


def test_closed_form_values_at_the_median() -> None:
    assert bandwidth(0.5, 1000, BandwidthRule.BOFINGER) == pytest.approx(0.1627, abs=5e-4)
    assert bandwidth(0.5, 1000, BandwidthRule.HALL_SHEATHER, alpha=0.05) == pytest.approx(0.0972, abs=5e-4)


def test_rule_names_parse() -> None:
    assert bandwidth(0.25, 500, "bofinger") == bandwidth(0.25, 500, BandwidthRule.BOFINGER)
    assert BandwidthRule.parse("hall_sheather") is BandwidthRule.HALL_SHEATHER
    with pytest.raises(ValueError):
        BandwidthRule.parse("silverman")


def test_bandwidth_shrinks_with_sample_size() -> None:
    for rule in BandwidthRule:
        assert bandwidth(0.25, 4000, rule) < bandwidth(0.25, 1000, rule)


@pytest.mark.parametrize("tau", [0.002, 0.01, 0.99, 0.998])
def test_extreme_levels_are_clamped_inside_the_unit_interval(tau: float) -> None:
    for rule in BandwidthRule:
        h = bandwidth(tau, 100, rule)
        assert h > 0
        assert tau - h > 0.001
        assert tau + h < 0.999


def test_invalid_arguments() -> None:
    with pytest.raises(ValueError):
        bandwidth(0.0005, 1000)
    with pytest.raises(ValueError):
        bandwidth(0.5, 1)
    with pytest.raises(ValueError):
        bandwidth(0.5, 1000, alpha=1.5)
