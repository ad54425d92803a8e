from __future__ import annotations

import json
from pathlib import Path

import pandas as pd
import pytest

from pyqdar.tools.cli import EXIT_ERROR, EXIT_OK, main, parse_args, resolve_config


def _simulate(out: Path, n: int = 300, seed: int = 5, design: str = "dar-const") -> Path:
    code = main(["simulate", "--design", design, "--n", str(n), "--seed", str(seed), "--output-dir", str(out)])
    assert code == EXIT_OK
    return out / "simulate.csv"


def _body(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def test_simulate_is_deterministic(tmp_path: Path) -> None:
    first = _simulate(tmp_path / "a")
    second = _simulate(tmp_path / "b")
    pd.testing.assert_frame_equal(_body(first), _body(second))
    assert list(_body(first).columns) == ["y"]
    assert len(_body(first)) == 300
    other = _simulate(tmp_path / "c", seed=6)
    assert not _body(other).equals(_body(first))


def test_simulate_zero_length_writes_header_only(tmp_path: Path) -> None:
    path = _simulate(tmp_path, n=0)
    body = _body(path)
    assert list(body.columns) == ["y"]
    assert body.empty


def test_simulate_rerun_from_embedded_config(tmp_path: Path) -> None:
    first = _simulate(tmp_path / "a", seed=42)
    code = main(["simulate", "--config", str(first), "--output-dir", str(tmp_path / "b")])
    assert code == EXIT_OK
    pd.testing.assert_frame_equal(_body(first), _body(tmp_path / "b" / "simulate.csv"))


def test_simulate_accepts_equation_aliases(tmp_path: Path) -> None:
    alias = _simulate(tmp_path / "alias", design="eq8-set1")
    named = _simulate(tmp_path / "named", design="dar-const")
    pd.testing.assert_frame_equal(_body(alias), _body(named))
    assert _simulate(tmp_path / "misspec", n=200, design="eq14").exists()


def test_simulate_errors_exit_with_two(tmp_path: Path) -> None:
    assert main(["simulate", "--design", "nope", "--output-dir", str(tmp_path)]) == EXIT_ERROR
    assert main(["simulate", "--output-dir", str(tmp_path)]) == EXIT_ERROR


def test_config_for_another_command_is_rejected(tmp_path: Path) -> None:
    path = _simulate(tmp_path)
    assert main(["fit", "--config", str(path)]) == EXIT_ERROR


def test_resolve_config_splits_shared_and_extra() -> None:
    args = parse_args(["backtest", "--input", "x.csv", "--tau-grid", "0.05", "0.95", "--origin", "100", "--qar"])
    config = resolve_config(args)
    assert config.command == "backtest"
    assert config.tau_grid == [0.05, 0.95]
    assert config.output_dir == "out"
    assert config.extra["origin"] == 100
    assert config.extra["qar"] is True
    assert "config" not in config.extra


def test_fit_writes_json_and_csv(tmp_path: Path) -> None:
    data = _simulate(tmp_path / "data", n=400)
    out = tmp_path / "fit"
    code = main(["fit", "--input", str(data), "--tau", "0.25", "--order", "1", "--output-dir", str(out)])
    assert code in (0, 1)
    document = json.loads((out / "fit.json").read_text(encoding="utf-8"))
    assert document["command"] == "fit"
    assert document["config"]["tau"] == 0.25
    assert set(document["result"]["theta"]) == {"phi", "b", "beta"}
    frame = _body(out / "fit.csv")
    assert list(frame["parameter"]) == ["phi1", "b", "beta1"]


def test_fit_rerun_reproduces_estimates(tmp_path: Path) -> None:
    data = _simulate(tmp_path / "data", n=400)
    main(["fit", "--input", str(data), "--tau", "0.1", "--output-dir", str(tmp_path / "a")])
    main(["fit", "--config", str(tmp_path / "a" / "fit.json"), "--output-dir", str(tmp_path / "b")])
    a = json.loads((tmp_path / "a" / "fit.json").read_text(encoding="utf-8"))["result"]
    b = json.loads((tmp_path / "b" / "fit.json").read_text(encoding="utf-8"))["result"]
    assert a["theta"] == b["theta"]


def test_malformed_input_exits_with_two(tmp_path: Path) -> None:
    bad = tmp_path / "bad.csv"
    bad.write_text("y\n0.1\nabc\n0.3\n", encoding="utf-8")
    assert main(["fit", "--input", str(bad), "--output-dir", str(tmp_path)]) == EXIT_ERROR
    assert main(["fit", "--input", str(tmp_path / "missing.csv")]) == EXIT_ERROR
    assert main(["fit", "--output-dir", str(tmp_path)]) == EXIT_ERROR


def test_select_writes_bic_table(tmp_path: Path) -> None:
    data = _simulate(tmp_path / "data", n=500, design="order2-const")
    out = tmp_path / "select"
    code = main(["select", "--input", str(data), "--p-max", "2", "--K", "3", "--output-dir", str(out)])
    assert code in (0, 1)
    frame = _body(out / "select.csv")
    assert list(frame["p"]) == [1, 2]
    assert "combined" in frame.columns


def test_diagnose_writes_bands(tmp_path: Path) -> None:
    data = _simulate(tmp_path / "data", n=400)
    out = tmp_path / "diag"
    code = main(
        ["diagnose", "--input", str(data), "--tau", "0.25", "--K", "3", "--B", "1000", "--output-dir", str(out)]
    )
    assert code in (0, 1)
    result = json.loads((out / "diagnose.json").read_text(encoding="utf-8"))["result"]
    assert {"fit", "qacf", "portmanteau"} <= set(result)
    assert 0.0 <= result["portmanteau"]["p1"] <= 1.0
    assert (out / "diagnose.csv").exists()


def test_diagnose_rejects_small_null_sample(tmp_path: Path) -> None:
    data = _simulate(tmp_path / "data", n=400)
    assert main(["diagnose", "--input", str(data), "--B", "10", "--output-dir", str(tmp_path)]) == EXIT_ERROR


def test_forecast_is_monotone(tmp_path: Path) -> None:
    data = _simulate(tmp_path / "data", n=400)
    out = tmp_path / "fc"
    code = main(["forecast", "--input", str(data), "--tau-grid", "0.1", "0.9", "--output-dir", str(out)])
    assert code == EXIT_OK
    frame = _body(out / "forecast.csv")
    assert list(frame["tau"]) == [0.1, 0.9]
    assert frame["forecast"].is_monotonic_increasing


def test_region_writes_long_grid(tmp_path: Path) -> None:
    code = main(["region", "--grid", "3", "--draws", "2000", "--output-dir", str(tmp_path)])
    assert code == EXIT_OK
    frame = _body(tmp_path / "region.csv")
    assert list(frame.columns) == ["phi", "beta", "stationary", "bound", "stderr"]
    assert len(frame) == 9


@pytest.mark.slow
def test_backtest_command(tmp_path: Path) -> None:
    data = _simulate(tmp_path / "data", n=320)
    out = tmp_path / "bt"
    code = main(
        ["backtest", "--input", str(data), "--tau-grid", "0.05", "0.1", "--origin", "280", "--output-dir", str(out)]
    )
    assert code in (0, 1)
    frame = _body(out / "backtest.csv")
    assert list(frame.columns) == ["model", "tau", "ECR", "CC", "DQ"]
    assert list(frame["tau"]) == [0.05, 0.1]


@pytest.mark.slow
def test_replicate_command(tmp_path: Path) -> None:
    code = main(
        ["replicate", "--study", "estimation", "--reps", "3", "--n", "400", "--tau", "0.25", "--output-dir", str(tmp_path)]
    )
    assert code in (0, 1)
    frame = _body(tmp_path / "replicate_estimation.csv")
    assert list(frame["parameter"]) == ["phi1", "b", "beta1"]
