from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from pyqdar.config import SPEC_VERSION, RunConfig, check_spec_version
from pyqdar.errors import CsvParseError
from pyqdar.utils import (
    derive_seed,
    load_series,
    make_rng,
    read_artifact_config,
    to_jsonable,
    write_csv_artifact,
    write_json_artifact,
)


def _csv(tmp_path: Path, text: str, name: str = "series.csv") -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_load_series_single_column(tmp_path: Path) -> None:
    path = _csv(tmp_path, "# weekly returns\ny\n0.5\n-1.25\n\n2.0\n")
    series = load_series(path)
    np.testing.assert_array_equal(series.values, [0.5, -1.25, 2.0])
    assert series.origin == str(path)


def test_load_series_ignores_date_column(tmp_path: Path) -> None:
    path = _csv(tmp_path, "date,ret\n2020-01-03,0.1\n2020-01-10,-0.2\n2020-01-17,0.3\n")
    np.testing.assert_array_equal(load_series(path).values, [0.1, -0.2, 0.3])


def test_load_series_named_column(tmp_path: Path) -> None:
    path = _csv(tmp_path, "a,b\n1,10\n2,20\n")
    np.testing.assert_array_equal(load_series(path, column="b").values, [10.0, 20.0])
    with pytest.raises(CsvParseError) as info:
        load_series(path)
    assert "exactly one" in str(info.value)
    with pytest.raises(CsvParseError) as info:
        load_series(path, column="c")
    assert info.value.column == "c"


def test_load_series_requires_header(tmp_path: Path) -> None:
    with pytest.raises(CsvParseError) as info:
        load_series(_csv(tmp_path, "0.1\n0.2\n0.3\n"))
    assert info.value.row == 1
    with pytest.raises(CsvParseError):
        load_series(_csv(tmp_path, "", name="empty.csv"))


@pytest.mark.parametrize("bad", ["nan", "inf", "-Infinity", "1,5"])
def test_load_series_reports_row_and_column(tmp_path: Path, bad: str) -> None:
    path = _csv(tmp_path, f"y\n0.1\n\"{bad}\"\n0.3\n")
    with pytest.raises(CsvParseError) as info:
        load_series(path)
    assert info.value.row == 3
    assert info.value.column == "y"
    assert "line 3" in str(info.value)


def test_load_series_reports_the_physical_line(tmp_path: Path) -> None:
    path = _csv(tmp_path, "# exported series\n\ny\n0.1\n\n# gap\n0.2\nabc\n0.4\n")
    with pytest.raises(CsvParseError) as info:
        load_series(path)
    assert info.value.row == 8
    assert "line 8" in str(info.value)
    with pytest.raises(CsvParseError) as info:
        load_series(_csv(tmp_path, "# note\n0.1\n0.2\n", name="headless.csv"))
    assert info.value.row == 2


def test_load_series_missing_file(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError):
        load_series(tmp_path / "missing.csv")


def test_derive_seed_is_stable_and_keyed() -> None:
    a = derive_seed(7, 3, 1).generate_state(2)
    b = derive_seed(7, 3, 1).generate_state(2)
    c = derive_seed(7, 1, 3).generate_state(2)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    np.testing.assert_array_equal(make_rng(5, 2).normal(size=3), make_rng(5, 2).normal(size=3))


def test_to_jsonable_handles_numpy_and_non_finite() -> None:
    data = {"a": np.array([1.0, np.nan]), "b": np.int64(3), "c": np.bool_(True), 4: (np.inf,)}
    assert to_jsonable(data) == {"a": [1.0, "nan"], "b": 3, "c": True, "4": ["inf"]}
    json.dumps(to_jsonable(data))


def test_json_artifact_round_trips_config(tmp_path: Path) -> None:
    config = RunConfig("fit", input="x.csv", tau=0.25, order=1, seed=9)
    path = write_json_artifact(
        tmp_path / "out" / "fit.json", {"loss": np.float64(0.5)},
        command="fit", config=config.to_dict(), seed=9,
    )
    document = json.loads(path.read_text(encoding="utf-8"))
    assert document["spec_version"] == SPEC_VERSION
    assert document["result"] == {"loss": 0.5}
    assert "created_at" in document
    assert RunConfig.from_dict(read_artifact_config(path)) == config


def test_csv_artifact_embeds_config_without_timestamp(tmp_path: Path) -> None:
    config = RunConfig("select", p_max=3, extra={"K": 3}).to_dict()
    frame = pd.DataFrame({"p": [1, 2], "combined": [0.1, 0.2]})
    first = write_csv_artifact(tmp_path / "a.csv", frame, command="select", config=config, seed=1)
    second = write_csv_artifact(tmp_path / "b.csv", frame, command="select", config=config, seed=1)
    assert first.read_bytes() == second.read_bytes()
    assert read_artifact_config(first)["extra"] == {"K": 3}
    body = pd.read_csv(first, comment="#")
    assert list(body.columns) == ["p", "combined"]


def test_artifact_without_config_is_rejected(tmp_path: Path) -> None:
    path = _csv(tmp_path, "p,combined\n1,0.1\n", name="plain.csv")
    with pytest.raises(ValueError):
        read_artifact_config(path)


def test_spec_version_compatibility() -> None:
    check_spec_version(SPEC_VERSION)
    check_spec_version("1.0.0")
    with pytest.raises(ValueError):
        check_spec_version("2.0")
    with pytest.raises(ValueError):
        check_spec_version("1.9")


def test_run_config_ignores_unknown_keys() -> None:
    config = RunConfig.from_dict({"command": "fit", "tau": 0.1, "future_field": 1})
    assert config.tau == 0.1
    assert config.extra == {}
