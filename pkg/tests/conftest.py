from __future__ import annotations

import pytest


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--freeze-golden",
        action="store_true",
        default=False,
        help="重新写出 tests/data 下冻结的参考估计",
    )
