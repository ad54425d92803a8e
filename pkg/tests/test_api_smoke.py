import inspect

import pyqdar


def test_public_api_exports() -> None:
    missing = []
    non_callable = []

    for name in pyqdar.__all__:
        if not hasattr(pyqdar, name):
            missing.append(name)
            continue

        value = getattr(pyqdar, name)
        if inspect.isclass(value):
            continue
        if not callable(value):
            non_callable.append(name)

    assert not missing, f"Missing exports: {missing}"
    assert not non_callable, f"Non-callable exports: {non_callable}"


def test_subpackages_reexport_their_all() -> None:
    from pyqdar import backtest, core, diagnose, estimate, selection, simulate, tasks

    for module in (backtest, core, diagnose, estimate, selection, simulate, tasks):
        assert all(hasattr(module, name) for name in module.__all__), module.__name__


def test_version() -> None:
    assert pyqdar.__version__ == "0.1.0"
