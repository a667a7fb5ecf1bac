import warnings

import numpy as np
import pytest

from scalecalc import Grid1D, Grid2D, GridFunction1D, GridFunction2D, Lagrangian

_ACCEPTANCE: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, label): acceptance criterion check")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            number, label = mark.args
            entry = _ACCEPTANCE.setdefault(number, {"label": label, "outcomes": []})
            entry.setdefault("nodeids", []).append(item.nodeid)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for entry in _ACCEPTANCE.values():
        if report.nodeid in entry.get("nodeids", ()):
            entry["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        entry = _ACCEPTANCE[number]
        outcomes = entry["outcomes"]
        if not outcomes:
            status = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status:7s} {entry['label']}")


@pytest.fixture(autouse=True)
def _quiet_numpy():
    with np.errstate(invalid="ignore", over="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        yield


# dyadic spacing keeps polynomial samples and their differences exact
@pytest.fixture
def dyadic_grid():
    return Grid1D(0.0, 1.0, 65, ghost=8)


@pytest.fixture
def dyadic_square():
    return Grid2D.square(0.0, 1.0, 33, ghost=4)


def sample(grid, func):
    if isinstance(grid, Grid2D):
        return GridFunction2D.from_callable(grid, func)
    return GridFunction1D.from_callable(grid, func)


def quadratic_lagrangian(a=0.5, b=0.0, c=0.0, d=0.0):
    """``a v^2 + b y^2 + c y + d v`` with exact partials."""
    return Lagrangian(
        lambda x, y, v: a * v ** 2 + b * y ** 2 + c * y + d * v,
        partials={"y": lambda x, y, v: 2 * b * y + c + 0 * y,
                  "v": lambda x, y, v: 2 * a * v + d + 0 * v},
    )


def membrane_lagrangian(shift=0.0):
    return Lagrangian(
        lambda x1, x2, y, v1, v2: ((v1 - shift) ** 2 + v2 ** 2) / 2,
        dims=2,
        partials={"y": lambda x1, x2, y, v1, v2: 0 * y,
                  "v1": lambda x1, x2, y, v1, v2: v1 - shift,
                  "v2": lambda x1, x2, y, v1, v2: v2},
    )


def bending_lagrangian():
    """``v2^2 / 2`` of order two."""
    return Lagrangian(
        lambda x, y, v1, v2: v2 ** 2 / 2,
        order=2,
        partials={"y": lambda x, y, v1, v2: 0 * y, "v1": lambda x, y, v1, v2: 0 * v1,
                  "v2": lambda x, y, v1, v2: v2},
    )
