from __future__ import annotations

import warnings

import numpy as np
import pytest

from conftau.errors import TruncationWarning
from conftau.geometry import BackgroundPotential, DomainShape
from conftau.verify import ContextPool

_ACCEPTANCE: list[tuple[int, str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when != "call":
        return
    number, title = marker.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _ACCEPTANCE.append((number, title, "PASS" if rep.passed else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}" + (f" -- {detail}" if detail else ""))


@pytest.fixture(autouse=True)
def _quiet_truncation():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        yield


@pytest.fixture(scope="session")
def one():
    return BackgroundPotential.uniform()


@pytest.fixture(scope="session")
def sq():
    return BackgroundPotential.radial_power(2)


@pytest.fixture(scope="session")
def disk():
    return DomainShape.circle(1.0)


@pytest.fixture(scope="session")
def ellipse():
    return DomainShape.ellipse(1.0, 0.1)


@pytest.fixture(scope="session")
def pool():
    """Contexts shared across tests so that stencils are solved once per session."""
    return ContextPool()


SAMPLE_Z = np.array([r * np.exp(1j * a) for r in (2.0, 3.0, 5.0) for a in (0.3, 2.0)])
