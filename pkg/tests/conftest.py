import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("lab", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")

_CRITERIA = [f"A{i}" for i in range(1, 10)]
_outcomes: dict[str, list[str]] = {}


def pytest_runtest_logreport(report):
    criterion = getattr(report, "criterion", None)
    if criterion is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes.setdefault(criterion, []).append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name in _CRITERIA:
        results = _outcomes.get(name)
        if not results:
            status = "NOT RUN"
        elif all(r == "passed" for r in results):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"{name} {status}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def gauss_h1_run():
    """One transform sweep of the bundled H_1 Gaussian, shared by every check that needs it."""
    import time

    from heisenberg_damped.cli import gft_run
    from heisenberg_damped.config import load_config

    start = time.perf_counter()
    result = gft_run(load_config("gauss_h1"))
    result["elapsed"] = time.perf_counter() - start
    return result
