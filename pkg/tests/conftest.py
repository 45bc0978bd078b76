"""Shared fixtures and the acceptance-suite reporting hook.

The heavyweight scenario runs (tens of seconds each) are session-scoped so
the acceptance tests and any unit test that needs a full trajectory share a
single integration. Tests marked ``acceptance(num=..., title=...)`` get one
PASS/FAIL line each in a dedicated terminal section at the end of the run.
"""

from __future__ import annotations

import numpy as np
import pytest

from incoupler import ModelParams, RunConfig, derive, run_scenario

# ---------------------------------------------------------------------------
# Acceptance reporting
# ---------------------------------------------------------------------------

_acceptance_outcomes: dict[str, tuple[int, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers",
        "acceptance(num, title): one numbered acceptance criterion; reported "
        "as a PASS/FAIL line in the terminal summary",
    )


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    num = int(marker.kwargs.get("num", 0))
    title = str(marker.kwargs.get("title", item.name))
    if report.when == "call":
        status = "PASS" if report.passed else "FAIL"
        _acceptance_outcomes[item.nodeid] = (num, title, status)
    elif report.when == "setup" and not report.passed:
        status = "SKIP" if report.skipped else "FAIL"
        _acceptance_outcomes[item.nodeid] = (num, title, status)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, status in sorted(_acceptance_outcomes.values()):
        terminalreporter.write_line(f"criterion {num} [{status}] {title}")


# ---------------------------------------------------------------------------
# Lightweight shared fixtures
# ---------------------------------------------------------------------------


@pytest.fixture(scope="session")
def default_params() -> ModelParams:
    return ModelParams()


@pytest.fixture(scope="session")
def default_derived(default_params):
    return derive(default_params)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260819)


# ---------------------------------------------------------------------------
# Full scenario runs (shared; each integrates once per session)
# ---------------------------------------------------------------------------


@pytest.fixture(scope="session")
def pulsed_qs():
    """Default pulsed run, quasi-static probe."""
    return run_scenario(RunConfig(scenario="pulsed"))


@pytest.fixture(scope="session")
def pulsed_sc():
    """Default pulsed run, dynamical (scaled-c) probe."""
    return run_scenario(RunConfig(scenario="pulsed", probe_mode="scaledc"))


@pytest.fixture(scope="session")
def continuous_qs():
    """Default continuous-beam run, quasi-static probe."""
    return run_scenario(RunConfig(scenario="continuous"))


@pytest.fixture(scope="session")
def free_run():
    """Coupling-off control run."""
    return run_scenario(RunConfig(scenario="free"))
