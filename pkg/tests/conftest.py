import json
from pathlib import Path

import numpy as np
import pytest

from spectral_change.signal_io import load_synthetic_spec, synthesize

FIXTURES = Path(__file__).parent / "fixtures"

_criteria: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    label = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.failed):
        status = "PASS" if report.passed else "FAIL"
        # one criterion may span several parametrized cases; any failure wins
        if _criteria.get(label, ("PASS",))[0] != "FAIL":
            _criteria[label] = (status, item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_criteria, key=lambda s: int(s.split(".")[0])):
        status, _ = _criteria[label]
        terminalreporter.write_line(f"[{status}] {label}")


@pytest.fixture(scope="session")
def calibration():
    return json.loads((FIXTURES / "calibration.json").read_text())


@pytest.fixture(scope="session")
def noise_tone():
    return synthesize(load_synthetic_spec(FIXTURES / "noise_tone.json"), 8000)


@pytest.fixture(scope="session")
def stationary_tone():
    audio, _ = synthesize(load_synthetic_spec(FIXTURES / "stationary_tone.json"), 8000)
    return audio


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
