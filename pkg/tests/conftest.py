import time

import numpy as np
import pytest

from ctapyield.implant import ParametricSource, builtin_strategies, sample_positions

ACCEPTANCE_LINES: list[str] = []
SAMPLING_SECONDS: dict[str, float] = {}


def _timed_population(st):
    t0 = time.perf_counter()
    pos = sample_positions(ParametricSource(st), st, seed=42, n=100_000)
    SAMPLING_SECONDS[st.name] = time.perf_counter() - t0
    return pos


@pytest.fixture(scope="session")
def presets():
    return {s.name: s for s in builtin_strategies()}


@pytest.fixture(scope="session")
def population_14kev(presets):
    return _timed_population(presets["P14keV"])


@pytest.fixture(scope="session")
def population_7kev(presets):
    return _timed_population(presets["P7keV"])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
