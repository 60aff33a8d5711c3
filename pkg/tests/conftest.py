"""Shared fixtures: each bundled preset is integrated once per session.

The long runs (t_max = 30 on a 64^2 grid) take tens of seconds, so the
records and summaries are cached at session scope and reused by the module
tests and the acceptance suite.
"""

import numpy as np
import pytest
from importlib.resources import files

from arwflow.config import parse_config
from arwflow.runner import run_experiment

CRITERION_LINES = []


def report_criterion(number, passed, detail):
    line = "criterion %2d: %s  %s" % (number, "PASS" if passed else "FAIL", detail)
    CRITERION_LINES.append((number, line))
    return passed


def pytest_terminal_summary(terminalreporter):
    if not CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(CRITERION_LINES):
        terminalreporter.write_line(line)


def preset_path(name):
    return str(files("arwflow") / "presets" / (name + ".cfg"))


def load_preset(name):
    return parse_config(preset_path(name))


def _run(name):
    cfg = load_preset(name)
    records, summary = run_experiment(cfg, write_outputs=False)
    return cfg, records, summary


@pytest.fixture(scope="session")
def homogeneous_run():
    return _run("homogeneous")


@pytest.fixture(scope="session")
def perturbed_n2_run():
    return _run("perturbed_n2")


@pytest.fixture(scope="session")
def perturbed_n1_run():
    return _run("perturbed_n1")


@pytest.fixture(scope="session")
def gauss_root_run():
    return _run("gauss_root_n2")


def record_at(records, t):
    for r in records:
        if abs(r.t - t) < 1e-9:
            return r
    raise AssertionError("no record at t=%g" % t)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
