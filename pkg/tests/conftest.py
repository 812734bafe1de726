import json
import math
import pathlib
import warnings

import pytest

warnings.filterwarnings("ignore", message=".*TBB.*")

from starklp import evolution, poles  # noqa: E402
from starklp.model import ModelParams  # noqa: E402

FIXTURES = pathlib.Path(__file__).with_name("fixtures")
KAPPA_REF = -11.0 / math.sqrt(2.0 * math.pi)   # coupling that reproduces the reference pole at E = 1


@pytest.fixture(scope="session")
def cerf_oracle():
    return json.loads((FIXTURES / "cerf_oracle.json").read_text())


@pytest.fixture(scope="session")
def broad():
    return ModelParams(1.0, 2.0)


@pytest.fixture(scope="session")
def broad_pole(broad):
    return poles.find_pole(broad)


@pytest.fixture(scope="session")
def broad_spectrum(broad):
    return evolution.oracle_spectrum(broad)


@pytest.fixture(scope="session")
def narrow_ref():
    return ModelParams(1.0, KAPPA_REF)


ACCEPTANCE_LINES = {}


def report(number, passed, detail):
    """Record one acceptance line; the terminal summary prints them in order."""
    line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
