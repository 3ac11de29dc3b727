from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

from goalbc.scene import load_scene

# filled by test_acceptance.py, printed after the run
ACCEPTANCE: dict[int, str] = {}


DATA = Path(__file__).parent / "data"


def load_fixture(name: str, data: bool = False):
    """A bundled fixture, or with ``data`` one from ``tests/data``."""
    root = DATA if data else resources.files("goalbc") / "fixtures"
    return load_scene((root / f"{name}.scene").read_text())


@pytest.fixture(scope="session")
def mpc():
    return load_fixture("mpc")


@pytest.fixture(scope="session")
def elevator():
    return load_fixture("elevator")


@pytest.fixture(scope="session")
def atm():
    return load_fixture("atm")


@pytest.fixture(scope="session")
def extragoal():
    return load_fixture("extragoal")


@pytest.fixture(scope="session")
def influential():
    return load_fixture("influential")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
