from __future__ import annotations

from pathlib import Path

import pytest

from rmm.instance import parse_instance, parse_matching

DATA = Path(__file__).resolve().parents[1] / "src" / "rmm" / "data"

# filled by test_acceptance, printed at the end of the run
ACCEPTANCE_LINES: list = []


def data_path(name: str) -> Path:
    return DATA / name


@pytest.fixture
def fig1():
    return parse_instance(data_path("fig1.txt").read_text())


@pytest.fixture
def fig1_m(fig1):
    return parse_matching(data_path("fig1_M.txt").read_text(), fig1)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
