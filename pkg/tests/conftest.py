from __future__ import annotations

from fractions import Fraction

import pytest

from loom.laurent import Laurent, LaurentMatrix


def mat(rows) -> LaurentMatrix:
    return LaurentMatrix.parse(rows)


def lp(text: str) -> Laurent:
    return Laurent.parse(text)


H = [["1", "0"], ["0", "-1"]]
E12 = [["0", "1"], ["0", "0"]]
E21 = [["0", "0"], ["1", "0"]]


@pytest.fixture
def big_cell_example() -> LaurentMatrix:
    return mat([["2", "z^-1"], ["z", "1"]])


def F(x) -> Fraction:
    return Fraction(x)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
