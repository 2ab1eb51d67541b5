"""Shared builders for test problems."""

from __future__ import annotations

from fractions import Fraction as F

import pytest

from bethepop.reproduce import Family, Problem
from bethepop.rootdata import parse_type

# strongly non-integral starting weights that work for every rank used here
GENERIC = (F(1, 3), F(2, 7), F(3, 11), F(5, 13), F(7, 17))


def problem(type_name: str, lambdas, zs, family=Family.TRIG, h=None) -> Problem:
    return Problem(parse_type(type_name), tuple(tuple(F(c) for c in lam) for lam in lambdas), tuple(F(z) for z in zs), family, h)


def first_fundamental(type_name: str, family=Family.TRIG, h=None) -> Problem:
    rs = parse_type(type_name)
    lam = (1,) + (0,) * (rs.rank - 1)
    z = F(1, 7) if family is Family.XXX else 1
    return problem(type_name, [lam], [z], family, h)


def generic_weight(rank: int):
    return GENERIC[:rank]


@pytest.fixture
def seed_problem() -> Problem:
    return problem("A1", [(1,)], [1])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
