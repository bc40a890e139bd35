"""Shared fixtures: solves are expensive, so each one runs once per session."""

from __future__ import annotations

import pytest

from dkgwaves.dkg_iter import iterate
from dkgwaves.dkg_shoot import solve_massless
from dkgwaves.nld import solve_nld

ACCEPTANCE_LINES: list[str] = []

NLD_CASES = [(1, 0.5), (1, 0.91), (3, 0.5), (3, 0.9)]
ITER_CASES = [(1, 0.5), (1, 0.91), (3, 0.5), (3, 0.9)]
SHOOTING_HSTAR0 = (-0.999, -0.99, -0.9, -0.7, -0.5, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0)


def record_acceptance(label: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def warm():
    """Compile every numba kernel once so timed calls measure solver work."""
    solve_nld(1, 0.5)
    iterate(1, 0.91, max_iter=1)
    solve_massless(0.0)
    return True


@pytest.fixture(scope="session")
def nld_solutions(warm):
    return {case: solve_nld(*case) for case in NLD_CASES}


@pytest.fixture(scope="session")
def iterative_waves(warm):
    return {case: iterate(case[0], case[1], M=1.0) for case in ITER_CASES}


@pytest.fixture(scope="session")
def massless_solutions(warm):
    return {h: solve_massless(h) for h in SHOOTING_HSTAR0}
