import json
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from daeindex import corpus
from daeindex.cli.dsl import parse_expression, parse_system
from daeindex.rank import witness_from_names

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def load(name):
    return parse_system(corpus.read(name))


def load_witness(name, s=None):
    s = s or load(name)
    return witness_from_names(s, json.loads(corpus.read(name, ".wit")))


def poly(s, text):
    return parse_expression(text, s.unknowns, s.params)


@pytest.fixture(scope="session")
def pendulum():
    return load("pendulum")


@pytest.fixture(scope="session")
def pendulum_witness(pendulum):
    return load_witness("pendulum", pendulum)


@pytest.fixture(scope="session")
def hess3():
    return load("hessenberg3")


@pytest.fixture(scope="session")
def expode():
    return load("expode")


F = Fraction


ACCEPTANCE_LINES: dict[int, str] = {}


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
