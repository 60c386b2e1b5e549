from functools import lru_cache
from pathlib import Path

import pytest

from mvdfv.dualmesh import build
from mvdfv.meshio import equitri, load_msh

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
FIXTURE_FILES = sorted(FIXTURES.glob("mesh*.msh"))
FIXTURE_NAMES = [p.name for p in FIXTURE_FILES]


@lru_cache(maxsize=None)
def fixture_mesh(name):
    return load_msh(FIXTURES / name)


@lru_cache(maxsize=None)
def fixture_mvd(name):
    return build(fixture_mesh(name))


@lru_cache(maxsize=None)
def equitri_mvd(k):
    return build(equitri(k))


@pytest.fixture(params=FIXTURE_NAMES)
def mvd(request):
    return fixture_mvd(request.param)


@pytest.fixture(params=FIXTURE_NAMES[:4])
def small_mvd(request):
    return fixture_mvd(request.param)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
