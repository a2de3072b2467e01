import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from ucaw.zoo import bare_set, cyclic_group, klein_group, lattice2, trivial_group

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def z2():
    return cyclic_group(2)


@pytest.fixture
def z3():
    return cyclic_group(3)


@pytest.fixture
def z4():
    return cyclic_group(4)


@pytest.fixture
def klein():
    return klein_group()


@pytest.fixture
def trivial():
    return trivial_group()


@pytest.fixture
def lat():
    return lattice2()


@pytest.fixture
def set2():
    return bare_set(2)


@pytest.fixture
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.report_lines():
            terminalreporter.write_line(line)
