import pytest

from uforest import fixtures
from uforest.rexpr import eliminate, finite_expressions, omega_expression
from uforest.synthesis import build_report

FIXTURE_NAMES = ["ra2", "psi6", "pow4", "klein"]
SMALL = ["ra2", "pow4", "klein"]


@pytest.fixture(scope="session")
def phis():
    return {name: fixtures.FIXTURES[name]() for name in FIXTURE_NAMES}


@pytest.fixture(scope="session")
def reports(phis):
    return {name: build_report(phi) for name, phi in phis.items()}


@pytest.fixture(scope="session")
def tables(phis, reports):
    return {name: eliminate(reports[name].automaton, phis[name]) for name in FIXTURE_NAMES}


@pytest.fixture(scope="session")
def finite_exprs(phis, reports, tables):
    return {n: finite_expressions(reports[n].automaton, phis[n], tables[n]) for n in FIXTURE_NAMES}


@pytest.fixture(scope="session")
def omega_exprs(phis, reports, tables):
    return {n: omega_expression(reports[n].automaton, phis[n], tables[n]) for n in FIXTURE_NAMES}
