import math

import pytest
from hypothesis import settings

from lhpp import MarketParams, PoolParams, hazard_from_pd, load_config

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

T = 10.0
BANK_PD = 0.199
RE_PD = 0.2421


def table_pool(n_re=9, w_re=0.1061, **changes):
    """Example pool with raw (not enlarged) bank parameters."""
    p = PoolParams(
        lambda_bank=hazard_from_pd(BANK_PD, T),
        lambda_re=hazard_from_pd(RE_PD, T),
        recovery_bank=0.25,
        recovery_re=0.25,
        rho_bank=0.1758,
        rho_re=0.1170,
        n_re=n_re,
        w_re=w_re,
    )
    return p.with_(**changes) if changes else p


@pytest.fixture
def pool():
    return table_pool()


@pytest.fixture(scope="session")
def config():
    return load_config()


@pytest.fixture
def market():
    return MarketParams(rate=0.0, maturity=T)


STRESS_RHO = math.sqrt(0.5)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
