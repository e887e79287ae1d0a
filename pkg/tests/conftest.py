"""Shared fixtures: prime tables are expensive enough to build once."""

import pytest

from hl_irred.primes import build_table
from hl_irred.windows import APSpec


@pytest.fixture(scope="session")
def table_small():
    return build_table(10**4)


@pytest.fixture(scope="session")
def table_1m():
    # 1_001_000 keeps the successor primes of the 10^6 ceiling in range
    return build_table(1_001_000)


@pytest.fixture(scope="session")
def spec1():
    return APSpec(alpha=1, d=4)


@pytest.fixture(scope="session")
def spec3():
    return APSpec(alpha=3, d=4)
