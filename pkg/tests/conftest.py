import pytest

from mhybrid.core import ProductSpace
from mhybrid.domains import Thresholds, gen_mh_domain, gen_universal
from mhybrid.fixtures import TABLE1_THRESHOLDS, table1_domain


@pytest.fixture(scope="session")
def table1():
    return table1_domain()


@pytest.fixture(scope="session")
def table1_thresholds():
    return TABLE1_THRESHOLDS


@pytest.fixture(scope="session")
def mh22():
    return gen_mh_domain(ProductSpace((2, 2)), Thresholds((0, 0), (0, 0)))


@pytest.fixture(scope="session")
def universal22():
    return gen_universal(ProductSpace((2, 2)))


def P(k):
    """1-based column number of the 30-preference domain to a 0-based index."""
    return k - 1
