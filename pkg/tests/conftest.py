from functools import lru_cache

import pytest

from quatforget.orders import maximal_order
from quatforget.polarization import make_principal_datum
from quatforget.quaternion import algebra_for_discriminant

SHIPPED = (6, 10, 14, 15, 21, 22, 26, 33, 34, 35)


@lru_cache(maxsize=None)
def order_for(D: int):
    return maximal_order(algebra_for_discriminant(D))


@lru_cache(maxsize=None)
def datum_for(D: int):
    return make_principal_datum(order_for(D))


@pytest.fixture(scope="session")
def d6():
    return datum_for(6)


@pytest.fixture(scope="session")
def d10():
    return datum_for(10)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
