import pytest

from mixedmult import catalog
from mixedmult.monomial import MonomialIdeal


@pytest.fixture
def m2():
    return MonomialIdeal.maximal(2)


@pytest.fixture
def x2_y():
    return MonomialIdeal(2, ((2, 0), (0, 1)))


@pytest.fixture
def maximal():
    return catalog.load_filtration("maximal")


@pytest.fixture
def x2_y_adic():
    return catalog.load_filtration("x2_y")


@pytest.fixture
def sqrt2():
    return catalog.load_filtration("sqrt2")


@pytest.fixture
def fixed_plus_adic():
    return catalog.load_filtration("fixed_plus_adic")


@pytest.fixture
def weighted():
    return catalog.load_filtration("weighted_1_2")
