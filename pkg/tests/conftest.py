"""
Shared fixtures
"""

import pytest

from app.core.fixtures import and_family, biased_family, identity_family, uniform_family


@pytest.fixture
def identity1():
    return identity_family(1)


@pytest.fixture
def point_mass3():
    return identity_family(3)


@pytest.fixture
def and_fam():
    return and_family()


@pytest.fixture
def biased1():
    """Pr[out = z] = 3/4"""
    return biased_family(1)


@pytest.fixture
def uniform2():
    return uniform_family(2, 2)
