import math

import pytest

from hilbert_exceptional import FiniteOpenSet


@pytest.fixture
def unit_interval() -> FiniteOpenSet:
    return FiniteOpenSet.from_pairs([(0.0, 1.0)])


@pytest.fixture
def two_intervals() -> FiniteOpenSet:
    """Sublevel set at lambda = ln 2 has roots -sqrt(3) and sqrt(3)"""
    return FiniteOpenSet.from_pairs([(0.0, 1.0), (2.0, 3.0)])


@pytest.fixture
def ln2() -> float:
    return math.log(2.0)
