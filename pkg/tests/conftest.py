import os
import sys
import math

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'lib'))

from zetabranch.moebius import Moebius
from zetabranch.group import GroupPresentation, enumerateBall

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'fixtures')

ROOT2 = math.sqrt(2.0)
# Strip of the example family at parameter 2.
BETA_PRIME_2 = 3.0 + 3.0 * ROOT2

def fixture(name: str) -> str:
    return os.path.join(FIXTURES, name)

def hecke(L: float = 2.0) -> Moebius:
    norm = 2.0 * math.sqrt(L)
    return Moebius.fromEntries((L + 1) / norm, (L - 1) / norm, (L - 1) / norm, (L + 1) / norm)

S = Moebius.fromEntries(0.0, -1.0, 1.0, 0.0)

@pytest.fixture(scope='session')
def hecke_group():
    return GroupPresentation.of([('h', hecke()), ('s', S)], name='hecke-free-l2')

@pytest.fixture(scope='session')
def cyclic_group():
    return GroupPresentation.of([('h', hecke())], name='cyclic-l2')

@pytest.fixture(scope='session')
def schottky_group():
    return GroupPresentation.of([
        ('a', Moebius.fromEntries(3.0, 8.0, 1.0, 3.0)),
        ('b', Moebius.fromEntries(2.0, 1.5, 2.0, 2.0)),
    ], name='schottky')

@pytest.fixture(scope='session')
def hecke_ball(hecke_group):
    return enumerateBall(hecke_group, 6)

@pytest.fixture(scope='session')
def cyclic_ball(cyclic_group):
    return enumerateBall(cyclic_group, 6)

@pytest.fixture(scope='session')
def schottky_ball(schottky_group):
    return enumerateBall(schottky_group, 6)
