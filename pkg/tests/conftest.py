import random
from fractions import Fraction

import pytest

from dimermahler.kasteleyn import EDGE_LABELS, EdgeWeighting
from dimermahler.lattice_graph import build_torus_graph


@pytest.fixture(scope="session")
def g1():
    return build_torus_graph(1)


@pytest.fixture(scope="session")
def g2():
    return build_torus_graph(2)


def random_weighting(rng: random.Random, lo: int = 0, hi: int = 6) -> EdgeWeighting:
    return EdgeWeighting({label: Fraction(rng.randint(lo, hi), rng.randint(1, 5)) for label in EDGE_LABELS})
