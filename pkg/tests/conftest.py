import numpy as np
import pytest

from classbreadth import corpus
from classbreadth.group import build_group


def cayley(G):
    """Full multiplication table of a built group, via its public ``mul``."""
    a = G.all
    return np.asarray(G.mul(a[:, None], a[None, :]), dtype=np.int64)


def build(name, *params):
    return build_group(corpus.family(name, *params))


@pytest.fixture(scope="session")
def heis3():
    return build("heisenberg", 3)


@pytest.fixture(scope="session")
def ea9():
    return build("elementary_abelian", 3, 2)


@pytest.fixture(scope="session")
def wreath3():
    return build("wreath_cyclic", 3)


@pytest.fixture(scope="session")
def ut43():
    return build("unitriangular", 4, 3)
