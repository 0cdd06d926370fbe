import pytest

from fhsopt.construct import construct_class1, construct_class2, construct_class3
from fhsopt.fmaps import frobenius_map
from fhsopt.galois import GF, Tower

# every field with q <= 343 and odd p, by (p, m)
SMALL_FIELDS = [(3, 1), (3, 2), (3, 3), (3, 4), (3, 5), (5, 1), (5, 2), (5, 3), (7, 1),
                (7, 2), (7, 3), (11, 1), (11, 2), (13, 1), (13, 2), (17, 1), (17, 2),
                (19, 1), (23, 1), (29, 1), (31, 1), (37, 1), (101, 1), (331, 1)]


@pytest.fixture(scope="session")
def gf9():
    return GF(3, 2, [2, 1, 1])


@pytest.fixture(scope="session")
def golden_k1(gf9):
    return construct_class1(gf9, 1, [1], 3, None, ["0", "a", "2a"])


@pytest.fixture(scope="session")
def class2_set():
    field = GF(5, 3)
    return construct_class2(field, [1, field.alpha.code], 2, 3, frobenius_map(field, 1))


@pytest.fixture(scope="session")
def tower49():
    return Tower(GF(7, 2), 1)


@pytest.fixture(scope="session")
def class3_set(tower49):
    return construct_class3(tower49, [1], 3, {"kind": "trace_power", "d": 5})


K2_REPS = ["0", "a", "a^11", "2a", "2a^11", "a+a^11", "a+2a^11", "2a+a^11", "2a+2a^11"]


@pytest.fixture(scope="session")
def gf81():
    return GF(3, 4, [2, 1, 0, 0, 1])


@pytest.fixture(scope="session")
def golden_k2(gf81):
    beta = gf81.alpha_pow(10)
    sigma = [0] + [gf81.pow(beta, a) for a in range(1, 9)]
    return construct_class1(gf81, 2, [-1, 1, 1], 7, sigma, K2_REPS, enforce=False)
