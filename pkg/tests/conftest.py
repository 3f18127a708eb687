"""Shared fixtures: moduli, standard instances, and frozen example sets."""

from __future__ import annotations

import pytest

from cyclotile import Modulus, Multiset, TilingInstance, standard_complement


@pytest.fixture(scope="session")
def m4() -> Modulus:
    return Modulus.of(4)


@pytest.fixture(scope="session")
def m12() -> Modulus:
    return Modulus.of(12)


@pytest.fixture(scope="session")
def m36() -> Modulus:
    return Modulus.of(36)


@pytest.fixture(scope="session")
def m225() -> Modulus:
    return Modulus.of(225)


@pytest.fixture(scope="session")
def m11025() -> Modulus:
    return Modulus.of(11025)


@pytest.fixture(scope="session")
def flat225(m225) -> TilingInstance:
    """The standard tiling of Z_225: A = 15*Z_15, B the complementary standard set."""
    a = standard_complement(m225, ({2}, {2}))
    b = standard_complement(m225, ({1}, {1}))
    return TilingInstance(m225, a, b)


@pytest.fixture(scope="session")
def flat11025(m11025) -> TilingInstance:
    """The standard tiling of Z_11025: A = the top-scale grid through 0."""
    a = Multiset.from_set(m11025, range(0, 11025, 105))
    b = standard_complement(m11025, ({1}, {1}, {1}))
    return TilingInstance(m11025, a, b)


# Frozen by a seeded transport-fill search (see tests/test_cyclo.py for the
# verification): a 15-element set in Z_225 with S_A = {9, 25} whose joint
# cyclotomic at 225 fails, i.e. (T1) holds and (T2) fails.
T2_FAILING_225 = (0, 5, 7, 10, 11, 12, 15, 45, 76, 102, 106, 121, 141, 197, 217)
