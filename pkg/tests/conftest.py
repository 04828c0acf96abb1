"""Shared fixtures: model spaces, seeded generators, frozen step cases."""

from __future__ import annotations

import numpy as np
import pytest

from cat0flow.geometry import EuclideanSpace, ProductSpace, QuadrantSpace, TreeSpace


def make_tripod() -> TreeSpace:
    return TreeSpace([("c", "a", 1.0), ("c", "b", 1.0), ("c", "d", 1.0)])


@pytest.fixture
def e1():
    return EuclideanSpace(1)


@pytest.fixture
def e2():
    return EuclideanSpace(2)


@pytest.fixture
def quadrant():
    return QuadrantSpace()


@pytest.fixture
def tripod():
    return make_tripod()


@pytest.fixture
def product(tripod):
    return ProductSpace(tripod, EuclideanSpace(1))


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)
