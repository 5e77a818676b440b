"""Pytest configuration and fixtures for spinstat tests."""

from typing import Callable

import numpy as np
import pytest

from spinstat.su2 import SU2Element, Vec3


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so sampled kinematics are reproducible."""
    return np.random.default_rng(20240917)


@pytest.fixture
def random_direction(rng) -> Callable[[], Vec3]:
    """Factory for random unit vectors."""

    def make() -> Vec3:
        v = rng.normal(size=3)
        return Vec3.from_array(v / np.linalg.norm(v))

    return make


@pytest.fixture
def random_pair(random_direction) -> Callable[[], tuple[Vec3, Vec3]]:
    """Factory for well-separated, non-collinear direction pairs."""

    def make() -> tuple[Vec3, Vec3]:
        while True:
            v_a, v_b = random_direction(), random_direction()
            if v_a.cross(v_b).norm() > 0.1:
                return v_a, v_b

    return make


@pytest.fixture
def random_su2(rng) -> Callable[[], SU2Element]:
    """Factory for random SU(2) elements."""

    def make() -> SU2Element:
        q = rng.normal(size=4)
        q /= np.linalg.norm(q)
        return SU2Element(*(float(c) for c in q))

    return make
