# tests/conftest.py
from fractions import Fraction

import numpy as np
import pytest

from torsionkit.config import get_settings
from torsionkit.services import surf
from torsionkit.services.complex import BasedChainComplex
from torsionkit.services.ratlin import RatMatrix, kernel_basis


def random_complex(rng: np.random.Generator) -> BasedChainComplex:
    """A valid three-term complex of total dimension at most 12.

    ∂_2 is a random combination of kernel vectors of a random ∂_1.
    """
    d0, d1, d2 = int(rng.integers(1, 5)), int(rng.integers(1, 6)), int(rng.integers(0, 4))
    d1_rows = [[Fraction(int(rng.integers(-2, 3))) for _ in range(d1)] for _ in range(d0)]
    boundary1 = RatMatrix.from_rows(d1_rows, d1)
    kernel = kernel_basis(boundary1)
    if len(kernel) and d2:
        mix = RatMatrix.from_rows(
            [[Fraction(int(rng.integers(-2, 3))) for _ in range(d2)] for _ in range(len(kernel))], d2
        )
        boundary2 = kernel.as_matrix() @ mix
    else:
        boundary2 = RatMatrix.zeros(d1, d2)
    return BasedChainComplex((d0, d1, d2), (boundary1, boundary2))


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def random_complexes():
    rng = np.random.default_rng(7)
    return [random_complex(rng) for _ in range(5)]


@pytest.fixture
def named_surfaces():
    doubled, _ = surf.double(surf.pants())
    return {
        "circle": surf.circle(),
        "cylinder": surf.cylinder(),
        "pants": surf.pants(),
        "doubled_pants": doubled,
        "torus_with_boundary": surf.torus_with_boundary()[0],
    }


@pytest.fixture
def doubled_pants():
    return surf.double(surf.pants())
