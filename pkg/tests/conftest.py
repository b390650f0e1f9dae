import numpy as np
import pytest

from riemscale import Euclidean, Sphere, SymmetricPositiveDefinite

MANIFOLDS = {
    "euclidean:3": Euclidean(3),
    "sphere:2": Sphere(2),
    "spd:2": SymmetricPositiveDefinite(2),
}

SCALES = (0.25, 1.0, 4.0, 10.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20250808)


@pytest.fixture(params=sorted(MANIFOLDS))
def manifold(request):
    return MANIFOLDS[request.param]
