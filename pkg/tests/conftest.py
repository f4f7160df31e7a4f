import numpy as np
import pytest

import trispline as ts
from trispline.sampling import random_alphas, random_triangle

TUPLE_NAMES = ["quintic-rsd", "phi-phi", "affine-sextic"]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def unit_triangle():
    return ts.Triangle([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])


def random_patch(tup, rng, tri=None):
    """Patch with random germs and random admissible edge directions."""
    tri = random_triangle(rng) if tri is None else tri
    germs = [ts.VertexGerm(p, rng.normal(), rng.normal(size=2)) for p in tri.vertices]
    return ts.LocalPatch(tup, germs, ts.transversal_from_alphas(tri, *random_alphas(rng)))


def fd_gradient(fn, x, h):
    """Central differences of ``fn`` at points ``x`` of shape (N, 2)."""
    ex, ey = np.array([h, 0.0]), np.array([0.0, h])
    return np.column_stack([(fn(x + ex) - fn(x - ex)) / (2 * h),
                            (fn(x + ey) - fn(x - ey)) / (2 * h)])
