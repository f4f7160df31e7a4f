"""Deterministic sample sets used by the validators and the test-suite."""

import os

import numpy as np
from scipy.stats import qmc

from .geometry import Triangle, transversal_from_alphas

DEFAULT_SEED = 0x5EED


def default_seed():
    """Sampling seed, overridable through the ``TRISPLINE_SEED`` variable."""
    value = os.environ.get("TRISPLINE_SEED")
    return int(value, 0) if value else DEFAULT_SEED


def simplex_points(n, seed=None):
    """``n`` low-discrepancy points on the unit 2-simplex, shape ``(n, 3)``.

    A scrambled Halton sequence in the unit cube, normalized by the
    coordinate sum.
    """
    seed = default_seed() if seed is None else seed
    cube = qmc.Halton(d=3, scramble=True, seed=seed).random(n)
    cube = np.maximum(cube, 1e-12)
    return cube / cube.sum(axis=1, keepdims=True)


def simplex_edge_points(k, n):
    """``n`` equispaced points on the simplex edge where coordinate ``k`` is 0.

    For ``k = 2`` these are ``(t, 1 - t, 0)``; the other edges use the
    cyclic layout ``(0, t, 1 - t)`` and ``(1 - t, 0, t)``.
    """
    t = np.linspace(0.0, 1.0, n)
    pts = np.zeros((n, 3))
    i, j = (k + 1) % 3, (k + 2) % 3
    if k == 2:
        i, j = 0, 1
    pts[:, i] = t
    pts[:, j] = 1.0 - t
    return pts


def random_triangle(rng, min_quality=0.1):
    """Random triangle in ``[-1, 1]^2`` with ``|det| / L^2 >= min_quality``."""
    while True:
        v = rng.uniform(-1.0, 1.0, size=(3, 2))
        det = abs((v[0, 0] - v[2, 0]) * (v[1, 1] - v[2, 1]) - (v[0, 1] - v[2, 1]) * (v[1, 0] - v[2, 0]))
        longest = max(np.sum((v[a] - v[b]) ** 2) for a, b in ((0, 1), (1, 2), (2, 0)))
        if det >= min_quality * longest:
            return Triangle(v)


def random_alphas(rng, bound=3.0):
    return rng.uniform(-bound, bound, size=3)


def random_transversals(tri, rng, bound=3.0):
    """Admissible edge directions built from random ratio parameters."""
    return transversal_from_alphas(tri, *random_alphas(rng, bound))


def interior_points(tri, n, rng, margin=0.0):
    """``n`` random points of ``tri`` with all weights above ``margin``."""
    w = rng.dirichlet((1.0, 1.0, 1.0), size=n)
    w = margin + (1.0 - 3.0 * margin) * w
    return w @ tri.vertices
