import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import trispline as ts
from trispline.geometry import cross, weight_gradient_matrix
from trispline.sampling import random_triangle

coord = st.floats(-10, 10, allow_nan=False)


def test_barycentric_examples(unit_triangle):
    np.testing.assert_allclose(ts.barycentric(unit_triangle, [1 / 3, 1 / 3]), [1 / 3] * 3, atol=1e-15)
    np.testing.assert_allclose(ts.barycentric(unit_triangle, unit_triangle.p1), [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(ts.barycentric(unit_triangle, [0.25, 0.25]), [0.5, 0.25, 0.25], atol=1e-15)


def test_barycentric_batch_shape(unit_triangle):
    b = ts.barycentric(unit_triangle, np.zeros((4, 5, 2)))
    assert b.l1.shape == (4, 5)
    assert b.as_array().shape == (4, 5, 3)


def test_degenerate_rejected():
    with pytest.raises(ts.GeometryError):
        ts.Triangle([[0, 0], [1, 1], [2, 2]])
    with pytest.raises(ts.GeometryError):
        ts.Triangle([[0, 0], [1, 0], [0.5, 1e-13]])
    with pytest.raises(ts.GeometryError):
        ts.Triangle([[0, 0], [1, 0], [np.nan, 1]])
    with pytest.raises(ts.GeometryError):
        ts.Triangle([[0, 0], [1, 0]])


def test_scale_invariant_degeneracy():
    # the same shape at very different scales is accepted either way
    base = np.array([[0, 0], [1, 0], [0.3, 0.7]])
    for s in (1e-8, 1.0, 1e8):
        ts.Triangle(base * s)


def test_reconstruction(rng):
    for _ in range(1000):
        tri = random_triangle(rng, min_quality=0.01)
        x = rng.uniform(-2, 2, size=2)
        lam = ts.barycentric(tri, x).as_array()
        assert abs(lam.sum() - 1) < 1e-12
        np.testing.assert_allclose(lam @ tri.vertices, x, rtol=1e-10, atol=1e-10)


def test_cramer_matches_determinant_ratio(rng):
    for _ in range(100):
        tri = random_triangle(rng)
        p = tri.vertices
        x = rng.uniform(-1, 1, size=2)
        area = cross(p[1] - p[0], p[2] - p[0])
        ref = [cross(p[(i + 1) % 3] - x, p[(i + 2) % 3] - x) / area for i in range(3)]
        np.testing.assert_allclose(ts.barycentric(tri, x), ref, atol=1e-12)


def test_weights_affine(rng):
    tri = random_triangle(rng)
    for _ in range(100):
        x, y, t = rng.normal(size=2), rng.normal(size=2), rng.uniform()
        lhs = ts.barycentric(tri, t * x + (1 - t) * y).as_array()
        rhs = t * ts.barycentric(tri, x).as_array() + (1 - t) * ts.barycentric(tri, y).as_array()
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_weight_gradients_unit(unit_triangle):
    g = weight_gradient_matrix(unit_triangle)
    np.testing.assert_allclose(g, [[-1, -1], [1, 0], [0, 1]], atol=1e-15)


def test_weight_gradients_kronecker(rng):
    for _ in range(50):
        tri = random_triangle(rng)
        G = ts.weight_gradients(tri)
        p = tri.vertices
        for i in range(3):
            for j in range(3):
                for k in range(3):
                    expected = float(i == j) - float(i == k)
                    assert abs(G[i](p[j] - p[k]) - expected) < 1e-12
        u = rng.normal(size=2)
        assert abs(sum(g(u) for g in G)) < 1e-12


def test_weight_gradients_finite_difference(rng):
    h = 1e-6
    for _ in range(50):
        tri = random_triangle(rng)
        x, u = rng.normal(size=2), rng.normal(size=2)
        fd = (ts.barycentric(tri, x + h * u).as_array() - ts.barycentric(tri, x).as_array()) / h
        exact = [g(u) for g in ts.weight_gradients(tri)]
        np.testing.assert_allclose(fd, exact, atol=1e-8)


def test_covector_linear(rng):
    c = ts.Covector2(*rng.normal(size=2))
    u, v = rng.normal(size=2), rng.normal(size=2)
    a, b = rng.normal(size=2)
    assert abs(c(a * u + b * v) - (a * c(u) + b * c(v))) < 1e-12
    np.testing.assert_allclose((c + c - c * 2.0).as_array(), [0, 0])


@pytest.mark.parametrize("alphas", [(0, 0, 0), (1, 0, 0), (0.3, -2.0, 4.5)])
def test_transversal_matrix(unit_triangle, alphas):
    a1, a2, a3 = alphas
    u = ts.transversal_from_alphas(unit_triangle, *alphas)
    M = ts.transversal_matrix(unit_triangle, u)
    expected = [[1, -1 - a2, a3], [a1, 1, -1 - a3], [-1 - a1, a2, 1]]
    np.testing.assert_allclose(M, expected, atol=1e-12)


def test_transversal_alpha_one(unit_triangle):
    M = ts.transversal_matrix(unit_triangle, ts.transversal_from_alphas(unit_triangle, 1, 0, 0))
    assert abs(M[1, 0] - 1) < 1e-12 and abs(M[2, 0] + 2) < 1e-12 and abs(M[0, 0] - 1) < 1e-12


def test_transversal_random_triangles(rng):
    for _ in range(200):
        tri = random_triangle(rng)
        al = rng.uniform(-10, 10, size=3)
        u = ts.transversal_from_alphas(tri, *al)
        M = ts.transversal_matrix(tri, u)
        a1, a2, a3 = al
        np.testing.assert_allclose(M, [[1, -1 - a2, a3], [a1, 1, -1 - a3], [-1 - a1, a2, 1]],
                                   atol=1e-9)
        for k in range(3):
            a, b = tri.edge(k)
            assert abs(cross(u[k], a - b)) > 0
            assert ts.is_transversal(u[k], a, b)


def test_default_edge_vector():
    np.testing.assert_allclose(ts.default_edge_vector([0, 0], [1, 0]), [0, 1])
    np.testing.assert_allclose(ts.default_edge_vector([0, 0], [0, 2]), [-1, 0])
    with pytest.raises(ts.GeometryError):
        ts.default_edge_vector([1, 1], [1, 1])


@given(coord, coord, coord, coord)
@settings(max_examples=200)
def test_default_edge_vector_perpendicular(ax, ay, bx, by):
    a, b = np.array([ax, ay]), np.array([bx, by])
    if np.hypot(*(b - a)) < 1e-6:
        return
    u = ts.default_edge_vector(a, b)
    assert abs(u @ (b - a)) <= 1e-12 * max(1.0, np.hypot(*(b - a)))
    assert abs(np.hypot(*u) - 1) < 1e-12


def test_parallel_not_transversal():
    assert not ts.is_transversal([2, 0], [0, 0], [1, 0])
    assert not ts.is_transversal([0, 0], [0, 0], [1, 0])
    assert ts.is_transversal([1, 1e-6], [0, 0], [1, 0])
