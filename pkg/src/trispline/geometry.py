"""Planar triangle primitives.

Points and vectors are plain ``numpy`` arrays whose last axis has length 2,
so every function here broadcasts over batches of points of shape ``(..., 2)``.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import GeometryError

#: Relative degeneracy threshold: ``|det| > DEGENERACY_EPS * L**2``.
DEGENERACY_EPS = 1e-12

#: Barycentric slack accepted as "inside" a triangle.
INSIDE_TOL = 1e-12


def cross(a, b):
    """z-component of the cross product of planar vectors (broadcasting)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


@dataclass(frozen=True)
class Covector2:
    """Linear functional ``u -> a*u_x + b*u_y`` on the plane.

    ``a`` and ``b`` may be scalars or equally shaped arrays, in which case the
    object represents a field of covectors (one per evaluation point).
    """

    a: float
    b: float

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        return self.a * u[..., 0] + self.b * u[..., 1]

    def __add__(self, other):
        return Covector2(self.a + other.a, self.b + other.b)

    def __sub__(self, other):
        return Covector2(self.a - other.a, self.b - other.b)

    def __neg__(self):
        return Covector2(-self.a, -self.b)

    def __mul__(self, scalar):
        return Covector2(self.a * scalar, self.b * scalar)

    __rmul__ = __mul__

    def as_array(self):
        """Components stacked on the last axis, shape ``(..., 2)``."""
        return np.stack(np.broadcast_arrays(self.a, self.b), axis=-1)

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=float)
        return cls(arr[..., 0], arr[..., 1])


class Barycentric(NamedTuple):
    l1: np.ndarray
    l2: np.ndarray
    l3: np.ndarray

    def as_array(self):
        """Weights stacked on the last axis, shape ``(..., 3)``."""
        return np.stack(np.broadcast_arrays(*self), axis=-1)


@dataclass(frozen=True, eq=False)
class Triangle:
    """Non-degenerate planar triangle with vertices ``p1, p2, p3``.

    Raises
    ------
    GeometryError
        If ``|det[p1-p3, p2-p3]| <= DEGENERACY_EPS * L**2`` with ``L`` the
        longest edge, or if a coordinate is not finite.
    """

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.shape != (3, 2):
            raise GeometryError(f"triangle needs vertices of shape (3, 2), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise GeometryError("triangle vertices must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        det = cross(v[0] - v[2], v[1] - v[2])
        longest = max(np.sum((v[i] - v[j]) ** 2) for i, j in ((0, 1), (1, 2), (2, 0)))
        if not abs(det) > DEGENERACY_EPS * longest:
            raise GeometryError(f"degenerate triangle (det={det:.3e}, L^2={longest:.3e})")
        object.__setattr__(self, "det", float(det))

    @property
    def p1(self):
        return self.vertices[0]

    @property
    def p2(self):
        return self.vertices[1]

    @property
    def p3(self):
        return self.vertices[2]

    @property
    def scale(self):
        """Longest edge length."""
        v = self.vertices
        return float(max(np.linalg.norm(v[i] - v[j]) for i, j in ((0, 1), (1, 2), (2, 0))))

    @property
    def centroid(self):
        return self.vertices.mean(axis=0)

    def edge(self, k):
        """End points ``(p_i, p_j)`` of the edge opposite vertex ``k`` (0-based).

        The orientation follows the cyclic order, so edge 0 is ``[p2, p3]``,
        edge 1 is ``[p3, p1]`` and edge 2 is ``[p1, p2]``.
        """
        i, j = (k + 1) % 3, (k + 2) % 3
        return self.vertices[i], self.vertices[j]


def as_triangle(tri):
    return tri if isinstance(tri, Triangle) else Triangle(tri)


def barycentric(tri, x):
    """Barycentric weights of point(s) ``x`` with respect to ``tri``.

    Solves ``x - p3 = l1 (p1 - p3) + l2 (p2 - p3)`` by Cramer's rule and sets
    ``l3 = 1 - l1 - l2``.

    Parameters
    ----------
    tri : Triangle or array_like, shape (3, 2)
    x : array_like, shape (..., 2)

    Returns
    -------
    Barycentric
        Weights with the broadcast shape of ``x[..., 0]``.
    """
    tri = as_triangle(tri)
    p1, p2, p3 = tri.vertices
    d = np.asarray(x, dtype=float) - p3
    l1 = cross(d, p2 - p3) / tri.det
    l2 = cross(p1 - p3, d) / tri.det
    return Barycentric(l1, l2, 1.0 - l1 - l2)


def weight_gradients(tri):
    """Constant derivatives ``G_1, G_2, G_3`` of the barycentric weights.

    ``G_i(u) = l_i(x + u) - l_i(x)`` for every ``x``; the three covectors sum
    to zero.
    """
    tri = as_triangle(tri)
    p1, p2, p3 = tri.vertices
    e1, e2 = p1 - p3, p2 - p3
    g1 = np.array([e2[1], -e2[0]]) / tri.det
    g2 = np.array([-e1[1], e1[0]]) / tri.det
    g3 = -g1 - g2
    return tuple(Covector2(float(g[0]), float(g[1])) for g in (g1, g2, g3))


def weight_gradient_matrix(tri):
    """The three weight gradients as rows of a ``(3, 2)`` array."""
    return np.array([g.as_array() for g in weight_gradients(tri)])


def transversal_from_alphas(tri, a1, a2, a3):
    """Edge directions with a prescribed ratio matrix.

    Returns ``u`` of shape ``(3, 2)`` such that ``[G_i(u_j) / G_j(u_j)]`` is::

        [[1,       -1 - a2,  a3     ],
         [a1,       1,      -1 - a3 ],
         [-1 - a1,  a2,      1      ]]

    Each ``u_k`` is the median direction from the midpoint of the opposite
    edge towards ``p_k``, tilted along that edge, so it is never parallel to it.
    """
    tri = as_triangle(tri)
    p = tri.vertices
    alphas = (a1, a2, a3)
    u = np.empty((3, 2))
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        u[k] = p[k] - 0.5 * (p[i] + p[j]) + (0.5 + alphas[k]) * (p[i] - p[j])
    return u


def transversal_matrix(tri, u):
    """Ratio matrix ``M[i, j] = G_i(u_j) / G_j(u_j)`` for directions ``u``."""
    g = weight_gradient_matrix(tri)
    gu = g @ np.asarray(u, dtype=float).T
    return gu / np.diag(gu)[None, :]


def default_edge_vector(a, b):
    """Unit normal of the segment ``a -> b``: ``(b - a)`` rotated by +90 degrees.

    Callers pass the end points ordered by ascending global vertex index so
    both triangles sharing the edge obtain bit-identical vectors.
    """
    d = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    n = float(np.hypot(d[0], d[1]))
    if not n > 0.0:
        raise GeometryError("zero-length edge")
    return np.array([-d[1], d[0]]) / n


def is_transversal(u, a, b, tol=DEGENERACY_EPS):
    """True if direction ``u`` is not parallel to the segment ``[a, b]``.

    Uses the sine of the enclosed angle, ``|det[u, b - a]| / (|u| |b - a|)``.
    """
    u = np.asarray(u, dtype=float)
    e = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    nu, ne = np.linalg.norm(u), np.linalg.norm(e)
    if nu == 0.0 or ne == 0.0:
        return False
    return bool(abs(cross(u, e)) > tol * nu * ne)
