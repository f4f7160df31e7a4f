"""Local interpolation operator on a single triangle.

A :class:`LocalPatch` combines first-order vertex data (value and gradient at
each vertex), one transversal direction per edge and an
:class:`~trispline.shapes.RsdTuple` into the function ``F = F0 - H``:

* ``F0`` is the basic Hermite blend of the vertex data through ``psi0, psi1``;
* ``H`` is the correction built from ``chi0, chi1`` that makes the derivative
  across each edge, in that edge's direction, depend on the edge's two vertices only.

All evaluators accept a single point of shape ``(2,)`` or a batch ``(N, 2)``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GeometryError
from .geometry import (INSIDE_TOL, Covector2, Triangle, as_triangle, barycentric,
                       is_transversal, weight_gradient_matrix)
from .shapes import S3


@dataclass(frozen=True)
class VertexGerm:
    """First-order data at a vertex: position, value and gradient functional."""

    p: np.ndarray
    f: float
    A: Covector2

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        A = self.A if isinstance(self.A, Covector2) else Covector2.from_array(self.A)
        A = Covector2(float(A.a), float(A.b))
        if p.shape != (2,) or not (np.all(np.isfinite(p)) and np.isfinite(self.f)
                                   and np.isfinite(A.a) and np.isfinite(A.b)):
            raise ValueError("vertex germ entries must be finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "f", float(self.f))
        object.__setattr__(self, "A", A)


def germs_from_function(tri, f, grad):
    """Germs sampling a function ``f`` and its gradient ``grad`` at the vertices."""
    tri = as_triangle(tri)
    return [VertexGerm(p, f(p), Covector2.from_array(grad(p))) for p in tri.vertices]


class LocalPatch:
    """C1 patch on one triangle (immutable after construction).

    Parameters
    ----------
    tup : RsdTuple
    germs : sequence of three VertexGerm
    u : array_like, shape (3, 2)
        ``u[k]`` is the transversal direction of the edge opposite vertex ``k``.

    Raises
    ------
    GeometryError
        Degenerate triangle or some ``u[k]`` parallel to its edge.
    """

    def __init__(self, tup, germs, u):
        if len(germs) != 3:
            raise ValueError("a patch needs exactly three germs")
        self.tuple = tup
        self.germs = tuple(g if isinstance(g, VertexGerm) else VertexGerm(*g) for g in germs)
        self.triangle = Triangle(np.array([g.p for g in self.germs]))
        u = np.array(u, dtype=float)
        if u.shape != (3, 2):
            raise ValueError(f"u must have shape (3, 2), got {u.shape}")
        for k in range(3):
            a, b = self.triangle.edge(k)
            if not is_transversal(u[k], a, b):
                raise GeometryError(f"u[{k}] is parallel to the opposite edge")
        u.setflags(write=False)
        self.u = u

        p = self.triangle.vertices
        self.f = np.array([g.f for g in self.germs])
        self.A = np.array([[g.A.a, g.A.b] for g in self.germs])
        self.G = weight_gradient_matrix(self.triangle)
        gu = self.G @ u.T
        # ratio[l, n] = G_l(u_n) / G_n(u_n)
        self.ratio = gu / np.diag(gu)[None, :]
        # edge_diff[l, m] = A_l(p_m - p_l)
        self.edge_diff = np.einsum("lc,lmc->lm", self.A, p[None, :, :] - p[:, None, :])
        for arr in (self.f, self.A, self.G, self.ratio, self.edge_diff):
            arr.setflags(write=False)

    # -- helpers --------------------------------------------------------------

    def weights(self, x, check=True):
        """Barycentric weights as a ``(3, ...)`` array; raises outside the triangle."""
        lam = np.stack(barycentric(self.triangle, x))
        if check and np.any(lam < -INSIDE_TOL):
            raise DomainError("point outside the patch triangle")
        return lam

    def _offsets(self, x):
        # A_k(x - p_k) for k = 1..3, shape (3, ...)
        x = np.asarray(x, dtype=float)
        return np.stack([self.A[k, 0] * (x[..., 0] - self.triangle.vertices[k, 0])
                         + self.A[k, 1] * (x[..., 1] - self.triangle.vertices[k, 1])
                         for k in range(3)])

    # -- basic interpolant ----------------------------------------------------

    def eval_f0(self, x):
        lam = self.weights(x)
        psi0, psi1 = self.tuple.psi0, self.tuple.psi1
        off = self._offsets(x)
        return sum(psi0.value(lam[k]) * self.f[k] + psi1.value(lam[k]) * off[k] for k in range(3))

    def grad_f0(self, x):
        lam = self.weights(x)
        psi0, psi1 = self.tuple.psi0, self.tuple.psi1
        off = self._offsets(x)
        ga = gb = 0.0
        for k in range(3):
            s = psi0.deriv(lam[k]) * self.f[k] + psi1.deriv(lam[k]) * off[k]
            w = psi1.value(lam[k])
            ga = ga + s * self.G[k, 0] + w * self.A[k, 0]
            gb = gb + s * self.G[k, 1] + w * self.A[k, 1]
        return Covector2(ga, gb)

    # -- correction -----------------------------------------------------------

    def eval_h(self, x):
        lam = self.weights(x)
        chi0, chi1 = self.tuple.chi0, self.tuple.chi1
        out = 0.0
        for l, m, n in S3:
            args = (lam[l], lam[m], lam[n])
            r = self.ratio[l, n]
            out = out + r * (self.f[l] * chi0.value(*args) + self.edge_diff[l, m] * chi1.value(*args))
        return out

    def grad_h(self, x):
        lam = self.weights(x)
        chi0, chi1 = self.tuple.chi0, self.tuple.chi1
        ga = gb = 0.0
        for perm in S3:
            l, m, n = perm
            args = (lam[l], lam[m], lam[n])
            c0 = self.ratio[l, n] * self.f[l]
            c1 = self.ratio[l, n] * self.edge_diff[l, m]
            d0 = chi0.partials(*args)
            d1 = chi1.partials(*args)
            for q in range(3):
                s = c0 * d0[q] + c1 * d1[q]
                ga = ga + s * self.G[perm[q], 0]
                gb = gb + s * self.G[perm[q], 1]
        return Covector2(ga, gb)

    # -- patch ----------------------------------------------------------------

    def eval(self, x):
        """``F(x) = F0(x) - H(x)``."""
        return self.eval_f0(x) - self.eval_h(x)

    def grad(self, x):
        """Gradient covector of ``F`` at ``x``."""
        return self.grad_f0(x) - self.grad_h(x)

    __call__ = eval

    def edge_point(self, k, t):
        """``t * p_i + (1 - t) * p_j`` on the edge opposite vertex ``k``."""
        a, b = self.triangle.edge(k)
        t = np.asarray(t, dtype=float)[..., None]
        return t * a + (1.0 - t) * b

    def edge_trace(self, k, t):
        """Value and transversal derivative of ``F`` at ``edge_point(k, t)``.

        Closed forms in terms of the two edge vertices only::

            value = psi0(t) f_i + psi1(t)(1-t) A_i(p_j-p_i)
                    + psi0(1-t) f_j + psi1(1-t) t A_j(p_i-p_j)
            slope = psi1(t) A_i(u_k) + psi1(1-t) A_j(u_k)
        """
        t = np.asarray(t, dtype=float)
        if np.any((t < 0.0) | (t > 1.0)):
            raise DomainError("edge parameter must lie in [0, 1]")
        i, j = (k + 1) % 3, (k + 2) % 3
        psi0, psi1 = self.tuple.psi0, self.tuple.psi1
        s = 1.0 - t
        value = (psi0.value(t) * self.f[i] + psi1.value(t) * s * self.edge_diff[i, j]
                 + psi0.value(s) * self.f[j] + psi1.value(s) * t * self.edge_diff[j, i])
        a_i = self.A[i] @ self.u[k]
        a_j = self.A[j] @ self.u[k]
        slope = psi1.value(t) * a_i + psi1.value(s) * a_j
        return value, slope


def eval_legacy_quintic(germs, u, x):
    """Quintic RSD interpolant written in its original closed form.

    ``F = F0 - H`` with ``F0 = sum Phi(l_i) f_i + Theta(l_i) A_i(x - p_i)`` and::

        H = sum_k (l_i^2 l_j^2 l_k) * M_k(u_k) / G_k(u_k)
        M_k(u) = sum_{i != k} G_i(u) * (30 f_i + 12 A_i(p_j - p_i))

    where ``{i, j} = {1, 2, 3} \\ {k}``. The factor ``l_k`` is kept explicitly
    instead of dividing a triple product by it, so edges pose no singularity.
    Independent of :class:`LocalPatch`; used as a cross-check.
    """
    germs = [g if isinstance(g, VertexGerm) else VertexGerm(*g) for g in germs]
    p = np.array([g.p for g in germs])
    f = np.array([g.f for g in germs])
    A = np.array([[g.A.a, g.A.b] for g in germs])
    u = np.asarray(u, dtype=float)
    x = np.asarray(x, dtype=float)

    # weights via the determinant-ratio formula
    lam = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        num = ((x[..., 0] - p[j, 0]) * (x[..., 1] - p[k, 1])
               - (x[..., 1] - p[j, 1]) * (x[..., 0] - p[k, 0]))
        den = ((p[i, 0] - p[j, 0]) * (p[i, 1] - p[k, 1])
               - (p[i, 1] - p[j, 1]) * (p[i, 0] - p[k, 0]))
        lam.append(num / den)
    if np.any(np.stack(lam) < -INSIDE_TOL):
        raise DomainError("point outside the triangle")

    def G(i, v):
        # lambda_i(x + v) - lambda_i(x), affine so any base point works
        j, k = (i + 1) % 3, (i + 2) % 3
        den = ((p[i, 0] - p[j, 0]) * (p[i, 1] - p[k, 1])
               - (p[i, 1] - p[j, 1]) * (p[i, 0] - p[k, 0]))
        e = p[j] - p[k]
        return (e[1] * v[0] - e[0] * v[1]) / den

    F0 = 0.0
    for i in range(3):
        t = lam[i]
        Phi = t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2)
        Theta = t ** 3 * (4.0 - 3.0 * t)
        F0 = F0 + Phi * f[i] + Theta * (A[i, 0] * (x[..., 0] - p[i, 0]) + A[i, 1] * (x[..., 1] - p[i, 1]))

    H = 0.0
    for k in range(3):
        i, j = (k + 1) % 3, (k + 2) % 3
        Mk = 0.0
        for a, b in ((i, j), (j, i)):
            Mk = Mk + G(a, u[k]) * (30.0 * f[a] + 12.0 * (A[a] @ (p[b] - p[a])))
        H = H + lam[i] ** 2 * lam[j] ** 2 * lam[k] * Mk / G(k, u[k])
    return F0 - H
