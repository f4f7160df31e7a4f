"""Conforming triangle meshes and the global C1 spline built on them.

Every edge carries one transversal vector, stored under the sorted pair of its
vertex indices. Both triangles sharing an edge read the same vector, which is
what makes the assembled piecewise function continuously differentiable.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GeometryError, MeshError, TupleValidationError
from .geometry import (DEGENERACY_EPS, Covector2, Triangle, cross, default_edge_vector,
                       is_transversal)
from .patch import LocalPatch, VertexGerm

#: Meshes with fewer triangles are located by brute force.
BRUTE_FORCE_LIMIT = 64
#: Slack on the minimum barycentric weight when deciding "inside the mesh".
LOCATE_TOL = 1e-10


def edge_key(i, j):
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, eq=False)
class Mesh:
    """Vertex data, ascending index triples and the edge-vector table.

    Build instances through :func:`build_mesh`, which validates conformity.
    """

    points: np.ndarray  # (N, 2)
    values: np.ndarray  # (N,)
    gradients: np.ndarray  # (N, 2)
    triangles: np.ndarray  # (M, 3), rows ascending
    edges: dict  # (i, j) with i < j -> u, shape (2,)
    edge_triangles: dict = field(repr=False)  # (i, j) -> list of triangle indices

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def interior_edges(self):
        return sorted(e for e, ts in self.edge_triangles.items() if len(ts) == 2)

    @property
    def boundary_edges(self):
        return sorted(e for e, ts in self.edge_triangles.items() if len(ts) == 1)

    def germ(self, i):
        return VertexGerm(self.points[i], self.values[i], self.gradients[i])

    def opposite_edges(self, m):
        """Edge keys opposite the three vertices of triangle ``m``."""
        a = self.triangles[m]
        return [edge_key(int(a[(k + 1) % 3]), int(a[(k + 2) % 3])) for k in range(3)]

    def bbox(self):
        used = self.points[np.unique(self.triangles)]
        return (*used.min(axis=0), *used.max(axis=0))

    def with_values(self, values, gradients):
        """Same geometry and edge vectors with new vertex data."""
        return build_mesh(self.points, self.triangles, values, gradients, self.edges)

    def to_dict(self):
        return {
            "vertices": [{"x": float(p[0]), "y": float(p[1]), "f": float(f),
                          "gx": float(g[0]), "gy": float(g[1])}
                         for p, f, g in zip(self.points, self.values, self.gradients)],
            "triangles": self.triangles.tolist(),
            "edge_vectors": {f"{i}-{j}": [float(u[0]), float(u[1])]
                             for (i, j), u in sorted(self.edges.items())},
        }


def _bbox_pairs(boxes):
    """Index pairs ``a < b`` whose axis-aligned boxes overlap."""
    lo, hi = boxes[:, :2], boxes[:, 2:]
    order = np.argsort(lo[:, 0], kind="stable")
    pairs = []
    for pos, a in enumerate(order):
        for b in order[pos + 1:]:
            if lo[b, 0] > hi[a, 0]:
                break
            if lo[b, 1] <= hi[a, 1] and lo[a, 1] <= hi[b, 1]:
                pairs.append((int(min(a, b)), int(max(a, b))))
    return pairs


def _segments_cross(p, q, r, s, eps):
    """Proper crossing of segments ``pq`` and ``rs`` (end points excluded)."""
    d1 = cross(q - p, r - p)
    d2 = cross(q - p, s - p)
    d3 = cross(s - r, p - r)
    d4 = cross(s - r, q - r)
    return d1 * d2 < -eps and d3 * d4 < -eps


def _check_conformity(points, tris, edge_tris):
    seen = {}
    for m, t in enumerate(map(tuple, tris)):
        if t in seen:
            raise MeshError(f"triangles {seen[t]} and {m} coincide", triangles=(seen[t], m))
        seen[t] = m

    for (i, j), ts in edge_tris.items():
        if len(ts) > 2:
            raise MeshError(f"edge {i}-{j} is shared by more than two triangles",
                            triangles=tuple(ts[:3]))
        if len(ts) == 2:
            a, b = ts
            third = [next(v for v in tris[m] if v not in (i, j)) for m in ts]
            e = points[j] - points[i]
            sa = cross(e, points[third[0]] - points[i])
            sb = cross(e, points[third[1]] - points[i])
            if sa * sb >= 0.0:
                raise MeshError(f"triangles {a} and {b} overlap across edge {i}-{j}",
                                triangles=(a, b))

    corners = points[tris]
    boxes = np.concatenate([corners.min(axis=1), corners.max(axis=1)], axis=1)
    scale = float(np.max(boxes[:, 2:] - boxes[:, :2])) if len(tris) else 1.0
    eps = DEGENERACY_EPS * scale ** 4
    for a, b in _bbox_pairs(boxes):
        ta, tb = tris[a], tris[b]
        # a vertex of one triangle inside or on the other one
        for first, second, sa, sb in ((ta, tb, a, b), (tb, ta, b, a)):
            tri = Triangle(points[second])
            for v in first:
                if v in second:
                    continue
                x = points[v] - tri.p3
                l1 = cross(x, tri.p2 - tri.p3) / tri.det
                l2 = cross(tri.p1 - tri.p3, x) / tri.det
                if min(l1, l2, 1.0 - l1 - l2) >= -1e-12:
                    raise MeshError(f"vertex {v} of triangle {sa} lies in triangle {sb}",
                                    triangles=(min(sa, sb), max(sa, sb)))
        for ea in ((ta[0], ta[1]), (ta[1], ta[2]), (ta[0], ta[2])):
            for eb in ((tb[0], tb[1]), (tb[1], tb[2]), (tb[0], tb[2])):
                if set(ea) & set(eb):
                    continue
                if _segments_cross(points[ea[0]], points[ea[1]], points[eb[0]], points[eb[1]], eps):
                    raise MeshError(f"edges of triangles {a} and {b} cross", triangles=(a, b))


def build_mesh(points, triangles, values=None, gradients=None, edge_vectors=None):
    """Validate a triangulation and attach an edge-vector table.

    Parameters
    ----------
    points : array_like, shape (N, 2)
    triangles : array_like of int, shape (M, 3)
        Vertex index triples; each row is sorted ascending on input.
    values, gradients : array_like, shapes (N,) and (N, 2), optional
        Vertex germ data, zero by default.
    edge_vectors : dict, optional
        ``{(i, j): u}``; keys are normalized to ``i < j``. Missing edges get
        :func:`~trispline.geometry.default_edge_vector` of the sorted pair.

    Raises
    ------
    MeshError
        Bad indices, coincident triangles, overlaps, crossings, T-junctions,
        conflicting or unknown edge-vector keys.
    GeometryError
        Degenerate triangle or an edge vector parallel to its edge.
    """
    points = np.array(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2 or not np.all(np.isfinite(points)):
        raise MeshError("points must be a finite (N, 2) array")
    tris = np.array(triangles)
    if tris.size == 0:
        raise MeshError("a mesh needs at least one triangle")
    if tris.ndim != 2 or tris.shape[1] != 3 or not np.issubdtype(tris.dtype, np.integer):
        raise MeshError("triangles must be an (M, 3) integer array")
    if tris.min() < 0 or tris.max() >= len(points):
        raise MeshError("triangle vertex index out of range")
    tris = np.sort(tris, axis=1)
    if np.any(tris[:, 0] == tris[:, 1]) or np.any(tris[:, 1] == tris[:, 2]):
        raise MeshError("triangle with repeated vertex index")
    n = len(points)
    values = np.zeros(n) if values is None else np.array(values, dtype=float).reshape(n)
    gradients = np.zeros((n, 2)) if gradients is None else np.array(gradients, dtype=float).reshape(n, 2)

    for m, t in enumerate(tris):
        try:
            Triangle(points[t])
        except GeometryError as exc:
            raise GeometryError(f"triangle {m}: {exc}") from None

    edge_tris = {}
    for m, (a, b, c) in enumerate(tris.tolist()):
        for e in ((a, b), (b, c), (a, c)):
            edge_tris.setdefault(e, []).append(m)
    _check_conformity(points, tris, edge_tris)

    supplied = {}
    for key, u in (edge_vectors or {}).items():
        k = edge_key(int(key[0]), int(key[1]))
        u = np.array(u, dtype=float).reshape(2)
        if k in supplied and not np.array_equal(supplied[k], u):
            raise MeshError(f"conflicting edge vectors for edge {k[0]}-{k[1]}")
        if k not in edge_tris:
            raise MeshError(f"edge vector given for {k[0]}-{k[1]}, which is not an edge")
        supplied[k] = u

    edges = {}
    for i, j in sorted(edge_tris):
        if (i, j) in supplied:
            u = supplied[(i, j)]
            if not (np.all(np.isfinite(u)) and is_transversal(u, points[i], points[j])):
                raise GeometryError(f"edge vector of {i}-{j} is parallel to the edge")
        else:
            u = default_edge_vector(points[i], points[j])
        u.setflags(write=False)
        edges[(i, j)] = u

    for arr in (points, values, gradients, tris):
        arr.setflags(write=False)
    return Mesh(points, values, gradients, tris, edges, edge_tris)


def mesh_from_dict(data):
    """Mesh from the JSON layout used by the command line tools."""
    try:
        verts = data["vertices"]
        pts = [[v["x"], v["y"]] for v in verts]
        vals = [v.get("f", 0.0) for v in verts]
        grads = [[v.get("gx", 0.0), v.get("gy", 0.0)] for v in verts]
        tris = data["triangles"]
        raw = data.get("edge_vectors") or {}
        ev = {}
        for key, u in raw.items():
            i, j = (int(s) for s in str(key).split("-"))
            ev.setdefault(edge_key(i, j), []).append(u)
    except (KeyError, TypeError, ValueError) as exc:
        raise MeshError(f"malformed mesh description: {exc}") from None
    for k, us in ev.items():
        if any(not np.array_equal(np.asarray(us[0], float), np.asarray(u, float)) for u in us[1:]):
            raise MeshError(f"conflicting edge vectors for edge {k[0]}-{k[1]}")
    return build_mesh(pts, np.asarray(tris, dtype=int) if len(tris) else tris,
                      vals, grads, {k: us[0] for k, us in ev.items()})


def load_mesh(path):
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MeshError(f"{path}: invalid JSON ({exc})") from None
    return mesh_from_dict(data)


def structured_mesh(nx, ny, bbox=(0.0, 0.0, 1.0, 1.0), f=None, grad=None):
    """``nx`` by ``ny`` cells, each split along its rising diagonal."""
    x0, y0, x1, y1 = bbox
    xs, ys = np.linspace(x0, x1, nx + 1), np.linspace(y0, y1, ny + 1)
    X, Y = np.meshgrid(xs, ys)
    points = np.column_stack([X.ravel(), Y.ravel()])
    idx = lambda i, j: j * (nx + 1) + i
    tris = []
    for j in range(ny):
        for i in range(nx):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            tris += [(a, b, c), (a, c, d)]
    values = None if f is None else np.array([f(p) for p in points])
    grads = None if grad is None else np.array([grad(p) for p in points])
    return build_mesh(points, tris, values, grads)


def fan_mesh(n, radius=1.0, f=None, grad=None):
    """``n`` triangles around a centre vertex (index 0)."""
    ang = 2.0 * np.pi * np.arange(n) / n
    points = np.vstack([[0.0, 0.0], radius * np.column_stack([np.cos(ang), np.sin(ang)])])
    tris = [(0, 1 + k, 1 + (k + 1) % n) for k in range(n)]
    values = None if f is None else np.array([f(p) for p in points])
    grads = None if grad is None else np.array([grad(p) for p in points])
    return build_mesh(points, tris, values, grads)


# ---------------------------------------------------------------- spline ---

class _Grid:
    """Uniform background grid of triangle bounding boxes."""

    def __init__(self, corners):
        lo, hi = corners.min(axis=1), corners.max(axis=1)
        self.origin = lo.min(axis=0)
        extent = np.maximum(hi.max(axis=0) - self.origin, 1e-300)
        n = max(1, int(np.ceil(np.sqrt(len(corners)))))
        self.shape = np.array([n, n])
        self.cell = extent / n
        self.cells = {}
        a = self._index(lo)
        b = self._index(hi)
        for m in range(len(corners)):
            for i in range(a[m, 0], b[m, 0] + 1):
                for j in range(a[m, 1], b[m, 1] + 1):
                    self.cells.setdefault((i, j), []).append(m)

    def _index(self, x):
        return np.clip(((x - self.origin) / self.cell).astype(int), 0, self.shape - 1)

    def candidates(self, x):
        """Group point indices by cell; yields ``(point_indices, triangle_indices)``."""
        inside = np.all((x >= self.origin) & (x <= self.origin + self.cell * self.shape), axis=1)
        cid = self._index(x)
        keys = cid[:, 0] * self.shape[1] + cid[:, 1]
        for key in np.unique(keys[inside]):
            sel = np.nonzero(inside & (keys == key))[0]
            tri = self.cells.get((int(key // self.shape[1]), int(key % self.shape[1])), [])
            if tri:
                yield sel, np.array(tri)


class Spline:
    """Piecewise C1 function: one :class:`LocalPatch` per mesh triangle.

    Patch ``m`` uses, for the edge opposite its ``k``-th vertex, the vector
    stored for that edge in ``mesh.edges``.
    """

    def __init__(self, mesh, tup, patches=None):
        self.mesh = mesh
        self.tuple = tup
        if patches is None:
            patches = []
            for m, t in enumerate(mesh.triangles):
                u = np.array([mesh.edges[e] for e in mesh.opposite_edges(m)])
                patches.append(LocalPatch(tup, [mesh.germ(int(i)) for i in t], u))
        self.patches = tuple(patches)
        corners = mesh.points[mesh.triangles]
        # weights as affine maps: lam = L[m] @ (x, y, 1)
        L = np.empty((len(corners), 3, 3))
        for m, c in enumerate(corners):
            L[m] = np.linalg.inv(np.vstack([c.T, np.ones(3)]))
        self._lam = L
        self._grid = _Grid(corners) if len(corners) >= BRUTE_FORCE_LIMIT else None

    def _replace_patch(self, m, patch):
        """Copy with patch ``m`` swapped out (testing hook for negative controls)."""
        patches = list(self.patches)
        patches[m] = patch
        return Spline(self.mesh, self.tuple, patches)

    def _min_weights(self, x, tris):
        xh = np.column_stack([x, np.ones(len(x))])
        lam = np.einsum("mij,nj->nmi", self._lam[tris], xh)
        return lam.min(axis=2)

    def locate(self, x):
        """Triangle index per point (``-1`` outside), maximizing the smallest weight."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.full(len(x), -1)
        best = np.full(len(x), -np.inf)
        if self._grid is None:
            groups = [(np.arange(len(x)), np.arange(self.mesh.n_triangles))]
        else:
            groups = self._grid.candidates(x)
        for sel, tris in groups:
            w = self._min_weights(x[sel], tris)
            k = np.argmax(w, axis=1)
            best[sel] = w[np.arange(len(sel)), k]
            out[sel] = tris[k]
        out[best < -LOCATE_TOL] = -1
        return out

    def nearest_triangle(self, x):
        w = self._min_weights(np.atleast_2d(np.asarray(x, dtype=float)),
                              np.arange(self.mesh.n_triangles))
        return np.argmax(w, axis=1)

    def _dispatch(self, x, method, fill_value):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        loc = self.locate(pts)
        if fill_value is None and np.any(loc < 0):
            bad = pts[np.argmax(loc < 0)]
            near = int(self.nearest_triangle(bad)[0])
            raise DomainError(f"point ({bad[0]:.6g}, {bad[1]:.6g}) is outside the mesh; "
                              f"nearest triangle is {near}", nearest=near)
        return single, pts, loc

    def eval(self, x, fill_value=None):
        """Spline value at ``x`` of shape ``(2,)`` or ``(N, 2)``.

        Points outside the mesh raise :class:`DomainError` unless a
        ``fill_value`` is given.
        """
        single, pts, loc = self._dispatch(x, "eval", fill_value)
        out = np.full(len(pts), np.nan if fill_value is None else fill_value, dtype=float)
        for m in np.unique(loc[loc >= 0]):
            sel = loc == m
            out[sel] = self.patches[m].eval(pts[sel])
        return out[0] if single else out

    def grad(self, x, fill_value=None):
        """Gradient covector at ``x``; components are arrays for batches."""
        single, pts, loc = self._dispatch(x, "grad", fill_value)
        out = np.full((len(pts), 2), np.nan if fill_value is None else fill_value, dtype=float)
        for m in np.unique(loc[loc >= 0]):
            sel = loc == m
            out[sel] = self.patches[m].grad(pts[sel]).as_array()
        return Covector2.from_array(out[0] if single else out)

    __call__ = eval


def build_spline(mesh, tup):
    """Assemble the spline; the tuple must satisfy the RSD conditions.

    Raises
    ------
    TupleValidationError
        Carries the failing :class:`~trispline.validation.ValidationReport`.
    """
    from .validation import check_rsd_conditions

    report = check_rsd_conditions(tup)
    if not report.passed:
        raise TupleValidationError(
            f"tuple {tup.name!r} violates the RSD conditions "
            f"({report.witness.get('check')}: {report.max_violation:.3e})", report=report)
    return Spline(mesh, tup)


# -------------------------------------------------------------- C1 scan ---

@dataclass
class EdgeJump:
    edge: tuple
    triangles: tuple
    value_jump: float
    gradient_jump: float


@dataclass
class C1Report:
    edges: list

    @property
    def max_value_jump(self):
        return max((e.value_jump for e in self.edges), default=0.0)

    @property
    def max_gradient_jump(self):
        return max((e.gradient_jump for e in self.edges), default=0.0)

    def passes(self, value_tol=1e-10, gradient_tol=1e-7):
        return self.max_value_jump <= value_tol and self.max_gradient_jump <= gradient_tol

    def to_dict(self):
        return {
            "max_value_jump": self.max_value_jump,
            "max_gradient_jump": self.max_gradient_jump,
            "edges": [{"edge": f"{e.edge[0]}-{e.edge[1]}", "triangles": list(e.triangles),
                       "value_jump": e.value_jump, "gradient_jump": e.gradient_jump}
                      for e in self.edges],
        }


def check_c1(spline, samples_per_edge=101):
    """Value and gradient jumps across every interior edge.

    Both adjacent patches are evaluated directly at
    ``t p_i + (1 - t) p_j`` for ``t = 0, 1/(n-1), ..., 1``.
    """
    if samples_per_edge < 2:
        raise ValueError("samples_per_edge must be at least 2")
    t = np.linspace(0.0, 1.0, samples_per_edge)[:, None]
    mesh = spline.mesh
    jumps = []
    for i, j in mesh.interior_edges:
        a, b = mesh.edge_triangles[(i, j)]
        x = t * mesh.points[i] + (1.0 - t) * mesh.points[j]
        pa, pb = spline.patches[a], spline.patches[b]
        dv = np.abs(pa.eval(x) - pb.eval(x)).max()
        dg = np.abs(pa.grad(x).as_array() - pb.grad(x).as_array()).max()
        jumps.append(EdgeJump((i, j), (a, b), float(dv), float(dg)))
    return C1Report(jumps)


# ---------------------------------------------------------- OBJ surface ---

def refine_triangle(density):
    """Barycentric lattice of one triangle: weights ``(K, 3)`` and faces ``(d^2, 3)``."""
    d = int(density)
    if d < 1:
        raise ValueError("density must be at least 1")
    index, weights = {}, []
    for a in range(d, -1, -1):
        for b in range(d - a, -1, -1):
            index[(a, b)] = len(weights)
            weights.append((a / d, b / d, (d - a - b) / d))
    faces = []
    for a in range(d):
        for b in range(d - a):
            # upward cell, then the downward one next to it
            faces.append((index[(a + 1, b)], index[(a, b + 1)], index[(a, b)]))
            if b + 1 < d - a:
                faces.append((index[(a + 1, b)], index[(a + 1, b + 1)], index[(a, b + 1)]))
    return np.array(weights), np.array(faces)


def surface_obj(spline, density=4):
    """Graph of the spline as Wavefront OBJ text.

    Vertices are not shared between triangles, so each triangle contributes
    ``(d+1)(d+2)/2`` vertices and ``d^2`` faces.
    """
    weights, faces = refine_triangle(density)
    lines = [f"# graph surface, {spline.mesh.n_triangles} triangles, density {density}"]
    face_lines = []
    offset = 1
    for m, patch in enumerate(spline.patches):
        x = weights @ patch.triangle.vertices
        z = patch.eval(x)
        lines += [f"v {p[0]:.17g} {p[1]:.17g} {h:.17g}" for p, h in zip(x, z)]
        # keep the faces counter-clockwise in the plane
        fc = faces if patch.triangle.det > 0 else faces[:, ::-1]
        face_lines += [f"f {a + offset} {b + offset} {c + offset}" for a, b, c in fc]
        offset += len(weights)
    return "\n".join(lines + face_lines) + "\n"
