"""
Interpolating on one triangle
=============================

Vertex values and gradients on a triangle, one direction per edge, and a
shape-function tuple define a local patch. Here we check that it matches the
data at the vertices and that its slope across each edge only sees that
edge's two vertices.
"""

import numpy as np
import trispline as ts

tri = ts.Triangle([[0.0, 0.0], [1.0, 0.2], [0.3, 0.9]])

# sample f(x, y) = sin(x) + y^2 at the corners
f = lambda p: np.sin(p[..., 0]) + p[..., 1] ** 2
grad = lambda p: [np.cos(p[0]), 2 * p[1]]
germs = ts.germs_from_function(tri, f, grad)

###############################################################################
# Edge directions with a prescribed ratio matrix; zero alphas give medians.
u = ts.transversal_from_alphas(tri, 0.0, 0.0, 0.0)
patch = ts.LocalPatch(ts.builtin("quintic-rsd"), germs, u)

for g in patch.germs:
    print("vertex", g.p, "F =", patch.eval(g.p), "f =", g.f)

###############################################################################
# Along edge 0 the transversal slope is a blend of the two end gradients.
t = np.linspace(0, 1, 5)
value, slope = patch.edge_trace(0, t)
print("slope on edge 0:", slope)
print("same via grad:  ", patch.grad(patch.edge_point(0, t))(u[0]))

###############################################################################
# Inside, the patch is a smooth approximation of f.
x = np.array([[0.4, 0.35], [0.5, 0.5]])
print("F(x) =", patch.eval(x), " f(x) =", f(x))
