"""
A C1 spline on a grid mesh
==========================

Each triangle gets one patch; both triangles at an edge read the same edge
vector from the mesh, which makes the assembled surface C1.
"""

import numpy as np
import trispline as ts

f = lambda p: np.exp(-((p[0] - 0.5) ** 2 + (p[1] - 0.5) ** 2) * 4)
grad = lambda p: -8 * (np.asarray(p) - 0.5) * f(p)

mesh = ts.structured_mesh(4, 4, f=f, grad=grad)
spline = ts.build_spline(mesh, ts.builtin("affine-sextic"))
print(mesh.n_triangles, "triangles,", len(mesh.interior_edges), "interior edges")

###############################################################################
# Jumps across interior edges are at roundoff level.
rep = ts.check_c1(spline, 101)
print("value jump", rep.max_value_jump, "gradient jump", rep.max_gradient_jump)

###############################################################################
# Evaluate on a grid and compare to the sampled function.
X, Y = np.meshgrid(np.linspace(0, 1, 41), np.linspace(0, 1, 41))
pts = np.column_stack([X.ravel(), Y.ravel()])
err = np.abs(spline.eval(pts) - np.array([f(p) for p in pts]))
print("max interpolation error", err.max())

###############################################################################
# Export the graph for a mesh viewer.
obj = ts.surface_obj(spline, density=6)
print(obj.splitlines()[0], "...", obj.count("\nv "), "vertices")
