"""
Planes stay planes
==================

With the affine-invariant tuple, data sampled from a plane is reproduced
exactly. The quintic tuple bends it.
"""

import numpy as np
import trispline as ts

plane = lambda p: 0.5 * p[0] - 1.5 * p[1] + 2.0
mesh = ts.fan_mesh(6, f=plane, grad=lambda p: [0.5, -1.5])
x = np.array([[0.2, 0.1], [-0.3, 0.4], [0.0, -0.6]])

for name in ("affine-sextic", "quintic-rsd"):
    s = ts.build_spline(mesh, ts.builtin(name))
    print(f"{name:14s}", np.abs(s.eval(x) - [plane(p) for p in x]).max())
