"""
Restoring the reproduction of constants
=======================================

A tuple whose first modifier is not symmetric still satisfies the boundary
conditions but no longer reproduces constants. ``enforce_range_shift``
symmetrizes it and adds a degree-zero correction term.
"""

import numpy as np
import trispline as ts
from trispline.shapes import PolyModifier

chi0 = PolyModifier({(3, 2, 1): 60.0, (2, 3, 1): 30.0, (4, 2, 1): -30.0, (3, 3, 1): -30.0})
chi1 = PolyModifier({(2, 3, 1): 30.0})
tup = ts.RsdTuple(ts.phi(), ts.phi(), chi0, chi1, "lopsided")

print("RSD before:", ts.check_rsd_conditions(tup).passed)
print("range shift before:", ts.check_range_shift(tup).max_violation)

fixed = ts.enforce_range_shift(tup)
print("RSD after:", ts.check_rsd_conditions(fixed).passed)
print("range shift after:", ts.check_range_shift(fixed).max_violation)

###############################################################################
# The missing mass at the centroid when chi0 is dropped entirely is 10/27.
zero = ts.RsdTuple(ts.phi(), ts.phi(), PolyModifier(), chi1)
print(ts.range_shift_defect(zero).value(1 / 3, 1 / 3, 1 / 3), 10 / 27)
