"""
Checking shape-function tuples
==============================

The validators sample each property on the simplex and report the worst
violation together with a witness point that can be replayed.
"""

import trispline as ts

for tup in ts.builtin_tuples():
    print(tup.name)
    for rep in ts.validate_all(tup):
        print(f"  {rep.property:22s} {'pass' if rep.passed else 'FAIL'}  {rep.max_violation:.2e}")

###############################################################################
# The quintic tuple reproduces constants but not planes. The witness says
# which sub-check failed and where.
rep = ts.check_affinity_invariance(ts.builtin("quintic-rsd"))
print(rep.witness["check"], rep.witness["x"], rep.witness["coef"])
print("replayed violation:", ts.replay(ts.builtin("quintic-rsd"), rep.witness))

###############################################################################
# Interpolating lambda_1 does not depend on the edge directions for the
# affine-invariant tuple.
print(ts.check_u_independence(ts.builtin("affine-sextic")).to_json(indent=1)[:300])
