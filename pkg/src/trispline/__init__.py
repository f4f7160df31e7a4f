"""C1 Hermite interpolation on triangle meshes with reduced side derivatives.

Typical use::

    import trispline as ts
    mesh = ts.structured_mesh(4, 4, f=f, grad=grad)
    spline = ts.build_spline(mesh, ts.builtin("affine-sextic"))
    spline.eval([0.3, 0.4])
"""

from .errors import (DomainError, GeometryError, MeshError, PreconditionError,
                     TrisplineError, TupleValidationError)
from .geometry import (Barycentric, Covector2, Triangle, barycentric, default_edge_vector,
                       is_transversal, transversal_from_alphas, transversal_matrix,
                       weight_gradients)
from .mesh import (C1Report, Mesh, Spline, build_mesh, build_spline, check_c1, fan_mesh,
                   load_mesh, mesh_from_dict, structured_mesh, surface_obj)
from .patch import LocalPatch, VertexGerm, eval_legacy_quintic, germs_from_function
from .shapes import (FunctionCurve, FunctionModifier, PolyCurve, PolyModifier, RsdTuple,
                     builtin, builtin_tuples, enforce_range_shift, is_d_symmetric, load_tuple,
                     phi, product_modifier, range_shift_defect, ratio_modifier, symmetrize,
                     theta)
from .validation import (ValidationReport, check_admissible_pair, check_affinity_invariance,
                         check_range_shift, check_rsd_conditions, check_u_independence,
                         replay, validate_all)

__version__ = "0.1.0"
