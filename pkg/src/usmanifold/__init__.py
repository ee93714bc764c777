"""Riemannian optimization on the manifold of unitary symmetric matrices."""
from .errors import (CayleySingular, DegenerateBaseline, DegenerateRetraction,
                     DimensionError, FormatError, InvalidInput, NotSymmetric,
                     NotUnitarySymmetric, UsManifoldError)
from .manifold import (GeodesicFrame, TangentDirection, UsPoint, cayley,
                       cayley_inv, geodesic_frame, geodesic_point, load_point,
                       project_tangent, random_point, real_orth_decomp,
                       retract, save_point, takagi)
from .optim import (CostFunction, OptimConfig, OptimReport,
                    optimize_ls, optimize_po, optimize_unitary_then_project,
                    riemannian_grad)
from .policy import NumericPolicy, get_policy, numeric_policy, set_policy

__version__ = "0.1.0"
