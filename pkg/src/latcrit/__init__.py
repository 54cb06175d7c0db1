"""Critical determinants, admissible lattices and Dirichlet-type constants.

Planar convex domains, their critical lattices, the cylinder built over a
domain, and the associated inhomogeneous approximation constants.  Heavy
loops run on a compiled backend when available, with a numpy fallback
(see ``latcrit.backend_name``).
"""

from ._kernels import BACKEND as backend_name
from .errors import (
    BracketError,
    CapacityError,
    CriticalityError,
    DegeneracyError,
    FlowRangeError,
    LatcritError,
    NormSpecError,
    UnsupportedDomainError,
)
from .norms import ConvexDomain2, CylinderGauge, parse_norm_spec
from .lattices import (
    Lattice,
    covolume,
    enumerate_in_ball,
    gauss_reduce,
    is_admissible,
    shortest_gauge_vector,
)
from .critical2d import (
    HexagonConfig,
    critical_determinant,
    critical_determinant_2d,
    critical_locus_2d,
    hexagon_partner,
)
from .cylinder import (
    CriticalLatticeDesc,
    Piece,
    ShearPath,
    ZClass,
    classify_z,
    corroborate_delta_equality,
    descend_covolume,
    hajos_sample,
    realize_critical,
    shear_to_top,
)
from .dirichlet import (
    BestApproxRecord,
    DirichletEstimate,
    XPair,
    ba_pair_cubic,
    best_approximations,
    dirichlet_constant,
    dist_to_integer_lattice,
    parse_x,
)
from .orbitflow import (
    OrbitSample,
    dynamical_constant,
    flow_matrix,
    orbit_min_gauge,
    u_matrix,
)
from .verify import CheckResult, run_battery

__version__ = "0.1.0"

__all__ = [
    "BestApproxRecord",
    "BracketError",
    "CapacityError",
    "CheckResult",
    "ConvexDomain2",
    "CriticalLatticeDesc",
    "CriticalityError",
    "CylinderGauge",
    "DegeneracyError",
    "DirichletEstimate",
    "FlowRangeError",
    "HexagonConfig",
    "Lattice",
    "LatcritError",
    "NormSpecError",
    "OrbitSample",
    "Piece",
    "ShearPath",
    "UnsupportedDomainError",
    "XPair",
    "ZClass",
    "backend_name",
    "ba_pair_cubic",
    "best_approximations",
    "classify_z",
    "corroborate_delta_equality",
    "covolume",
    "critical_determinant",
    "critical_determinant_2d",
    "critical_locus_2d",
    "descend_covolume",
    "dirichlet_constant",
    "dist_to_integer_lattice",
    "dynamical_constant",
    "enumerate_in_ball",
    "flow_matrix",
    "gauss_reduce",
    "hajos_sample",
    "hexagon_partner",
    "is_admissible",
    "orbit_min_gauge",
    "parse_norm_spec",
    "parse_x",
    "realize_critical",
    "shear_to_top",
    "shortest_gauge_vector",
    "u_matrix",
    "__version__",
]
