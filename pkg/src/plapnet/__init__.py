"""Reaction-diffusion on finite weighted networks driven by the graph
p-Laplacian: operators, mixed boundary closure, the first eigenvalue,
blow-up growth conditions, energy functionals and adaptive time integration.
"""

from .boundary import (
    BoundaryCondition,
    boundary_equation,
    boundary_residual,
    close_boundary,
    solve_boundary_equation,
)
from .eigen import EigenPair, RayleighConfig, eigen_residual, first_eigenpair, rayleigh_quotient
from .errors import (
    ConfigError,
    ConvergenceFailure,
    DegenerateCoefficients,
    HypothesisFailed,
    InvalidParams,
    NonFinite,
    NonpositiveB0,
    NotAdmissible,
    NotBoundaryVertex,
    NotFound,
    OutOfRange,
    PlapnetError,
    QuadratureFailure,
    SchemaError,
    UnknownVertex,
    ValidationError,
)
from .functionals import EnergySample, blowup_time_bound, functional_a, functional_b, lower_envelope
from .integrate import (
    CompareReport,
    Diagnostics,
    IntegratorConfig,
    SimulationReport,
    compare,
    default_dt,
    simulate,
    step,
)
from .network import Network, boundary_boundary_edges, degree, load_network, load_network_file
from .nonlinearity import (
    ConditionParams,
    ConditionReport,
    GrowthWitness,
    InitialData,
    PowerLaw,
    PowerPlusConst,
    TableNonlinearity,
    TailProfile,
    check_offset_condition,
    check_plain_condition,
    check_weighted_condition,
    default_grid,
    find_initial,
    growth_witness,
    parse_nonlinearity,
    tail_profile,
)
from .operators import (
    check_state,
    green_identity_residual,
    p_laplacian,
    p_laplacian_all,
    p_normal_derivative,
    pflux,
    pflux_scalar,
)

__version__ = "0.1.0"
