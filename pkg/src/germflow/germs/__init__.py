from .families import (
    BosonicUM,
    GaussianParams,
    HeisenbergGauss,
    Plane,
    Ray,
    Sphere,
    SpinSU2,
    germ_overlap,
    germ_state,
    momentum_map,
    rotation_matrix,
    spin_matrices,
)
from .limits import (
    EquivalenceReport,
    FunnelReport,
    ResidualReport,
    SemiclassicalSchedule,
    bracket_residual,
    classical_bracket_of_pullbacks,
    fit_exponent,
    funnel_limit,
    germ_delta_limit,
    germ_equivalence,
    pullback,
)
from .quantization import (
    QuadratureRule,
    QuadratureWarning,
    default_rule,
    dirac_residual,
    quantize_sphere,
    sphere_bracket,
    sphere_rule,
    vonneumann_residual,
)
