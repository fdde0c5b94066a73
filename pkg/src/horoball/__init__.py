"""Hyperbolic geometry of the unit ball in C^n and the dynamics of
holomorphic self-maps whose image lies in a horosphere."""

from .analysis import (
    Check,
    HorosphereBound,
    RadialLimitError,
    SpectrumSummary,
    bcp_coefficients,
    horosphere_bound,
    jacobian,
    k_limit,
    radial_derivative,
    radial_fixed_point_check,
    spectrum_summary,
    strong_nonexpansivity_check,
)
from .ball import (
    GeometryError,
    HorosphereParams,
    dhoro,
    in_horosphere,
    inner,
    mobius,
    project_along,
    rho,
    sigma,
)
from .dynamics import (
    ClassifyConfig,
    InteriorFixedPoint,
    IterationTrace,
    RateParams,
    SinkConvergence,
    Undetermined,
    boundary_uniqueness_check,
    classify,
    iterate,
    julia_check,
    midpoint_inequality_check,
    rate_bound,
    sink_invariance_check,
    step_inequality_check,
    verify_rate,
)
from .maps import (
    Compose,
    Constant,
    ConvexCombination,
    Identity,
    LinearContraction,
    MobiusAuto,
    SelfMap,
    SiegelAffine,
    Unitary,
    evaluate,
    map_from_json,
)
from .siegel import (
    HoroContext,
    cayley,
    cayley_inv,
    horoshift,
    s_height,
    sigma_via_siegel,
    t_form,
)

__version__ = "0.1.0"
