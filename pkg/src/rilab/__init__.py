"""rilab: numerical verification lab for geometric functional inequalities.

Builds rotationally symmetric compact manifolds as 1D spectral models, evolves
them by Ricci flow, and audits log-Sobolev inequalities, entropy monotonicity,
heat-semigroup ultracontractivity, Sobolev inequalities, and noncollapsing
volume bounds with explicit constants.
"""

from .flow import (
    FlowTrajectory,
    conjugate_heat_solve,
    entropy_w,
    entropy_wstar,
    monotonicity_audit,
    mu_star_estimate,
    sphere_flow,
    sphere_trajectory,
    warped_flow_evolve,
)
from .functionals import (
    LsiProfile,
    MetricConstants,
    lambda0,
    lsi_check,
    lsi_fixed_metric,
    metric_constants,
    sample_family,
    sobolev_constants,
    theorem_abc_profile,
)
from .geometry import (
    ScalarField,
    SpectralManifold,
    WarpedProfile,
    build_sphere,
    build_warped,
    dumbbell_profile,
    manifold_from_config,
    sphere_profile,
)
from .noncollapse import NoncollapseBound, kappa_check, volume_iteration
from .reports import InequalityReport
from .semigroup import (
    SchrodingerOperator,
    c5_constants,
    d3_constants,
    davies_tau,
    heat_apply,
    ultracontractivity_bound,
)

__version__ = "0.1.0"

__all__ = [
    "FlowTrajectory",
    "InequalityReport",
    "LsiProfile",
    "MetricConstants",
    "NoncollapseBound",
    "ScalarField",
    "SchrodingerOperator",
    "SpectralManifold",
    "WarpedProfile",
    "build_sphere",
    "build_warped",
    "c5_constants",
    "conjugate_heat_solve",
    "d3_constants",
    "davies_tau",
    "dumbbell_profile",
    "entropy_w",
    "entropy_wstar",
    "heat_apply",
    "kappa_check",
    "lambda0",
    "lsi_check",
    "lsi_fixed_metric",
    "manifold_from_config",
    "metric_constants",
    "monotonicity_audit",
    "mu_star_estimate",
    "sample_family",
    "sobolev_constants",
    "sphere_flow",
    "sphere_profile",
    "sphere_trajectory",
    "theorem_abc_profile",
    "ultracontractivity_bound",
    "volume_iteration",
    "warped_flow_evolve",
    "__version__",
]
