"""Collision probabilities and contact-location laws for two randomly
drifting convex bodies, with a reproducible Monte Carlo validation engine."""

__version__ = "0.1.0"

from .analytic import (
    ModelParams,
    asymptotic_prob_coefficient,
    cauchy_cdf_1d,
    collision_prob_closed,
    collision_prob_exact,
    conditional_location_density,
    location_coefficient,
    location_density_limit,
    radial_cdf_conditional,
    unit_sphere_area,
)
from .geometry import (
    Ball,
    CollisionEvent,
    ComSplit,
    Ellipsoid,
    VelocityPair,
    collision_criterion,
    collision_event,
    collision_time,
    com_split,
    contact_point,
    contact_scale,
    hit_fraction_mc,
)
from .montecarlo import (
    Accumulator,
    Histogram,
    SimConfig,
    histogram,
    proportion_report,
    run,
    run_conditional,
    run_naive,
    sample_cap_direction,
    sample_relative_speed,
    sample_velocity_pair,
    write_sample_csv,
)
from .specfun import f_cdf, kolmogorov_sf, log_gamma, reg_inc_beta
from .stats import (
    EstimateReport,
    SampleDump,
    StatTestResult,
    angular_uniformity_test,
    binomial_ci,
    ks_test,
    load_sample_csv,
    sphere_coord_cdf,
)

__all__ = [
    "__version__",
    "ModelParams",
    "collision_prob_exact",
    "collision_prob_closed",
    "asymptotic_prob_coefficient",
    "location_coefficient",
    "location_density_limit",
    "conditional_location_density",
    "radial_cdf_conditional",
    "cauchy_cdf_1d",
    "unit_sphere_area",
    "Ball",
    "Ellipsoid",
    "VelocityPair",
    "ComSplit",
    "CollisionEvent",
    "com_split",
    "collision_criterion",
    "collision_time",
    "contact_point",
    "collision_event",
    "contact_scale",
    "hit_fraction_mc",
    "SimConfig",
    "Accumulator",
    "Histogram",
    "run",
    "run_naive",
    "run_conditional",
    "sample_velocity_pair",
    "sample_cap_direction",
    "sample_relative_speed",
    "histogram",
    "proportion_report",
    "write_sample_csv",
    "log_gamma",
    "reg_inc_beta",
    "f_cdf",
    "kolmogorov_sf",
    "StatTestResult",
    "EstimateReport",
    "SampleDump",
    "ks_test",
    "sphere_coord_cdf",
    "angular_uniformity_test",
    "binomial_ci",
    "load_sample_csv",
]
