"""Tikhonov-regularized splitting iterations with certified rates.

The package simulates damped Krasnoselskii-Mann, forward-backward, and
two-resolvent (Douglas-Rachford style) iterations, evaluates the full
calculus of certified convergence thresholds attached to the schedule's
quantitative witnesses, and checks every certified bound against the
simulated trajectories.
"""

from .satnat import BoundedNat, DEFAULT_CAP, bn_max
from .moduli import (
    AffineFn,
    ComposeFn,
    ConstFn,
    ExpCeilFn,
    IdentityFn,
    MaxFn,
    NatFunction,
    PolyCeilFn,
    QuantitativeModuli,
    Schedule,
    StockInstance,
    TableFn,
    constant_sequence,
    monotonize,
    poly_decay_to_one,
    stock_instances,
    validate_Q,
)
from .rates import (
    CounterexampleFn,
    as_counterexample,
    ceil_ln_upper,
    dr_gap_threshold,
    iterate_fn,
    mu,
    mu1,
    mu2,
    mu3,
    mu4,
    mu5,
    nu1,
    nu2,
    projection_bound,
    psi,
    rate_G,
    sigma,
    theta,
)
from .operators import (
    AffineResolvent,
    AveragedMap,
    BallProjection,
    BoxProjection,
    ConstantMap,
    DRMap,
    FBMap,
    HalfspaceProjection,
    HyperplaneProjection,
    Identity,
    Operator,
    QuadraticGradient,
    ReflectedResolvent,
    SoftThreshold,
    ZeroMap,
    compose_dr,
    compose_fb,
    fixed_point_residual,
    project_affine_hyperplane,
    project_ball,
    project_box,
    project_halfspace,
    resolvent_affine,
    sample_averaged_identity,
    sample_cocoercivity,
    sample_firm_nonexpansiveness,
    sample_nonexpansiveness,
    soft_threshold,
)
from .iterations import Trajectory, export_csv, run_km, run_tdr, run_tfb, run_tkm
from .verify import (
    CheckResult,
    check_asymptotic_regularity,
    check_asymptotic_regularity_streaming,
    check_boundedness,
    check_dr_gap,
    check_dr_gap_streaming,
    check_strong_convergence,
    find_metastability_witness,
    oracle_lemma_sigma,
    oracle_lemma_theta,
)
from .config import (
    ConfigError,
    load_config,
    moduli_from_config,
    natfn_from_config,
    operator_from_config,
    run_experiment,
    schedule_from_config,
    x0_from_config,
)

__version__ = "0.1.0"

__all__ = [
    "BoundedNat",
    "DEFAULT_CAP",
    "bn_max",
    "AffineFn",
    "ComposeFn",
    "ConstFn",
    "ExpCeilFn",
    "IdentityFn",
    "MaxFn",
    "NatFunction",
    "PolyCeilFn",
    "QuantitativeModuli",
    "Schedule",
    "StockInstance",
    "TableFn",
    "constant_sequence",
    "monotonize",
    "poly_decay_to_one",
    "stock_instances",
    "validate_Q",
    "CounterexampleFn",
    "as_counterexample",
    "ceil_ln_upper",
    "dr_gap_threshold",
    "iterate_fn",
    "mu",
    "mu1",
    "mu2",
    "mu3",
    "mu4",
    "mu5",
    "nu1",
    "nu2",
    "projection_bound",
    "psi",
    "rate_G",
    "sigma",
    "theta",
    "AffineResolvent",
    "AveragedMap",
    "BallProjection",
    "BoxProjection",
    "ConstantMap",
    "DRMap",
    "FBMap",
    "HalfspaceProjection",
    "HyperplaneProjection",
    "Identity",
    "Operator",
    "QuadraticGradient",
    "ReflectedResolvent",
    "SoftThreshold",
    "ZeroMap",
    "compose_dr",
    "compose_fb",
    "fixed_point_residual",
    "project_affine_hyperplane",
    "project_ball",
    "project_box",
    "project_halfspace",
    "resolvent_affine",
    "sample_averaged_identity",
    "sample_cocoercivity",
    "sample_firm_nonexpansiveness",
    "sample_nonexpansiveness",
    "soft_threshold",
    "Trajectory",
    "export_csv",
    "run_km",
    "run_tdr",
    "run_tfb",
    "run_tkm",
    "CheckResult",
    "check_asymptotic_regularity",
    "check_asymptotic_regularity_streaming",
    "check_boundedness",
    "check_dr_gap",
    "check_dr_gap_streaming",
    "check_strong_convergence",
    "find_metastability_witness",
    "oracle_lemma_sigma",
    "oracle_lemma_theta",
    "ConfigError",
    "load_config",
    "moduli_from_config",
    "natfn_from_config",
    "operator_from_config",
    "run_experiment",
    "schedule_from_config",
    "x0_from_config",
]
