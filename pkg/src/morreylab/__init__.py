"""Numerical workbench for weighted ball-scan analysis on truncated boxes.

Grid quadrature, smoothing operators and their commutators, Muckenhoupt-type
weight scans, scan quasinorms with vanishing surrogates, radius-variable
sufficient conditions, and a config-driven verification harness with a CLI.
"""

from .conditions import (
    BallNormModel,
    ConditionReport,
    coupling_bound,
    coupling_bound_with_log,
    supremizing_integrand,
    tail_integral,
    tail_integral_with_log,
)
from .family import BallFamily, default_family, geometric_radii
from .grid import (
    Ball,
    CenterScan,
    Grid,
    SampledFunction,
    ball_mask,
    ball_point_count,
    ball_quadrature,
    make_grid,
    radial,
    sample,
)
from .harness import (
    EXPERIMENT_NAMES,
    ExperimentConfig,
    VerificationReport,
    export_report,
    load_config,
    parse_weight,
    roster_function,
    run_all,
    run_experiment,
    symbol_function,
)
from .morrey import (
    Envelope,
    EnvelopeClassReport,
    MorreyReport,
    bmo_seminorm,
    envelope_class_check,
    morrey_quasinorm,
    vanishing_check,
    weighted_lp_norm,
)
from .operators import (
    commutator_integral,
    commutator_maximal,
    default_radius_ladder,
    fractional_integral,
    fractional_maximal,
    ladder_defect,
    self_cell_kernel_integral,
)
from .reporting import config_hash, format_real, render_json, write_curve_csv, write_report
from .weights import (
    ExponentSet,
    Weight,
    WeightClassReport,
    ap_characteristic,
    apq_characteristic,
    apq_inclusion_check,
    closed_form_power_norm,
    unit_ball_volume,
    unit_sphere_area,
    untruncated_ball_norm,
    weight_lq_norm,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BallFamily",
    "BallNormModel",
    "CenterScan",
    "ConditionReport",
    "EXPERIMENT_NAMES",
    "Envelope",
    "EnvelopeClassReport",
    "ExperimentConfig",
    "ExponentSet",
    "Grid",
    "MorreyReport",
    "SampledFunction",
    "VerificationReport",
    "Weight",
    "WeightClassReport",
    "ap_characteristic",
    "apq_characteristic",
    "apq_inclusion_check",
    "ball_mask",
    "ball_point_count",
    "ball_quadrature",
    "bmo_seminorm",
    "closed_form_power_norm",
    "commutator_integral",
    "commutator_maximal",
    "config_hash",
    "coupling_bound",
    "coupling_bound_with_log",
    "default_family",
    "default_radius_ladder",
    "envelope_class_check",
    "export_report",
    "format_real",
    "fractional_integral",
    "fractional_maximal",
    "geometric_radii",
    "ladder_defect",
    "load_config",
    "make_grid",
    "morrey_quasinorm",
    "parse_weight",
    "radial",
    "render_json",
    "roster_function",
    "run_all",
    "run_experiment",
    "sample",
    "self_cell_kernel_integral",
    "supremizing_integrand",
    "symbol_function",
    "tail_integral",
    "tail_integral_with_log",
    "unit_ball_volume",
    "unit_sphere_area",
    "untruncated_ball_norm",
    "vanishing_check",
    "weight_lq_norm",
    "weighted_lp_norm",
    "write_curve_csv",
    "write_report",
]
