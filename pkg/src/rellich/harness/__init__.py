"""Numerical checks of the Hardy and Rellich inequalities on random radial test functions."""

from .checks import (
    Margin,
    check_1dim_hardy,
    check_davies_hinz,
    check_gene_main,
    check_gh,
    check_h1to0,
    check_lap_hardy,
    check_lap_hardy2,
    check_lim_ineq,
    check_musina,
    check_new_hardy,
    check_nonsharp_critical,
)
from .chain import chain_factors, chain_products_match_gap, gap_chain_check
from .runner import SAMPLERS, HarnessReport, run_case, run_harness
from .scaling import ScalingReport, first_order_quotient, log_weighted_mass, scaling_identity_check
from .testfunctions import TestFunction, origin_cutoff_spec, random_test_function
from .transform import GaussianProfile, TransformReport, sample_transform_cases, special_alphas, transform_equivalence

__all__ = [
    "Margin", "TestFunction", "HarnessReport", "SAMPLERS",
    "check_1dim_hardy", "check_davies_hinz", "check_gene_main", "check_gh", "check_h1to0",
    "check_lap_hardy", "check_lap_hardy2", "check_lim_ineq", "check_musina", "check_new_hardy",
    "check_nonsharp_critical", "origin_cutoff_spec", "random_test_function", "run_case", "run_harness",
    "chain_factors", "chain_products_match_gap", "gap_chain_check",
    "ScalingReport", "first_order_quotient", "log_weighted_mass", "scaling_identity_check",
    "GaussianProfile", "TransformReport", "sample_transform_cases", "special_alphas", "transform_equivalence",
]
