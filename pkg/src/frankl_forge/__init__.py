"""Weighted Frankl checks, lifted-family entropy identities and the entropy functional F_{k,m}."""

from .families import (
    ClosureOp,
    SetFamily,
    WeightSpec,
    abundance,
    best_element,
    close_under,
    dualize,
    enumerate_closed_families,
    is_intersection_closed,
    is_union_closed,
    random_closed_family,
    verify_frankl,
    weight,
)
from .functional import (
    B_lower_bound,
    DiscreteMeasure,
    F,
    F_type1,
    F_type2,
    F_type3,
    FunctionalParams,
    g,
    h,
)
from .lifting import LiftedFamily, Symbol, lift, mu_i, mul_symbol, theta
from .optimizer import OptimizerConfig, min_over_types, scan_km, threshold_phi, two_point_scan

__all__ = [
    "B_lower_bound", "ClosureOp", "DiscreteMeasure", "F", "F_type1", "F_type2", "F_type3",
    "FunctionalParams", "LiftedFamily", "OptimizerConfig", "SetFamily", "Symbol", "WeightSpec",
    "abundance", "best_element", "close_under", "dualize", "enumerate_closed_families", "g", "h",
    "is_intersection_closed", "is_union_closed", "lift", "min_over_types", "mu_i", "mul_symbol",
    "random_closed_family", "scan_km", "theta", "threshold_phi", "two_point_scan", "verify_frankl",
    "weight",
]
