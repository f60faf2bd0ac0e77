"""Counting p-adic approximations, approximation lattices and dimension formulas."""

from .counting import (
    ApproxProfile,
    c1,
    c2,
    count_brute,
    count_fast,
    diophantine_exponent_estimate,
    evaluate_bounds,
    is_member,
    minkowski_solve,
    pigeonhole_witness,
)
from .dimension import (
    MTPRRInput,
    WeightSplit,
    cover_critical_exponent,
    mtprr_lower_bound,
    psi_star_estimate,
    remark_upper_bound,
    theorem2_dimension,
    v_vector,
)
from .errors import PadicountError
from .lattice import (
    ApproxLattice,
    build_lattice,
    check_lambda1_bounds,
    enumerate_points,
    successive_minima,
    verify_geometry,
)
from .padic import (
    PadicInt,
    Power,
    ThresholdMode,
    from_integer,
    from_rational,
    padic_norm,
    random_padic,
    random_padic_vector,
    threshold_exponent,
    truncate,
    valuation,
)
from .ubiquity import Ball, BallUnion, delta_union, measure, resonant_denominators, ubiquity_density_check

__version__ = "0.1.0"
