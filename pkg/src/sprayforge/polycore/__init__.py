"""Exact polynomial and ideal algebra over Q."""

from .dual import Dual
from .groebner import DEFAULT_STEP_BUDGET, groebner_basis, is_groebner, reduce_by, step_budget
from .ideal import Ideal, divide_exact, elimination_ideal, multivariate_gcd, normal_form
from .linalg import LinearMap, det, in_span, matvec, nullspace, rank, solve
from .parse import parse_poly, parse_polys
from .poly import (
    GREVLEX,
    LEX,
    MonomialOrder,
    MPoly,
    block_order,
    chart_names,
    jacobian,
    jacobian_at,
    spray_names,
    to_point,
    var_names,
)
from .sampling import rng_for, sample_generic, sample_matrix, sample_vector

__all__ = [
    "DEFAULT_STEP_BUDGET",
    "Dual",
    "GREVLEX",
    "Ideal",
    "LEX",
    "LinearMap",
    "MPoly",
    "MonomialOrder",
    "block_order",
    "chart_names",
    "det",
    "divide_exact",
    "elimination_ideal",
    "groebner_basis",
    "in_span",
    "is_groebner",
    "jacobian",
    "jacobian_at",
    "matvec",
    "multivariate_gcd",
    "normal_form",
    "nullspace",
    "parse_poly",
    "parse_polys",
    "rank",
    "reduce_by",
    "rng_for",
    "sample_generic",
    "sample_matrix",
    "sample_vector",
    "solve",
    "spray_names",
    "step_budget",
    "to_point",
    "var_names",
]
