"""Exact radii of convergence for p-adic differential systems."""

from .catalog import binomial, binomial_recentred, dwork, exponential, zero_system
from .diffsys import (
    DiffOperator, DiffSystem, DomainSpec, companion, gauss_table, iterate, pullback,
)
from .explorer import ExploreOptions, explore, model_rescale, rescaling_consistency, serialize
from .expr import parse_expr, render
from .field import INF, FieldElem, PrimeConfig, inv, val
from .laurent import (
    Dilate, Invert, Kummer, LaurentPoly, PoleError, RatFunc, RecentreAnnulus, RecentreDisk,
)
from .oracle import random_system, series_solution, series_solution_radius, young_radius
from .profile import (
    decompose_side, endpoint_continuity_check, fit_concave_pl, sample_profile, verify_concavity,
)
from .radius import (
    Cap, GaussPoint, RadiusOptions, RationalPoint, dwork_robba_audit, radius_at, transfer_check,
)

__version__ = "0.1.0"

__all__ = [
    "Cap", "DiffOperator", "DiffSystem", "Dilate", "DomainSpec", "ExploreOptions", "FieldElem",
    "GaussPoint", "INF", "Invert", "Kummer", "LaurentPoly", "PoleError", "PrimeConfig",
    "RadiusOptions", "RatFunc", "RationalPoint", "RecentreAnnulus", "RecentreDisk",
    "binomial", "binomial_recentred", "companion", "decompose_side", "dwork",
    "dwork_robba_audit", "endpoint_continuity_check", "explore", "exponential",
    "fit_concave_pl", "gauss_table", "inv", "iterate", "model_rescale", "parse_expr",
    "pullback", "radius_at", "random_system", "render", "rescaling_consistency",
    "sample_profile", "serialize", "series_solution", "series_solution_radius",
    "transfer_check", "val", "verify_concavity", "young_radius", "zero_system",
]
