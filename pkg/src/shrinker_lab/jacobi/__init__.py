"""Radial Jacobi functions, critical radii and stable-region classification."""

from .dirichlet import OriginShiftWarning, dirichlet_ground_eigenvalue
from .regions import KINDS, Region, Stability, classify_region
from .series import F1Series, closed_form_coefficient, growth_ratio, series_coefficients
from .solutions import (
    PiecewiseRadialSolution,
    QuadraticSolution,
    SingularPoint,
    build_f1_series,
    build_f2,
    build_g2,
    build_plane_f2,
    find_r0,
    find_r1,
    first_solution,
    g2_sign_changes,
    ode_residual,
    r1_approximations,
    series_ode_residual,
)

__all__ = [
    "F1Series",
    "KINDS",
    "OriginShiftWarning",
    "PiecewiseRadialSolution",
    "QuadraticSolution",
    "Region",
    "SingularPoint",
    "Stability",
    "build_f1_series",
    "build_f2",
    "build_g2",
    "build_plane_f2",
    "classify_region",
    "closed_form_coefficient",
    "dirichlet_ground_eigenvalue",
    "find_r0",
    "find_r1",
    "first_solution",
    "g2_sign_changes",
    "growth_ratio",
    "ode_residual",
    "r1_approximations",
    "series_coefficients",
    "series_ode_residual",
]
