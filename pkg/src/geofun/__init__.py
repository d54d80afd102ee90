"""Two-point geodesic maps f(a, b, g): solutions, checks, connections and geodesics."""

from __future__ import annotations

from .axioms import AxiomReport, AxiomResult, SampleSpec, check_axioms, check_jensen_characterization
from .connection import (
    ConnectionField,
    FDScheme,
    Spray,
    build_spray,
    check_first_derivative,
    check_homogeneity,
    check_transformation_law,
    extract_gamma,
    extract_with_diagnostics,
)
from .convexity import check_convexity
from .core import Chart, Curve, GeodesicSolution, SpaceContext, identity_chart, quadratic_chart
from .errors import DomainError, GeofunError, NumericError
from .geodesics import ODEProblem, compare, integrate, shoot, subdivide
from .solutions import (
    CATALOG,
    SOLUTION_IDS,
    LinearSolution,
    OddHomeomorphism,
    ReparamSolution,
    gaussian_v,
    identity_v,
    make_solution,
    weierstrass_v,
)
from .weierstrass import WeierstrassConfig, weierstrass_integral, weierstrass_w

__version__ = "0.1.0"

__all__ = [
    "AxiomReport", "AxiomResult", "SampleSpec", "check_axioms", "check_jensen_characterization",
    "ConnectionField", "FDScheme", "Spray", "build_spray", "check_first_derivative", "check_homogeneity",
    "check_transformation_law", "extract_gamma", "extract_with_diagnostics", "check_convexity",
    "Chart", "Curve", "GeodesicSolution", "SpaceContext", "identity_chart", "quadratic_chart",
    "DomainError", "GeofunError", "NumericError", "ODEProblem", "compare", "integrate", "shoot", "subdivide",
    "CATALOG", "SOLUTION_IDS", "LinearSolution", "OddHomeomorphism", "ReparamSolution", "gaussian_v",
    "identity_v", "make_solution", "weierstrass_v", "WeierstrassConfig", "weierstrass_integral",
    "weierstrass_w",
]
