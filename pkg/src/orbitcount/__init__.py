"""orbitcount: exact and certified zero counting along trajectories of
polynomial vector fields, with orbit-ideal diagnostics, elimination
minors, bounded-height rational-point censuses and power-series
rationality detection."""

from .scalars import QQ, GaussianRational, gr, qq
from .monomial import Monomial, deglex_key
from .polynomial import Polynomial, evaluate, height, l2_norm
from .polyparse import parse_polynomial
from .linalg import det_poly_matrix
from .series import Series
from .balls import ComplexBall
from .dynamics import (
    CertificationError,
    ParametrizedTrajectory,
    TrajectoryGerm,
    VectorField,
    certify_radius,
    iterated_lie,
    lie_derivative,
    morse_multiplicity_cap,
    multiplicity,
    trajectory_series,
)

__version__ = "0.1.0"

__all__ = [
    "QQ", "GaussianRational", "gr", "qq",
    "Monomial", "deglex_key",
    "Polynomial", "evaluate", "height", "l2_norm",
    "parse_polynomial", "det_poly_matrix",
    "Series", "ComplexBall",
    "CertificationError", "ParametrizedTrajectory", "TrajectoryGerm",
    "VectorField", "certify_radius", "iterated_lie", "lie_derivative",
    "morse_multiplicity_cap", "multiplicity", "trajectory_series",
]
