"""Expected signatures of Brownian motion and random walks stopped on leaving a domain."""

from .tensor import (
    FLOAT64,
    RATIONAL,
    SingularElementError,
    TruncatedTensor,
    dilate,
    exp_increment,
    homogeneous_norm,
    inverse,
    mul,
    project_level,
    project_word,
    rotate,
    rotation_matrix,
    unit,
    zero,
)
from .polyring import BivarPoly, DivisionRemainderError, divide_exact, laplacian
from .disk import PolyTensor, expected_signature_disk, evaluate_phi, poisson_solve_disk, transport
from .interval import closed_form_level, evaluate_interval, ode_recursion, two_point_enumeration
from .lattice import LatticeDomain, LatticeField, MalformedDomainError, expected_signature_lattice, parse_domain
from .mc import PiecewisePath, calibrate_bias, estimate_phi, mean_value_check, signature_of_path

__version__ = "0.1.0"
