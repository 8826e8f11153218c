"""Spectral solution of scalar delay differential equations with commensurate
delays, built on the multi-branch Lambert W function."""

from .errors import (
    BlowUpError,
    ConvergenceError,
    DegenerateRootError,
    DomainError,
    LambertDDEError,
    ModelError,
    SingularityError,
)
from .lambert_w import branch_of, lambert_w, lambert_w_real, w_derivative
from .model import (
    Combination,
    Constant,
    Cosine,
    DelaySystem,
    Exponential,
    InputSignal,
    Piece,
    Polynomial,
    Preshape,
    Sampled,
    Step,
    Zero,
    delta,
    delta_prime,
    input_from_dict,
    phi_laplace,
)
from .oracle import DenseHistory, integrate, psi_oracle
from .response import (
    ResponseSeries,
    Trajectory,
    forced_response,
    initial_response,
    psi,
    total_response,
    truncation_error_curve,
)
from .spectrum import (
    Root,
    Spectrum,
    Stability,
    compute_spectrum,
    residues,
    seed_guess,
    solve_branch,
    stability,
)

__version__ = "0.1.0"
