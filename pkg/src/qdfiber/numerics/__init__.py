from .lsq import FitResult, gauss_newton_fit
from .rng import RandomStream, exponential, lorentzian, philox4x32, poisson, uniform
from .solvers import log_binomial_tail, solve_quadratic_stable

__all__ = [
    "FitResult",
    "RandomStream",
    "exponential",
    "gauss_newton_fit",
    "log_binomial_tail",
    "lorentzian",
    "philox4x32",
    "poisson",
    "solve_quadratic_stable",
    "uniform",
]
