"""Numerical kernel: least squares, sandwich covariances, 2x2 factors, t tails."""

from .distributions import student_t_quantile, student_t_two_sided_p
from .linalg import Cov2x2, cholesky2
from .ols import OlsFit, hc_covariance, hc_weights, ols_fit

__all__ = [
    "Cov2x2",
    "OlsFit",
    "cholesky2",
    "hc_covariance",
    "hc_weights",
    "ols_fit",
    "student_t_quantile",
    "student_t_two_sided_p",
]
