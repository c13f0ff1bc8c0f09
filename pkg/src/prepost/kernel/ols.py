"""Ordinary least squares and heteroscedasticity-consistent covariances."""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from ..exceptions import LeverageError, NumericalError, RankDeficiencyError
from ..types import HCKind

logger = logging.getLogger(__name__)

RANK_TOL = 1e-10
LEVERAGE_TOL = 1e-10


@dataclass(frozen=True)
class OlsFit:
    """Result of an ordinary least squares fit.

    Attributes:
        design: n x k design matrix
        coefficients: Estimated coefficients
        residuals: Outcome minus fitted values
        fitted: Fitted values
        xtx_inv: Unscaled inverse of the normal-equations matrix
        leverages: Diagonal of the hat matrix
        sigma2: Residual variance with divisor n - k
        n: Number of observations
        k: Number of design columns
    """

    design: np.ndarray
    coefficients: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray
    xtx_inv: np.ndarray
    leverages: np.ndarray
    sigma2: float
    n: int
    k: int

    @property
    def df_resid(self) -> int:
        """Residual degrees of freedom."""
        return self.n - self.k

    def model_covariance(self) -> np.ndarray:
        """Classical covariance sigma2 * (X'X)^-1 of the coefficients."""
        return self.sigma2 * self.xtx_inv


def ols_fit(design: np.ndarray, outcome: np.ndarray) -> OlsFit:
    """Fit y = X b + e by least squares using a QR decomposition.

    Args:
        design: n x k design matrix, n > k
        outcome: Length-n outcome vector

    Returns:
        OlsFit: Coefficients, residuals, leverages and variance pieces

    Raises:
        NumericalError: If shapes disagree or n <= k
        RankDeficiencyError: If a column is (numerically) a combination of the
            preceding ones; the error names that column
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(outcome, dtype=float)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
        raise NumericalError(
            f"design {X.shape} and outcome {y.shape} have incompatible shapes"
        )
    n, k = X.shape
    if n <= k:
        raise NumericalError(f"need more observations than columns, got n={n}, k={k}")

    q, r = np.linalg.qr(X)
    tol = RANK_TOL * float(np.max(np.linalg.norm(X, axis=0)))
    diag = np.abs(np.diag(r))
    dependent = np.flatnonzero(diag <= tol)
    if dependent.size:
        col = int(dependent[0])
        raise RankDeficiencyError(
            f"design column {col} is linearly dependent on the preceding columns",
            column=col,
        )

    coefficients = solve_triangular(r, q.T @ y)
    r_inv = solve_triangular(r, np.eye(k))
    xtx_inv = r_inv @ r_inv.T
    fitted = X @ coefficients
    residuals = y - fitted
    leverages = np.sum(q * q, axis=1)
    sigma2 = math.fsum(residuals * residuals) / (n - k)

    return OlsFit(
        design=X,
        coefficients=coefficients,
        residuals=residuals,
        fitted=fitted,
        xtx_inv=xtx_inv,
        leverages=leverages,
        sigma2=sigma2,
        n=n,
        k=k,
    )


def hc_weights(fit: OlsFit, kind: HCKind) -> np.ndarray:
    """Diagonal of the HC "meat" matrix for the requested flavor.

    Raises:
        LeverageError: If some leverage equals 1 under HC2 or HC3
        ValueError: If kind is unknown
    """
    e2 = fit.residuals**2
    if kind == "HC0":
        return e2
    if kind == "HC1":
        return e2 * fit.n / (fit.n - fit.k)
    if kind in ("HC2", "HC3"):
        one_minus_h = 1.0 - fit.leverages
        if np.any(one_minus_h <= LEVERAGE_TOL):
            i = int(np.argmin(one_minus_h))
            raise LeverageError(
                f"observation {i} has leverage 1; {kind} is undefined"
            )
        return e2 / one_minus_h if kind == "HC2" else e2 / one_minus_h**2
    raise ValueError(f"Unknown HC kind {kind!r}")


def hc_covariance(fit: OlsFit, kind: HCKind = "HC2") -> np.ndarray:
    """Sandwich covariance (X'X)^-1 X' diag(w) X (X'X)^-1.

    Args:
        fit: OLS fit
        kind: HC0, HC1, HC2 or HC3

    Returns:
        np.ndarray: k x k covariance matrix
    """
    w = hc_weights(fit, kind)
    X = fit.design
    meat = (X * w[:, None]).T @ X
    cov = fit.xtx_inv @ meat @ fit.xtx_inv
    return 0.5 * (cov + cov.T)
