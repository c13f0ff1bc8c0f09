"""Exceptions for prepost-analysis."""

from typing import Any, Optional


class PrepostError(Exception):
    """Base exception class for prepost-analysis."""

    pass


class ConfigError(PrepostError):
    """Raised when there is an error with the configuration."""

    pass


class UsageError(PrepostError):
    """Raised when the command line is invoked with invalid flags."""

    pass


class TrialDataError(PrepostError):
    """Raised when trial data fails validation.

    Attributes:
        row: 1-based data row number (header excluded), if known
        column: Offending column name, if known
    """

    def __init__(
        self, message: str, row: Optional[int] = None, column: Optional[str] = None
    ) -> None:
        """Initialize the error.

        Args:
            message: Human readable description
            row: 1-based data row number
            column: Offending column name
        """
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row
        self.column = column


class NumericalError(PrepostError):
    """Base exception for numerical kernel failures."""

    pass


class RankDeficiencyError(NumericalError):
    """Raised when a design matrix is not of full column rank."""

    def __init__(self, message: str, column: int) -> None:
        """Initialize the error.

        Args:
            message: Human readable description
            column: Index of the first linearly dependent column
        """
        super().__init__(message)
        self.column = column


class LeverageError(NumericalError):
    """Raised when an observation has leverage 1 under HC2/HC3."""

    pass


class NotPositiveDefiniteError(NumericalError):
    """Raised when a covariance matrix is not positive definite."""

    def __init__(self, message: str, determinant: float) -> None:
        """Initialize the error.

        Args:
            message: Human readable description
            determinant: Determinant of the offending matrix
        """
        super().__init__(message)
        self.determinant = determinant


class EstimationError(PrepostError):
    """Raised when an estimator fails on a dataset."""

    pass


class ConvergenceError(EstimationError):
    """Raised when the REML covariance iteration does not converge.

    Attributes:
        iterations: Number of iterations performed
        last_covariance: Covariance estimate at the last iteration
    """

    def __init__(self, message: str, iterations: int, last_covariance: Any) -> None:
        """Initialize the error.

        Args:
            message: Human readable description
            iterations: Number of iterations performed
            last_covariance: Covariance estimate at the last iteration
        """
        super().__init__(message)
        self.iterations = iterations
        self.last_covariance = last_covariance


class ModeMismatchError(PrepostError):
    """Raised when population parameters do not fit the requested method family."""

    pass


class BootstrapError(PrepostError):
    """Raised when too many bootstrap replicates fail."""

    pass


class SimulationError(PrepostError):
    """Raised when a Monte Carlo run cannot be completed."""

    pass
