"""2x2 covariance helpers."""

import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import NotPositiveDefiniteError


@dataclass(frozen=True)
class Cov2x2:
    """Symmetric 2x2 covariance of (baseline, follow-up).

    Attributes:
        v00: Baseline variance
        v01: Baseline/follow-up covariance
        v11: Follow-up variance
    """

    v00: float
    v01: float
    v11: float

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "Cov2x2":
        """Build from a 2x2 array, averaging the off-diagonal entries."""
        a = np.asarray(m, dtype=float)
        return cls(float(a[0, 0]), float(0.5 * (a[0, 1] + a[1, 0])), float(a[1, 1]))

    @classmethod
    def from_sd(cls, sd0: float, sd1: float, rho: float) -> "Cov2x2":
        """Build from standard deviations and a correlation."""
        return cls(sd0 * sd0, rho * sd0 * sd1, sd1 * sd1)

    @property
    def determinant(self) -> float:
        return self.v00 * self.v11 - self.v01 * self.v01

    @property
    def correlation(self) -> float:
        return self.v01 / math.sqrt(self.v00 * self.v11)

    @property
    def slope(self) -> float:
        """Regression slope of follow-up on baseline, v01 / v00."""
        return self.v01 / self.v00

    def is_positive_definite(self) -> bool:
        return self.v00 > 0.0 and self.determinant > 0.0

    def matrix(self) -> np.ndarray:
        return np.array([[self.v00, self.v01], [self.v01, self.v11]], dtype=float)

    def max_abs_diff(self, other: "Cov2x2") -> float:
        return max(
            abs(self.v00 - other.v00),
            abs(self.v01 - other.v01),
            abs(self.v11 - other.v11),
        )

    def to_dict(self) -> dict:
        return {"v00": self.v00, "v01": self.v01, "v11": self.v11}


def cholesky2(c: Cov2x2) -> np.ndarray:
    """Lower-triangular factor L with L L' = c.

    Args:
        c: Positive definite covariance

    Returns:
        np.ndarray: 2x2 lower-triangular factor

    Raises:
        NotPositiveDefiniteError: If c is not positive definite; the error
            carries the determinant
    """
    det = c.determinant
    if not c.v00 > 0.0 or not det > 0.0:
        raise NotPositiveDefiniteError(
            f"covariance is not positive definite (v00={c.v00}, determinant={det})",
            determinant=det,
        )
    l00 = math.sqrt(c.v00)
    l10 = c.v01 / l00
    l11 = math.sqrt(det / c.v00)
    return np.array([[l00, 0.0], [l10, l11]], dtype=float)
