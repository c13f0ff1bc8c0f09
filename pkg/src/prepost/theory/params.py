"""Population and design parameters of a two-arm pre-post trial."""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..kernel.linalg import Cov2x2
from ..types import PopulationMode

_HOMOGENEOUS_FIELDS = ("sigma_post", "rho")
_HETEROGENEOUS_FIELDS = (
    "sigma_post_control",
    "sigma_post_treatment",
    "rho_control",
    "rho_treatment",
)


class PopulationParams(BaseModel):
    """Means and covariance structure of the (baseline, follow-up) outcome.

    Either the homogeneous fields (``sigma_post``, ``rho``) or the
    heterogeneous fields (arm-specific follow-up SDs and correlations) are
    set, never both. The baseline distribution is shared by both arms.

    Attributes:
        mu_pre: Baseline mean
        mu_post_control: Follow-up mean of arm 0
        mu_post_treatment: Follow-up mean of arm 1
        sigma_pre: Baseline SD
        sigma_post: Follow-up SD (homogeneous)
        rho: Pre-post correlation (homogeneous)
        sigma_post_control: Follow-up SD of arm 0 (heterogeneous)
        sigma_post_treatment: Follow-up SD of arm 1 (heterogeneous)
        rho_control: Pre-post correlation of arm 0 (heterogeneous)
        rho_treatment: Pre-post correlation of arm 1 (heterogeneous)
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    mu_pre: float
    mu_post_control: float
    mu_post_treatment: float
    sigma_pre: float = Field(gt=0)
    sigma_post: Optional[float] = Field(default=None, gt=0)
    rho: Optional[float] = Field(default=None, gt=-1, lt=1)
    sigma_post_control: Optional[float] = Field(default=None, gt=0)
    sigma_post_treatment: Optional[float] = Field(default=None, gt=0)
    rho_control: Optional[float] = Field(default=None, gt=-1, lt=1)
    rho_treatment: Optional[float] = Field(default=None, gt=-1, lt=1)

    @model_validator(mode="after")
    def _check_one_structure(self) -> "PopulationParams":
        hom = [getattr(self, f) is not None for f in _HOMOGENEOUS_FIELDS]
        het = [getattr(self, f) is not None for f in _HETEROGENEOUS_FIELDS]
        if all(hom) and not any(het):
            return self
        if all(het) and not any(hom):
            return self
        raise ValueError(
            "set either sigma_post and rho (homogeneous) or all four arm-specific "
            "fields (heterogeneous), not a mix"
        )

    @classmethod
    def homogeneous(
        cls,
        mu_pre: float,
        mu_post_control: float,
        mu_post_treatment: float,
        sigma_pre: float,
        sigma_post: float,
        rho: float,
    ) -> "PopulationParams":
        """Parameters with a covariance structure shared by both arms."""
        return cls(
            mu_pre=mu_pre,
            mu_post_control=mu_post_control,
            mu_post_treatment=mu_post_treatment,
            sigma_pre=sigma_pre,
            sigma_post=sigma_post,
            rho=rho,
        )

    @classmethod
    def heterogeneous(
        cls,
        mu_pre: float,
        mu_post_control: float,
        mu_post_treatment: float,
        sigma_pre: float,
        sigma_post_control: float,
        sigma_post_treatment: float,
        rho_control: float,
        rho_treatment: float,
    ) -> "PopulationParams":
        """Parameters with arm-specific follow-up SDs and correlations."""
        return cls(
            mu_pre=mu_pre,
            mu_post_control=mu_post_control,
            mu_post_treatment=mu_post_treatment,
            sigma_pre=sigma_pre,
            sigma_post_control=sigma_post_control,
            sigma_post_treatment=sigma_post_treatment,
            rho_control=rho_control,
            rho_treatment=rho_treatment,
        )

    @property
    def mode(self) -> PopulationMode:
        return "homogeneous" if self.sigma_post is not None else "heterogeneous"

    @property
    def tau(self) -> float:
        """True treatment effect, the difference of follow-up means."""
        return self.mu_post_treatment - self.mu_post_control

    def sigma_post_arm(self, j: int) -> float:
        """Follow-up SD of arm j under either structure."""
        _check_arm(j)
        if self.sigma_post is not None:
            return self.sigma_post
        value = self.sigma_post_control if j == 0 else self.sigma_post_treatment
        assert value is not None
        return value

    def rho_arm(self, j: int) -> float:
        """Pre-post correlation of arm j under either structure."""
        _check_arm(j)
        if self.rho is not None:
            return self.rho
        value = self.rho_control if j == 0 else self.rho_treatment
        assert value is not None
        return value

    def mu_post_arm(self, j: int) -> float:
        _check_arm(j)
        return self.mu_post_control if j == 0 else self.mu_post_treatment

    def arm_covariance(self, j: int) -> Cov2x2:
        """2x2 (baseline, follow-up) covariance of arm j."""
        return Cov2x2.from_sd(self.sigma_pre, self.sigma_post_arm(j), self.rho_arm(j))


class DesignSize(BaseModel):
    """Arm sizes of a trial design.

    Attributes:
        n0: Control arm size
        n1: Treatment arm size
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    n0: int = Field(ge=2)
    n1: int = Field(ge=2)

    @property
    def n(self) -> int:
        return self.n0 + self.n1

    @property
    def p0(self) -> float:
        return self.n0 / self.n

    @property
    def p1(self) -> float:
        return self.n1 / self.n

    @property
    def inverse_sum(self) -> float:
        """1/n0 + 1/n1."""
        return 1.0 / self.n0 + 1.0 / self.n1

    def size(self, j: int) -> int:
        _check_arm(j)
        return self.n0 if j == 0 else self.n1


def _check_arm(j: int) -> None:
    if j not in (0, 1):
        raise ValueError(f"arm must be 0 or 1, got {j}")
