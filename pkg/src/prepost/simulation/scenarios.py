"""Trial scenarios and synthetic dataset generation."""

import logging
import re
from typing import Callable, Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..data.base import TrialDataset
from ..kernel.linalg import cholesky2
from ..theory.params import DesignSize, PopulationParams

logger = logging.getLogger(__name__)


class ScenarioConfig(BaseModel):
    """A population and a design to simulate trials from.

    Attributes:
        params: Population parameters
        design: Arm sizes
        label: Name used in reports
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    params: PopulationParams
    design: DesignSize
    label: str = Field(default="custom", min_length=1)

    @property
    def true_tau(self) -> float:
        return self.params.tau


def _weight_loss_params(
    treatment_post: float, heterogeneous: bool
) -> PopulationParams:
    if heterogeneous:
        return PopulationParams.heterogeneous(
            mu_pre=88.0,
            mu_post_control=86.0,
            mu_post_treatment=treatment_post,
            sigma_pre=14.0,
            sigma_post_control=15.0,
            sigma_post_treatment=15.0,
            rho_control=0.9,
            rho_treatment=0.7,
        )
    return PopulationParams.homogeneous(
        mu_pre=88.0,
        mu_post_control=86.0,
        mu_post_treatment=treatment_post,
        sigma_pre=14.0,
        sigma_post=15.0,
        rho=0.9,
    )


_PRESETS: Dict[str, Callable[[], ScenarioConfig]] = {
    "homogeneous": lambda: ScenarioConfig(
        params=_weight_loss_params(83.0, heterogeneous=False),
        design=DesignSize(n0=90, n1=90),
        label="homogeneous",
    ),
    "het-balanced": lambda: ScenarioConfig(
        params=_weight_loss_params(83.0, heterogeneous=True),
        design=DesignSize(n0=90, n1=90),
        label="het-balanced",
    ),
    "het-unbalanced": lambda: ScenarioConfig(
        params=_weight_loss_params(83.0, heterogeneous=True),
        design=DesignSize(n0=60, n1=120),
        label="het-unbalanced",
    ),
    "null-homogeneous": lambda: ScenarioConfig(
        params=_weight_loss_params(86.0, heterogeneous=False),
        design=DesignSize(n0=90, n1=90),
        label="null-homogeneous",
    ),
    "null-het-unbalanced": lambda: ScenarioConfig(
        params=_weight_loss_params(86.0, heterogeneous=True),
        design=DesignSize(n0=60, n1=120),
        label="null-het-unbalanced",
    ),
}

PRESET_NAMES = tuple(_PRESETS)

_CAMEL_RE = re.compile(r"(?<=[a-z])(?=[A-Z])")


def _normalize(name: str) -> str:
    # "HetUnbalanced", "het_unbalanced" and "het-unbalanced" are the same preset
    return _CAMEL_RE.sub("-", name.strip()).replace("_", "-").lower()


def preset(name: str) -> ScenarioConfig:
    """Look up a built-in weight-loss trial scenario.

    Args:
        name: homogeneous, het-balanced, het-unbalanced, null-homogeneous or
            null-het-unbalanced; CamelCase and underscores are accepted

    Returns:
        ScenarioConfig: The scenario

    Raises:
        ValueError: If the name is unknown
    """
    key = _normalize(name)
    if key not in _PRESETS:
        raise ValueError(
            f"Unknown preset {name!r}. Available presets: {', '.join(PRESET_NAMES)}"
        )
    return _PRESETS[key]()


def generate_trial(cfg: ScenarioConfig, seed: int) -> TrialDataset:
    """Draw one trial from a scenario.

    Arm 0 subjects come first, then arm 1. Each subject's (baseline,
    follow-up) pair is ``mean + L z`` with ``L`` the Cholesky factor of the
    arm covariance and ``z`` two standard normals from numpy's PCG64 stream
    seeded by ``SeedSequence(seed)``.

    Args:
        cfg: Scenario to simulate
        seed: Non-negative seed

    Returns:
        TrialDataset: The simulated trial with ids s1, s2, ...
    """
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    params = cfg.params

    arms, pre, post = [], [], []
    for j in (0, 1):
        n = cfg.design.size(j)
        factor = cholesky2(params.arm_covariance(j))
        mean = np.array([params.mu_pre, params.mu_post_arm(j)])
        draws = mean + rng.standard_normal((n, 2)) @ factor.T
        arms.append(np.full(n, j, dtype=np.int64))
        pre.append(draws[:, 0])
        post.append(draws[:, 1])

    return TrialDataset.from_arrays(
        np.concatenate(arms), np.concatenate(pre), np.concatenate(post)
    )
