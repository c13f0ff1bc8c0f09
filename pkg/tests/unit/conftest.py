"""Shared test fixtures for unit tests."""

from typing import Callable

import numpy as np
import pytest

from prepost.data import TrialDataset
from prepost.simulation import generate_trial, preset
from prepost.theory import DesignSize, PopulationParams

D4_CSV = "subject_id,arm,y_pre,y_post\na,0,1,2\nb,0,3,4\nc,1,2,1\nd,1,4,3\n"


# Dataset Fixtures
@pytest.fixture
def d4() -> TrialDataset:
    """Four subjects: control (1,2),(3,4) and treatment (2,1),(4,3)."""
    return TrialDataset(["a", "b", "c", "d"], [0, 0, 1, 1], [1, 3, 2, 4], [2, 4, 1, 3])


@pytest.fixture
def d4_csv(tmp_path) -> str:
    """Path of the D4 dataset written as a trial CSV."""
    path = tmp_path / "d4.csv"
    path.write_text(D4_CSV, encoding="utf-8")
    return str(path)


@pytest.fixture
def homogeneous_trial() -> TrialDataset:
    """One realization of the homogeneous weight-loss scenario (n0 = n1 = 90)."""
    return generate_trial(preset("homogeneous"), seed=2024)


@pytest.fixture
def het_balanced_trial() -> TrialDataset:
    """One realization of the heterogeneous balanced scenario."""
    return generate_trial(preset("het-balanced"), seed=2024)


@pytest.fixture
def het_unbalanced_trial() -> TrialDataset:
    """One realization of the heterogeneous unbalanced scenario (60 / 120)."""
    return generate_trial(preset("het-unbalanced"), seed=2024)


@pytest.fixture
def random_dataset() -> Callable[[np.random.Generator, int, int], TrialDataset]:
    """Factory of unstructured random datasets with correlated outcomes."""

    def make(rng: np.random.Generator, n0: int, n1: int) -> TrialDataset:
        n = n0 + n1
        arm = np.r_[np.zeros(n0, dtype=int), np.ones(n1, dtype=int)]
        pre = rng.normal(50.0, rng.uniform(1.0, 10.0), size=n)
        post = (
            rng.uniform(-1.0, 1.0) * pre
            + rng.normal(0.0, rng.uniform(1.0, 10.0), size=n)
            + rng.uniform(-5.0, 5.0) * arm
        )
        return TrialDataset.from_arrays(arm, pre, post)

    return make


# Parameter Fixtures
@pytest.fixture
def homogeneous_params() -> PopulationParams:
    """Weight-loss trial parameters with one covariance for both arms."""
    return preset("homogeneous").params


@pytest.fixture
def heterogeneous_params() -> PopulationParams:
    """Weight-loss trial parameters with rho 0.9 (control) and 0.7 (treatment)."""
    return preset("het-balanced").params


@pytest.fixture
def balanced() -> DesignSize:
    """Design with 90 subjects per arm."""
    return DesignSize(n0=90, n1=90)


@pytest.fixture
def unbalanced() -> DesignSize:
    """Design with 60 control and 120 treatment subjects."""
    return DesignSize(n0=60, n1=120)
