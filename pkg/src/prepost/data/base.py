"""Core trial data types."""

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import TrialDataError

logger = logging.getLogger(__name__)

MIN_ARM_SIZE = 2


@dataclass(frozen=True)
class SubjectRecord:
    """One subject of a two-arm pre-post trial.

    Attributes:
        subject_id: Opaque subject identifier
        arm: 0 for control, 1 for treatment
        y_pre: Outcome at baseline
        y_post: Outcome at follow-up
    """

    subject_id: str
    arm: int
    y_pre: float
    y_post: float


def _readonly(values: np.ndarray) -> np.ndarray:
    values.setflags(write=False)
    return values


class TrialDataset:
    """Validated, immutable collection of subject records.

    The dataset stores its columns as read-only numpy arrays so estimators can
    work on them directly. Record order is preserved.
    """

    def __init__(
        self,
        subject_ids: Sequence[str],
        arm: Sequence[int],
        y_pre: Sequence[float],
        y_post: Sequence[float],
    ) -> None:
        """Initialize and validate the dataset.

        Args:
            subject_ids: Unique subject identifiers
            arm: Treatment indicators, each 0 or 1
            y_pre: Baseline outcomes
            y_post: Follow-up outcomes

        Raises:
            TrialDataError: If any dataset invariant is violated
        """
        ids = tuple(str(s) for s in subject_ids)
        arm_arr = np.asarray(arm)
        pre = np.asarray(y_pre, dtype=float).copy()
        post = np.asarray(y_post, dtype=float).copy()

        n = len(ids)
        if not (arm_arr.shape == pre.shape == post.shape == (n,)):
            raise TrialDataError("columns must be one-dimensional and of equal length")

        seen = set()
        for i, sid in enumerate(ids):
            if sid in seen:
                raise TrialDataError(f"duplicate subject_id {sid!r}", row=i + 1)
            seen.add(sid)

        for i in range(n):
            if arm_arr[i] not in (0, 1):
                raise TrialDataError(
                    f"arm must be 0 or 1, got {arm_arr[i]!r}", row=i + 1, column="arm"
                )
        bad = np.flatnonzero(~np.isfinite(pre))
        if bad.size:
            raise TrialDataError(
                "y_pre is not finite", row=int(bad[0]) + 1, column="y_pre"
            )
        bad = np.flatnonzero(~np.isfinite(post))
        if bad.size:
            raise TrialDataError(
                "y_post is not finite", row=int(bad[0]) + 1, column="y_post"
            )

        arm_int = arm_arr.astype(np.int64)
        for j in (0, 1):
            count = int(np.count_nonzero(arm_int == j))
            if count < MIN_ARM_SIZE:
                raise TrialDataError(
                    f"arm {j} has fewer than {MIN_ARM_SIZE} subjects"
                )

        self._ids = ids
        self._arm = _readonly(arm_int)
        self._y_pre = _readonly(pre)
        self._y_post = _readonly(post)
        self._n1 = int(self._arm.sum())
        self._n0 = n - self._n1

    @classmethod
    def from_records(cls, records: Iterable[SubjectRecord]) -> "TrialDataset":
        """Build a dataset from subject records.

        Args:
            records: Subject records in dataset order

        Returns:
            TrialDataset: The validated dataset
        """
        rows = list(records)
        return cls(
            [r.subject_id for r in rows],
            [r.arm for r in rows],
            [r.y_pre for r in rows],
            [r.y_post for r in rows],
        )

    @classmethod
    def from_arrays(
        cls,
        arm: Sequence[int],
        y_pre: Sequence[float],
        y_post: Sequence[float],
        subject_ids: Optional[Sequence[str]] = None,
    ) -> "TrialDataset":
        """Build a dataset from column arrays, synthesizing ids if needed.

        Args:
            arm: Treatment indicators
            y_pre: Baseline outcomes
            y_post: Follow-up outcomes
            subject_ids: Optional identifiers, defaults to "s1", "s2", ...

        Returns:
            TrialDataset: The validated dataset
        """
        if subject_ids is None:
            subject_ids = [f"s{i + 1}" for i in range(len(arm))]
        return cls(subject_ids, arm, y_pre, y_post)

    def take(self, indices: Sequence[int]) -> "TrialDataset":
        """Return a dataset built from the given record positions.

        Positions may repeat (bootstrap resamples); ids are synthesized so
        the result satisfies the uniqueness invariant.

        Args:
            indices: Record positions

        Returns:
            TrialDataset: The derived dataset
        """
        idx = np.asarray(indices, dtype=np.int64)
        return TrialDataset.from_arrays(
            self._arm[idx], self._y_pre[idx], self._y_post[idx]
        )

    @property
    def subject_ids(self) -> Tuple[str, ...]:
        """Subject identifiers in record order."""
        return self._ids

    @property
    def arm(self) -> np.ndarray:
        """Treatment indicators (read-only)."""
        return self._arm

    @property
    def y_pre(self) -> np.ndarray:
        """Baseline outcomes (read-only)."""
        return self._y_pre

    @property
    def y_post(self) -> np.ndarray:
        """Follow-up outcomes (read-only)."""
        return self._y_post

    @property
    def n0(self) -> int:
        """Number of control subjects."""
        return self._n0

    @property
    def n1(self) -> int:
        """Number of treatment subjects."""
        return self._n1

    def arm_indices(self, j: int) -> np.ndarray:
        """Record positions of arm j, in dataset order."""
        return np.flatnonzero(self._arm == j)

    def __len__(self) -> int:
        return len(self._ids)

    def __iter__(self) -> Iterator[SubjectRecord]:
        for sid, a, pre, post in zip(self._ids, self._arm, self._y_pre, self._y_post):
            yield SubjectRecord(sid, int(a), float(pre), float(post))

    def __repr__(self) -> str:
        return f"TrialDataset(n0={self._n0}, n1={self._n1})"


@dataclass(frozen=True)
class ArmStats:
    """Sufficient statistics of one arm.

    Attributes:
        n: Number of subjects
        mean_pre: Mean baseline outcome
        mean_post: Mean follow-up outcome
        ss_pre: Centered sum of squares of the baseline outcome
        ss_post: Centered sum of squares of the follow-up outcome
        sp_cross: Centered cross product of baseline and follow-up
    """

    n: int
    mean_pre: float
    mean_post: float
    ss_pre: float
    ss_post: float
    sp_cross: float

    @property
    def correlation(self) -> Optional[float]:
        """Sample pre-post correlation, None when either outcome is constant."""
        if self.ss_pre <= 0.0 or self.ss_post <= 0.0:
            return None
        r = self.sp_cross / np.sqrt(self.ss_pre * self.ss_post)
        return float(np.clip(r, -1.0, 1.0))

    @property
    def mean_change(self) -> float:
        """Mean of the change scores."""
        return self.mean_post - self.mean_pre

    def sscp(self) -> np.ndarray:
        """Centered sums of squares and cross products as a 2x2 matrix."""
        return np.array(
            [[self.ss_pre, self.sp_cross], [self.sp_cross, self.ss_post]], dtype=float
        )

    def means(self) -> np.ndarray:
        """(mean_pre, mean_post) vector."""
        return np.array([self.mean_pre, self.mean_post], dtype=float)


@dataclass(frozen=True)
class SufficientStats:
    """Per-arm and overall statistics used by closed-form estimators.

    Attributes:
        control: Statistics of arm 0
        treatment: Statistics of arm 1
        grand_mean_pre: Overall baseline mean
        var_pre: Overall baseline sample variance (divisor n0 + n1 - 1)
        p0: Control proportion n0 / (n0 + n1)
        p1: Treatment proportion n1 / (n0 + n1)
    """

    control: ArmStats
    treatment: ArmStats
    grand_mean_pre: float
    var_pre: float
    p0: float
    p1: float

    @property
    def n(self) -> int:
        """Total number of subjects."""
        return self.control.n + self.treatment.n

    def arm(self, j: int) -> ArmStats:
        """Statistics of arm j."""
        if j not in (0, 1):
            raise ValueError(f"arm must be 0 or 1, got {j}")
        return self.control if j == 0 else self.treatment

    @property
    def ss_pre_within(self) -> float:
        """Pooled within-arm baseline sum of squares."""
        return self.control.ss_pre + self.treatment.ss_pre


@dataclass(frozen=True)
class PercentChangeSummary:
    """Arm means of the percent change from baseline.

    The percent-change endpoint is descriptive only; no inference is drawn
    from it.

    Attributes:
        mean_pct_change_control: Mean fractional change in arm 0
        mean_pct_change_treatment: Mean fractional change in arm 1
        tau_star: Treatment minus control mean fractional change
        descriptive_only: Always True
    """

    mean_pct_change_control: float
    mean_pct_change_treatment: float
    tau_star: float
    descriptive_only: bool = True
