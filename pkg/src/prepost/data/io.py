"""CSV reading and writing of trial datasets."""

import logging
import math
import re
from pathlib import Path
from typing import IO, Dict, List, Union

import pandas as pd

from ..exceptions import TrialDataError
from .base import TrialDataset

logger = logging.getLogger(__name__)

COLUMNS = ["subject_id", "arm", "y_pre", "y_post"]

CsvSource = Union[str, Path, IO[bytes], IO[str]]

_LINE_RE = re.compile(r"line (\d+)")


def _read_frame(source: CsvSource) -> pd.DataFrame:
    try:
        return pd.read_csv(
            source,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            skip_blank_lines=False,
            encoding="utf-8-sig",
        )
    except pd.errors.EmptyDataError as e:
        raise TrialDataError(
            "input is empty; expected header " + ",".join(COLUMNS)
        ) from e
    except pd.errors.ParserError as e:
        match = _LINE_RE.search(str(e))
        # parser line numbers count the header
        row = int(match.group(1)) - 1 if match else None
        raise TrialDataError(
            f"malformed row, expected {len(COLUMNS)} fields", row=row
        ) from e
    except UnicodeDecodeError as e:
        raise TrialDataError("input is not valid UTF-8") from e


def _is_blank(raw: object) -> bool:
    return not isinstance(raw, str) or raw.strip() == ""


def _parse_float(raw: object, row: int, column: str) -> float:
    if _is_blank(raw):
        raise TrialDataError(f"missing value in {column}", row=row, column=column)
    try:
        value = float(raw)
    except ValueError as e:
        raise TrialDataError(
            f"{column} is not a number: {raw!r}", row=row, column=column
        ) from e
    if not math.isfinite(value):
        raise TrialDataError(f"{column} is not finite: {raw!r}", row=row, column=column)
    return value


def parse_trial_csv(source: CsvSource) -> TrialDataset:
    """Parse and validate a trial CSV with header ``subject_id,arm,y_pre,y_post``.

    Args:
        source: Path, byte stream or text stream

    Returns:
        TrialDataset: The validated dataset, in file order

    Raises:
        TrialDataError: On a malformed row, a non-binary arm, a non-finite or
            missing value, a duplicate id, or an arm with fewer than two
            subjects. Row-level errors carry the 1-based data row number,
            counting blank lines, which are otherwise skipped.
    """
    frame = _read_frame(source)
    header = [str(c).strip().lstrip("\ufeff") for c in frame.columns]
    if header != COLUMNS:
        raise TrialDataError(
            f"header must be {','.join(COLUMNS)}, got {','.join(header)}"
        )

    ids: List[str] = []
    arms: List[int] = []
    pre: List[float] = []
    post: List[float] = []
    seen: Dict[str, int] = {}
    # rows are numbered by physical line after the header, blank lines included
    for i, values in enumerate(frame.itertuples(index=False, name=None)):
        row = i + 1
        if all(_is_blank(v) for v in values):
            continue
        sid, arm_raw, pre_raw, post_raw = values
        if _is_blank(sid):
            raise TrialDataError("missing subject_id", row=row, column="subject_id")
        sid = sid.strip()
        if sid in seen:
            raise TrialDataError(
                f"duplicate subject_id {sid!r} (first seen in row {seen[sid]})",
                row=row,
                column="subject_id",
            )
        seen[sid] = row
        if not isinstance(arm_raw, str) or arm_raw.strip() not in ("0", "1"):
            raise TrialDataError(
                f"arm must be 0 or 1, got {arm_raw!r}", row=row, column="arm"
            )
        ids.append(sid)
        arms.append(int(arm_raw.strip()))
        pre.append(_parse_float(pre_raw, row, "y_pre"))
        post.append(_parse_float(post_raw, row, "y_post"))

    ds = TrialDataset(ids, arms, pre, post)
    logger.debug(f"Parsed trial CSV with n0={ds.n0}, n1={ds.n1}")
    return ds


def write_trial_csv(ds: TrialDataset, stream: IO[str]) -> None:
    """Write a dataset in the trial CSV schema.

    Floats are written in shortest round-trip form so that parsing the
    output reproduces the dataset exactly.

    Args:
        ds: Dataset to write
        stream: Text stream
    """
    frame = pd.DataFrame(
        {
            "subject_id": list(ds.subject_ids),
            "arm": ds.arm,
            "y_pre": [repr(float(v)) for v in ds.y_pre],
            "y_post": [repr(float(v)) for v in ds.y_post],
        },
        columns=COLUMNS,
    )
    frame.to_csv(stream, index=False, lineterminator="\n")


def to_long_format(ds: TrialDataset) -> pd.DataFrame:
    """Reshape a wide dataset to one row per subject and time point.

    Args:
        ds: Trial dataset

    Returns:
        pd.DataFrame: Columns subject_id, arm, time (0 baseline, 1 follow-up)
        and y, ordered by subject then time
    """
    wide = pd.DataFrame(
        {
            "subject_id": list(ds.subject_ids),
            "arm": ds.arm,
            "order": range(len(ds)),
            0: ds.y_pre,
            1: ds.y_post,
        }
    )
    long = wide.melt(
        id_vars=["subject_id", "arm", "order"],
        value_vars=[0, 1],
        var_name="time",
        value_name="y",
    )
    long = long.sort_values(["order", "time"], kind="stable").drop(columns="order")
    long["time"] = long["time"].astype("int64")
    return long.reset_index(drop=True)
