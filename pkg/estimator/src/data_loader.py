# standard libs
import re
from dataclasses import dataclass
from typing import Optional, Union

# 3rd party
import numpy as np
import pandas as pd

# constants
DTYPE = np.float64
LABEL_COLUMN = "is_inlier"
CSV_FLOAT_FORMAT = "%.17g"
TRUE_LABELS = {"1", "true", "True", "TRUE"}
FALSE_LABELS = {"0", "false", "False", "FALSE"}


class CsvFormatError(ValueError):
    def __init__(self, line, message):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Dataset:
    """n samples of dimension d, one per row, with optional inlier labels."""

    values: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=DTYPE)
        if values.ndim == 1:
            values = values[:, np.newaxis]
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"values must be a non-empty n x d matrix, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

        if self.labels is not None:
            labels = np.array(self.labels, dtype=bool).reshape(-1)
            if labels.shape[0] != values.shape[0]:
                raise ValueError(f"labels has length {labels.shape[0]}, expected {values.shape[0]}")
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[1]


ArrayOrDataset = Union[Dataset, np.ndarray, list]


def as_matrix(data):
    """Return the n x d float matrix behind a Dataset or an array-like."""
    if isinstance(data, Dataset):
        return data.values
    values = np.asarray(data, dtype=DTYPE)
    if values.ndim == 1:
        values = values[:, np.newaxis]
    if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
        raise ValueError(f"data must be a non-empty n x d matrix, got shape {values.shape}")
    return values


def feature_columns(d):
    return [f"x{j}" for j in range(d)]


def save_csv(path, data, labels=None):
    values = as_matrix(data)
    if labels is None and isinstance(data, Dataset):
        labels = data.labels

    frame = pd.DataFrame(values, columns=feature_columns(values.shape[1]))
    if labels is not None:
        frame[LABEL_COLUMN] = np.asarray(labels, dtype=bool).astype(int)

    frame.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")


def _parse_labels(column, first_line):
    labels = np.zeros(len(column), dtype=bool)
    for i, cell in enumerate(column):
        if cell in TRUE_LABELS:
            labels[i] = True
        elif cell not in FALSE_LABELS:
            raise CsvFormatError(first_line + i, f"label {cell!r} is not one of 0/1/true/false")
    return labels


def ingest_csv(path):
    """Read a sample table; the optional `is_inlier` column becomes the labels.

    Row order is preserved. Ragged rows and non-numeric cells raise
    CsvFormatError with the 1-based line number of the offending row.
    """
    try:
        raw = pd.read_csv(path, header=None, dtype=str, keep_default_na=False)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise CsvFormatError(int(match.group(1)) if match else 0, "ragged row") from e
    except pd.errors.EmptyDataError as e:
        raise CsvFormatError(1, "empty file") from e

    header = [str(name).strip() for name in raw.iloc[0]]
    body = raw.iloc[1:].reset_index(drop=True)
    if len(body) == 0:
        raise CsvFormatError(2, "no data rows")

    # short rows come back padded with NaN; lines are 1-based and the header is line 1
    missing = body.isna().to_numpy()
    if missing.any():
        row = int(np.argmax(missing.any(axis=1)))
        raise CsvFormatError(row + 2, f"expected {len(header)} fields")

    has_labels = header[-1] == LABEL_COLUMN
    feature_frame = body.iloc[:, :-1] if has_labels else body
    if feature_frame.shape[1] == 0:
        raise CsvFormatError(1, "no feature columns")

    coerced = feature_frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=DTYPE)
    bad = ~np.isfinite(coerced)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        cell = feature_frame.iat[row, col]
        raise CsvFormatError(int(row) + 2, f"column {header[col]!r}: {cell!r} is not a finite number")

    # exact decimal -> double conversion so 17-digit values round-trip bit for bit
    values = feature_frame.to_numpy(dtype=str).astype(DTYPE)
    labels = _parse_labels(body.iloc[:, -1].tolist(), 2) if has_labels else None

    return Dataset(values, labels)


def load_oracle_mean(path):
    """A one-row CSV holding a reference mean."""
    dataset = ingest_csv(path)
    if dataset.n != 1:
        raise ValueError(f"oracle file must hold exactly one row, found {dataset.n}")
    return dataset.values[0].copy()
