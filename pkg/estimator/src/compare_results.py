# standard libs
import argparse
import math
import sys

# 3rd party
import pandas as pd

# constants
KEYS = ["method", "alpha", "d", "n", "trial"]
VALUES = ["recovery_error", "outer_iterations"]
DEFAULT_ATOL = 0.0


def parse_args():
    parser = argparse.ArgumentParser(description="compare two experiment result CSV files row by row")
    parser.add_argument("first", type=str, help="result CSV")
    parser.add_argument("second", type=str, help="result CSV")
    parser.add_argument("--atol", type=float, default=DEFAULT_ATOL, help="absolute tolerance on value columns")
    args = vars(parser.parse_args())
    return args


def _read(path):
    return pd.read_csv(path, dtype={"method": str, "trial": str}, keep_default_na=False, na_values=["nan", ""])


def _same(a, b, atol):
    if math.isnan(a) and math.isnan(b):
        return True
    return abs(a - b) <= atol


def compare(path_a, path_b, atol=DEFAULT_ATOL):
    """Returns (differences, compared) where each difference is
    (line, column, value_a, value_b); line counts data rows from 0."""
    a = _read(path_a)
    b = _read(path_b)
    if list(a.columns) != list(b.columns):
        raise ValueError(f"headers differ: {list(a.columns)} vs {list(b.columns)}")
    if len(a) != len(b):
        raise ValueError(f"row counts differ: {len(a)} vs {len(b)}")

    differences = []
    for i in range(len(a)):
        for key in KEYS:
            if str(a.at[i, key]) != str(b.at[i, key]):
                differences.append((i, key, a.at[i, key], b.at[i, key]))
        for column in VALUES:
            va, vb = float(a.at[i, column]), float(b.at[i, column])
            if not _same(va, vb, atol):
                differences.append((i, column, va, vb))
    return differences, len(a)


if __name__ == "__main__":
    args = parse_args()
    differences, compared = compare(args["first"], args["second"], args["atol"])

    for line, column, va, vb in differences:
        if isinstance(va, float) and isinstance(vb, float):
            print(f"{line}: {column} {va}\t{vb}\tdiff:{vb - va}")
        else:
            print(f"{line}: {column} {va}\t{vb}")

    print("lines:", compared)
    sys.exit(1 if differences else 0)
