"""Plot-ready grids of aggregate experiment rows (alpha or n down, methods across)."""

# 3rd party
import numpy as np
import pandas as pd

# constants
AGGREGATE_TRIAL = "mean"
VALUE_COLUMNS = ["recovery_error", "outer_iterations", "wall_time_ms"]
DIGITS = 4


def _frame(rows):
    if isinstance(rows, pd.DataFrame):
        frame = rows.copy()
        frame["trial"] = frame["trial"].astype(str)
    else:
        frame = pd.DataFrame(
            [
                {
                    "method": row.method,
                    "alpha": row.alpha,
                    "d": row.d,
                    "n": row.n,
                    "trial": str(row.trial),
                    "recovery_error": row.recovery_error,
                    "outer_iterations": row.outer_iterations,
                    "wall_time_ms": np.nan if row.wall_time_ms is None else row.wall_time_ms,
                }
                for row in rows
            ]
        )
    return frame[frame["trial"] == AGGREGATE_TRIAL]


def pivot_table(rows, value="recovery_error"):
    """Aggregate rows pivoted to one cell per (alpha or n, method).

    The index is alpha when the rows share one n, n when they share one alpha,
    and (n, alpha) otherwise. Columns keep the order methods first appear in.
    """
    if value not in VALUE_COLUMNS:
        raise ValueError(f"value must be one of {VALUE_COLUMNS}, got {value!r}")
    frame = _frame(rows)
    if frame.empty:
        raise ValueError("no aggregate rows to tabulate")

    if frame["n"].nunique() == 1:
        index = ["alpha"]
    elif frame["alpha"].nunique() == 1:
        index = ["n"]
    else:
        index = ["n", "alpha"]

    methods = list(dict.fromkeys(frame["method"]))
    table = frame.pivot_table(index=index, columns="method", values=value, aggfunc="first", dropna=False)
    return table.reindex(columns=methods)


def render(table, digits=DIGITS):
    return table.to_string(float_format=lambda v: f"{v:.{digits}f}")
