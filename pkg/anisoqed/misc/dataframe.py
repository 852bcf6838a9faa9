# --------------------------------------------------------------
# Copyright (c) 2024, anisoqed developers
# License: GPLv3 (see LICENSE)
# --------------------------------------------------------------
import numpy as np

from anisoqed.errors import InvalidInputError


def ftos(x, fp=3):
    """Fixed-width rendering of a float for console tables."""
    if x == float("inf"):
        return "+Inf"
    elif x == float("-inf"):
        return "-Inf"
    elif x != x:
        return "NaN"
    abs_x = abs(x)
    if x == 0:
        return "0.0"
    elif 0.1 <= abs_x < 1000:
        return f"{x:.{fp}f}"
    elif 0.01 <= abs_x < 0.1:
        return f"{x:.{fp+1}f}"
    else:
        exponent = int(np.floor(np.log10(abs_x)))
        coeff = x / 10**exponent
        return f"{coeff:.{fp}f}e{exponent}"


class DataFrame:
    """Small labelled table of floats, printed with `ftos`.

    Used for branch summaries on the console.
    """

    def __init__(self, data, colnames, rownames=None):
        self.data = np.atleast_2d(np.array(data, dtype=float))
        self.colnames = list(colnames)
        if rownames is None:
            rownames = [str(i) for i in range(self.data.shape[0])]
        self.rownames = list(rownames)
        if self.data.shape != (len(self.rownames), len(self.colnames)):
            raise InvalidInputError(
                f"data of shape {self.data.shape} does not match "
                f"{len(self.rownames)} rows x {len(self.colnames)} columns"
            )

    def __getitem__(self, key):
        if isinstance(key, tuple):
            row_key, col_key = key
            return self.data[self.rownames.index(row_key), self.colnames.index(col_key)]
        elif isinstance(key, str):
            if key in self.colnames:
                return self.data[:, self.colnames.index(key)]
            elif key in self.rownames:
                return self.data[self.rownames.index(key), :]
            raise KeyError(f"Key '{key}' not found in row or column names")
        raise TypeError("Invalid key type. Must be a tuple or a string.")

    def __len__(self):
        return self.data.shape[0]

    def __repr__(self):
        header = [[""] + self.colnames]
        rows = header + [
            [self.rownames[i] + ":"] + [ftos(v) for v in self.data[i]]
            for i in range(self.data.shape[0])
        ]
        min_width = 8
        widths = [
            max(min_width, max(len(r[j]) for r in rows)) for j in range(len(rows[0]))
        ]
        return "\n".join(
            " ".join(r[j].rjust(widths[j]) for j in range(len(r))) for r in rows
        )

