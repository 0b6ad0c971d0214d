"""Reader for the solver's plain-text artifacts.

The format is shared by snapshots, BIC tables and cost reports: any number
of '# key = value' header lines, one '# columns = ...' line, then
space-separated numeric rows. This module is deliberately standalone; the
plotting side of the toolchain talks to the solver only through these
files.
"""

import numpy as np


class TableFormatError(ValueError):
    """File is not a well-formed solver artifact."""


def read_table(path):
    """Returns (header dict, column-name tuple, float array)."""
    header = {}
    columns = None
    rows = []
    with open(path, encoding="utf-8") as handle:
        for raw in handle:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" not in body:
                    continue
                key, value = (part.strip() for part in body.split("=", 1))
                if key == "columns":
                    columns = tuple(value.split())
                else:
                    header[key] = value
                continue
            rows.append([float(cell) for cell in line.split()])
    if columns is None:
        raise TableFormatError(f"{path}: missing 'columns' header line")
    data = np.array(rows, dtype=float) if rows else np.empty((0, len(columns)))
    if data.size and data.shape[1] != len(columns):
        raise TableFormatError(f"{path}: row width does not match columns header")
    return header, columns, data


def column(columns, data, name: str):
    if name not in columns:
        raise TableFormatError(f"missing column {name!r} (have {', '.join(columns)})")
    return data[:, columns.index(name)]
