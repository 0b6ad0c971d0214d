"""Plain-text artifacts: solution snapshots, model-selection tables and
sensor-cost reports.

All files share the same shape: '#'-prefixed ``key = value`` header lines,
one ``columns = ...`` line naming the data columns, then space-separated
rows printed with '%.17e' so a read-write cycle is byte-identical.
"""

import numpy as np

SNAPSHOT_COLUMNS = ("x", "y", "rho", "rhou", "rhov", "rhoE", "p", "s", "alpha")
BIC_COLUMNS = ("K", "logL", "N_p", "AIC", "BIC")
COST_COLUMNS = ("cadence", "sensor_seconds", "total_seconds", "fraction")

_FLOAT_FMT = "%.17e"


class SnapshotFormatError(ValueError):
    """File is not a well-formed table artifact."""


def write_table(path, header: dict, columns, rows):
    """Write header metadata and a numeric table (strings allowed per cell)."""
    rows = np.asarray(rows)
    with open(path, "w", encoding="utf-8") as handle:
        for key, value in header.items():
            handle.write(f"# {key} = {value}\n")
        handle.write(f"# columns = {' '.join(columns)}\n")
        for row in rows:
            handle.write(" ".join(
                cell if isinstance(cell, str) else _FLOAT_FMT % cell for cell in row))
            handle.write("\n")


def read_table(path):
    """Returns (header dict, column names, data array)."""
    header = {}
    columns = None
    data = []
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
            data.append([float(cell) for cell in line.split()])
    if columns is None:
        raise SnapshotFormatError(f"{path}: missing 'columns' header line")
    table = np.array(data, dtype=float) if data else np.empty((0, len(columns)))
    if table.size and table.shape[1] != len(columns):
        raise SnapshotFormatError(f"{path}: row width does not match columns header")
    return header, columns, table


def write_snapshot(path, config, time: float, step: int, x, y, q, sensor, alpha):
    """Nodal solution table; row order is (element, x-node, y-node)."""
    rows = np.column_stack([
        x.ravel(), y.ravel(),
        q[..., 0].ravel(), q[..., 1].ravel(), q[..., 2].ravel(), q[..., 3].ravel(),
        _nodal_pressure(q).ravel(), sensor.ravel(), alpha.ravel(),
    ])
    header = {
        "artifact": "gmmshock snapshot",
        "case": config.case,
        "time": _FLOAT_FMT % time,
        "step": str(step),
        "config_hash": config.digest(),
        "seed": str(config.seed),
        "mesh.nx": str(config.nx),
        "mesh.ny": str(config.ny),
        "mesh.x0": repr(config.x0),
        "mesh.x1": repr(config.x1),
        "mesh.y0": repr(config.y0),
        "mesh.y1": repr(config.y1),
        "order": str(config.order),
    }
    write_table(path, header, SNAPSHOT_COLUMNS, rows)


def _nodal_pressure(q):
    from .physics import pressure
    return pressure(q)


def read_snapshot(path):
    """Returns (header, data) with data shaped (rows, 9) per SNAPSHOT_COLUMNS."""
    header, columns, data = read_table(path)
    if tuple(columns) != SNAPSHOT_COLUMNS:
        raise SnapshotFormatError(f"{path}: unexpected snapshot columns {columns}")
    return header, data


def snapshot_field(columns, data, name: str):
    if name not in columns:
        raise SnapshotFormatError(f"snapshot has no column {name!r}")
    return data[:, columns.index(name)]
