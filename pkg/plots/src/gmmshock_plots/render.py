"""Figure rendering from solver artifacts.

Three products: side-by-side field/sensor panels from a snapshot (with an
optional exact-solution overlay for 1D shock-tube runs), the BIC elbow
curve from an analysis table, and grouped sensor-cost bars from a timing
report. Inputs are never modified and figures carry no timestamps, so
re-rendering the same files reproduces the same images.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .tables import TableFormatError, column, read_table

DEFAULT_FIELDS = ("rho", "s")


def render_fields(snapshot_path, output_path, fields=DEFAULT_FIELDS,
                  color_range=None, oracle_path=None):
    """Nodal point-cloud panels, one per selected field.

    For single-row meshes (all snapshot nodes on one horizontal strip) the
    panels collapse to line plots over x, and an oracle table with columns
    (x, rho, u, p) can be overlaid for comparison.
    """
    if not fields:
        raise TableFormatError("no fields selected")
    header, columns, data = read_table(snapshot_path)
    if data.shape[0] == 0:
        raise TableFormatError(f"{snapshot_path}: snapshot has no rows")
    x = column(columns, data, "x")
    y = column(columns, data, "y")
    values = [column(columns, data, name) for name in fields]

    one_dimensional = int(header.get("mesh.ny", "0")) == 1
    fig, axes = plt.subplots(1, len(fields), figsize=(5.2 * len(fields), 4.2),
                             squeeze=False)
    oracle = read_table(oracle_path) if oracle_path else None
    for ax, name, val in zip(axes[0], fields, values):
        if one_dimensional:
            order = np.argsort(x)
            ax.plot(x[order], val[order], ".", ms=3, label="solver")
            if oracle is not None and name in oracle[1]:
                ox = column(oracle[1], oracle[2], "x")
                ov = column(oracle[1], oracle[2], name)
                oo = np.argsort(ox)
                ax.plot(ox[oo], ov[oo], "-", lw=1.2, label="exact")
                ax.legend(loc="best", fontsize=8)
            ax.set_xlabel("x")
            ax.set_ylabel(name)
        else:
            lo, hi = color_range if color_range else (val.min(), val.max())
            im = ax.scatter(x, y, c=val, s=3, vmin=lo, vmax=hi, cmap="viridis",
                            rasterized=True)
            fig.colorbar(im, ax=ax, shrink=0.85)
            ax.set_aspect("equal")
            ax.set_xlabel("x")
            ax.set_ylabel("y")
        ax.set_title(f"{name}  (t = {float(header.get('time', 'nan')):g})")
    fig.tight_layout()
    fig.savefig(output_path, dpi=150)
    plt.close(fig)
    return output_path


def elbow_index(bic):
    """Index of the elbow: the interior point of largest discrete curvature.

    Returns None for curves too short to define one.
    """
    bic = np.asarray(bic, dtype=float)
    if len(bic) < 3:
        return None
    return int(np.argmax(np.abs(np.diff(bic, 2)))) + 1


def render_bic(table_path, output_path):
    """BIC versus cluster count with the elbow annotated.

    Curves with fewer than three points render without an annotation;
    fewer than two rows is an error.
    """
    header, columns, data = read_table(table_path)
    if data.shape[0] < 2:
        raise TableFormatError(f"{table_path}: need at least two rows for a curve")
    k = column(columns, data, "K")
    bic = column(columns, data, "BIC")
    order = np.argsort(k)
    k, bic = k[order], bic[order]

    fig, ax = plt.subplots(figsize=(5.2, 4.0))
    ax.plot(k, bic, "o-", lw=1.4)
    elbow = elbow_index(bic)
    if elbow is not None:
        ax.annotate("elbow", xy=(k[elbow], bic[elbow]),
                    xytext=(k[elbow] + 0.4, bic[elbow] + 0.12 * (bic.max() - bic.min())),
                    arrowprops={"arrowstyle": "->"})
    ax.set_xlabel("number of clusters K")
    ax.set_ylabel("BIC")
    ax.set_xticks(k)
    fig.tight_layout()
    fig.savefig(output_path, dpi=150)
    plt.close(fig)
    return output_path


def render_cost(report_path, output_path):
    """Grouped bars of relative sensor cost by kind and cadence."""
    header, columns, data = read_table(report_path)
    if data.shape[0] == 0:
        raise TableFormatError(f"{report_path}: empty cost report")
    names = header.get("sensors", "").split()
    if len(names) != data.shape[0]:
        raise TableFormatError(f"{report_path}: sensors header does not match rows")
    cadence = column(columns, data, "cadence").astype(int)
    fraction = column(columns, data, "fraction")

    kinds = list(dict.fromkeys(names))
    cadences = sorted(set(cadence))
    width = 0.8 / len(cadences)
    fig, ax = plt.subplots(figsize=(5.6, 4.0))
    for slot, cad in enumerate(cadences):
        xs, ys = [], []
        for i, kind in enumerate(kinds):
            sel = [j for j, (n, c) in enumerate(zip(names, cadence))
                   if n == kind and c == cad]
            if sel:
                xs.append(i + slot * width)
                ys.append(100.0 * fraction[sel[0]])
        ax.bar(xs, ys, width=width, label=f"every {cad} step(s)")
    ax.set_xticks(np.arange(len(kinds)) + 0.4 - width / 2)
    ax.set_xticklabels(kinds)
    ax.set_ylabel("sensor share of step time (%)")
    threads = header.get("threads")
    ax.set_title(f"sensor cost ({header.get('steps', '?')} steps, "
                 f"{threads} thread{'s' if threads != '1' else ''})")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(output_path, dpi=150)
    plt.close(fig)
    return output_path
