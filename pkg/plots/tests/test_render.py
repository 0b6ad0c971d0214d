"""The fixtures below write solver artifacts in the documented text format
by hand, so these tests double as a contract check on the file layout."""

import numpy as np
import pytest

from gmmshock_plots import render_bic, render_cost, render_fields
from gmmshock_plots.render import elbow_index
from gmmshock_plots.tables import TableFormatError, read_table


def write_snapshot(path, nx=4, ny=4, n=3, one_d=False):
    rng = np.random.default_rng(0)
    header = {
        "artifact": "gmmshock snapshot", "case": "demo", "time": "%.17e" % 0.25,
        "step": "10", "config_hash": "abc", "seed": "1",
        "mesh.nx": str(nx), "mesh.ny": str(1 if one_d else ny),
        "mesh.x0": "0.0", "mesh.x1": "1.0", "mesh.y0": "0.0", "mesh.y1": "1.0",
        "order": str(n - 1),
    }
    rows = nx * (1 if one_d else ny) * n * n
    x = rng.random(rows)
    y = np.zeros(rows) if one_d else rng.random(rows)
    rho = 1.0 + np.sin(2 * np.pi * x)
    base = np.column_stack([x, y, rho, rho * 0.1, rho * 0.0, rho * 2.0,
                            0.4 * rho, rng.random(rows), rng.random(rows) * 0.5])
    with open(path, "w", encoding="utf-8") as handle:
        for key, value in header.items():
            handle.write(f"# {key} = {value}\n")
        handle.write("# columns = x y rho rhou rhov rhoE p s alpha\n")
        for row in base:
            handle.write(" ".join("%.17e" % cell for cell in row) + "\n")
    return path


def write_bic_table(path, bic_values):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("# artifact = gmmshock bic table\n")
        handle.write("# columns = K logL N_p AIC BIC\n")
        for i, bic in enumerate(bic_values, start=1):
            handle.write(f"{i} {-0.5 * bic:.6e} {6 * i - 1} {bic + 10:.5e} {bic:.6e}\n")
    return path


def write_cost_report(path, sensors=("gmm", "gmm", "modal", "modal", "integral", "integral"),
                      cadences=(1, 10, 1, 10, 1, 10)):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("# artifact = gmmshock sensor cost\n# case = demo\n")
        handle.write("# steps = 20\n# threads = 1\n")
        handle.write(f"# sensors = {' '.join(sensors)}\n")
        handle.write("# columns = cadence sensor_seconds total_seconds fraction\n")
        for name, cad in zip(sensors, cadences):
            frac = 0.15 / cad if name == "gmm" else 0.005 / cad
            handle.write(f"{cad} {frac:.4e} {1.0:.4e} {frac:.4e}\n")
    return path


class TestFields:
    def test_two_panel_figure(self, tmp_path):
        snap = write_snapshot(tmp_path / "snap.txt")
        out = render_fields(snap, tmp_path / "fig.png")
        assert (tmp_path / "fig.png").stat().st_size > 0
        assert str(out).endswith("fig.png")

    def test_missing_column_named_in_error(self, tmp_path):
        snap = write_snapshot(tmp_path / "snap.txt")
        with pytest.raises(TableFormatError, match="vorticity"):
            render_fields(snap, tmp_path / "fig.png", fields=("vorticity",))

    def test_empty_selection_rejected(self, tmp_path):
        snap = write_snapshot(tmp_path / "snap.txt")
        with pytest.raises(TableFormatError):
            render_fields(snap, tmp_path / "fig.png", fields=())

    def test_one_dimensional_with_oracle_overlay(self, tmp_path):
        snap = write_snapshot(tmp_path / "snap.txt", nx=16, one_d=True)
        oracle = tmp_path / "oracle.txt"
        xs = np.linspace(0, 1, 50)
        with open(oracle, "w", encoding="utf-8") as handle:
            handle.write("# columns = x rho u p\n")
            for x in xs:
                handle.write(f"{x:.8e} {1 + np.sin(2 * np.pi * x):.8e} 0.0 1.0\n")
        out = render_fields(snap, tmp_path / "fig.png", fields=("rho",),
                            oracle_path=oracle)
        assert (tmp_path / "fig.png").stat().st_size > 0

    def test_input_not_mutated_and_render_deterministic(self, tmp_path):
        snap = write_snapshot(tmp_path / "snap.txt")
        before = snap.read_bytes()
        render_fields(snap, tmp_path / "a.png")
        render_fields(snap, tmp_path / "b.png")
        assert snap.read_bytes() == before
        assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


class TestBic:
    def test_six_point_curve(self, tmp_path):
        table = write_bic_table(tmp_path / "bic.txt",
                                [1e6, -8e6, -8.4e6, -8.5e6, -8.55e6, -8.58e6])
        render_bic(table, tmp_path / "fig.png")
        assert (tmp_path / "fig.png").stat().st_size > 0

    def test_elbow_at_two_for_paper_shaped_data(self):
        # steep drop from K=1 to K=2, then flat
        assert elbow_index([1e6, -8e6, -8.4e6, -8.5e6, -8.55e6, -8.58e6]) == 1

    def test_monotone_decreasing_renders(self, tmp_path):
        table = write_bic_table(tmp_path / "bic.txt", [6.0, 5.0, 4.0, 3.0])
        render_bic(table, tmp_path / "fig.png")
        assert (tmp_path / "fig.png").stat().st_size > 0

    def test_single_row_rejected(self, tmp_path):
        table = write_bic_table(tmp_path / "bic.txt", [1.0])
        with pytest.raises(TableFormatError):
            render_bic(table, tmp_path / "fig.png")

    def test_two_rows_render_without_annotation(self, tmp_path):
        table = write_bic_table(tmp_path / "bic.txt", [2.0, 1.0])
        render_bic(table, tmp_path / "fig.png")
        assert elbow_index([2.0, 1.0]) is None


class TestCost:
    def test_three_sensors_two_cadences(self, tmp_path):
        report = write_cost_report(tmp_path / "cost.txt")
        render_cost(report, tmp_path / "fig.png")
        assert (tmp_path / "fig.png").stat().st_size > 0

    def test_single_sensor_report(self, tmp_path):
        report = write_cost_report(tmp_path / "cost.txt",
                                   sensors=("gmm",), cadences=(1,))
        render_cost(report, tmp_path / "fig.png")
        assert (tmp_path / "fig.png").stat().st_size > 0

    def test_empty_report_rejected(self, tmp_path):
        path = tmp_path / "cost.txt"
        path.write_text("# sensors = \n# columns = cadence sensor_seconds total_seconds fraction\n")
        with pytest.raises(TableFormatError):
            render_cost(path, tmp_path / "fig.png")


class TestTables:
    def test_missing_columns_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("# time = 0\n1 2\n")
        with pytest.raises(TableFormatError):
            read_table(path)

    def test_header_and_values_parsed(self, tmp_path):
        path = tmp_path / "ok.txt"
        path.write_text("# alpha = one two\n# columns = a b\n1 2\n3 4\n")
        header, columns, data = read_table(path)
        assert header["alpha"] == "one two"
        assert columns == ("a", "b")
        assert np.array_equal(data, [[1, 2], [3, 4]])
