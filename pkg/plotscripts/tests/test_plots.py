"""Tests for the plotting scripts against synthetic CSV fixtures."""

import os

import numpy as np
import pytest

from plotscripts import convergence, field1d, field2d, trajectory
from plotscripts.io import SchemaError, read_columns


def _write_csv(path, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


@pytest.fixture
def snapshot_1d(tmp_path):
    path = tmp_path / "snap1d.csv"
    x = np.linspace(-1, 1, 50)
    _write_csv(path, ["x", "rho", "ux", "T"],
               np.column_stack([x, 1 + 0.1 * x, 0.05 * x, 1 - 0.02 * x**2]))
    return str(path)


@pytest.fixture
def snapshot_2d(tmp_path):
    path = tmp_path / "snap2d.csv"
    g = np.linspace(0, 1, 12)
    X, Y = np.meshgrid(g, g)
    x, y = X.ravel(), Y.ravel()
    _write_csv(path, ["x", "y", "rho", "ux", "uy", "T"],
               np.column_stack([x, y, np.ones_like(x), 0.1 * y, -0.1 * x,
                                1 + 0.5 * x * y]))
    return str(path)


@pytest.fixture
def trajectory_csv(tmp_path):
    path = tmp_path / "trajectory.csv"
    t = np.linspace(0, 0.6, 200)
    xc = -0.1 + 0.1 * np.exp(-8 * t) * np.cos(20 * t)
    vx = np.gradient(xc, t)
    _write_csv(path, ["t", "xc", "vx"], np.column_stack([t, xc, vx]))
    return str(path)


# -- io ---------------------------------------------------------------------

def test_read_columns_roundtrip(snapshot_1d):
    cols = read_columns(snapshot_1d, required=("x", "rho", "ux", "T"))
    assert set(cols) == {"x", "rho", "ux", "T"}
    assert len(cols["x"]) == 50


def test_missing_column_names_offender(tmp_path):
    path = tmp_path / "bad.csv"
    _write_csv(path, ["x", "rho"], [[0.0, 1.0]])
    with pytest.raises(SchemaError, match="'ux'"):
        read_columns(str(path), required=("x", "rho", "ux"))


def test_unparseable_cell_names_column(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,rho\n0.0,oops\n")
    with pytest.raises(SchemaError, match="'rho'"):
        read_columns(str(path), required=("x", "rho"))


# -- convergence ------------------------------------------------------------

def test_fit_slope_exact_geometric():
    dx = np.array([0.1, 0.05, 0.025])
    err = np.array([1e-2, 2.5e-3, 6.25e-4])
    assert abs(convergence.fit_slope(dx, err) - 2.0) < 1e-12


def test_convergence_plot_annotates_slope(tmp_path, capsys):
    path = tmp_path / "conv.csv"
    dx = np.array([0.1, 0.05, 0.025])
    err = np.array([1e-2, 2.5e-3, 6.25e-4])
    _write_csv(path, ["dx", "dt", "l1", "l1_order", "l2", "l2_order"],
               np.column_stack([dx, dx, err, np.full(3, np.nan), err,
                                np.full(3, np.nan)]))
    out = tmp_path / "conv.png"
    rc = convergence.main(["--in", str(path), "--out", str(out)])
    assert rc == 0
    assert out.exists()
    assert "slope 2.000000" in capsys.readouterr().out


def test_empty_ladder_errors_without_file(tmp_path, capsys):
    path = tmp_path / "conv.csv"
    _write_csv(path, ["dx", "dt", "l1", "l1_order", "l2", "l2_order"], [])
    out = tmp_path / "conv.png"
    rc = convergence.main(["--in", str(path), "--out", str(out)])
    assert rc == 1
    assert not out.exists()
    assert "error:" in capsys.readouterr().err


def test_single_row_ladder_rejected(tmp_path):
    with pytest.raises(SchemaError):
        convergence.fit_slope([0.1], [1e-2])


# -- field plots --------------------------------------------------------------

def test_field_1d_writes_image(snapshot_1d, tmp_path):
    out = tmp_path / "field.png"
    assert field1d.main(["--in", snapshot_1d, "--out", str(out)]) == 0
    assert out.stat().st_size > 0


def test_field_1d_rejects_2d_schema(snapshot_2d, tmp_path, capsys):
    out = tmp_path / "field.png"
    rc = field1d.main(["--in", snapshot_2d, "--out", str(out)])
    assert rc == 0  # 2D schema is a superset: x,rho,ux,T all present


def test_field_1d_missing_file(tmp_path, capsys):
    rc = field1d.main(["--in", str(tmp_path / "nope.csv"),
                       "--out", str(tmp_path / "o.png")])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_field_2d_with_bodies(snapshot_2d, tmp_path):
    bodies = tmp_path / "bodies.csv"
    ang = np.linspace(0, 2 * np.pi, 16, endpoint=False)
    _write_csv(bodies, ["body_id", "x", "y"],
               np.column_stack([np.zeros(16), 0.5 + 0.1 * np.cos(ang),
                                0.5 + 0.1 * np.sin(ang)]))
    out = tmp_path / "field2d.png"
    rc = field2d.main(["--in", snapshot_2d, str(bodies), "--out", str(out)])
    assert rc == 0
    assert out.stat().st_size > 0


def test_field_2d_rejects_1d_snapshot(snapshot_1d, tmp_path, capsys):
    rc = field2d.main(["--in", snapshot_1d, "--out",
                       str(tmp_path / "o.png")])
    assert rc == 1
    assert "'y'" in capsys.readouterr().err


# -- trajectory ---------------------------------------------------------------

def test_trajectory_plot_with_equilibrium(trajectory_csv, tmp_path):
    out = tmp_path / "traj.png"
    rc = trajectory.main(["--in", trajectory_csv, "--out", str(out),
                          "--equilibrium", "-0.1"])
    assert rc == 0
    assert out.stat().st_size > 0


def test_trajectory_2d_schema(tmp_path):
    path = tmp_path / "traj2d.csv"
    t = np.linspace(0, 1, 20)
    _write_csv(path, ["t", "xc", "yc", "vx", "vy", "omega"],
               np.column_stack([t, t, t, t, t, t]))
    out = tmp_path / "traj.png"
    assert trajectory.main(["--in", str(path), "--out", str(out)]) == 0


def test_label_count_mismatch(trajectory_csv, tmp_path, capsys):
    rc = trajectory.main(["--in", trajectory_csv, "--out",
                          str(tmp_path / "o.png"), "--label", "a", "b"])
    assert rc == 1


def test_images_deterministic(snapshot_1d, tmp_path):
    out1, out2 = tmp_path / "a.png", tmp_path / "b.png"
    field1d.main(["--in", snapshot_1d, "--out", str(out1)])
    field1d.main(["--in", snapshot_1d, "--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()
