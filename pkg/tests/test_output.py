"""CSV writers: schemas, exact round-tripping, determinism on disk."""

import numpy as np

from alebgk.core import BodyRecord
from alebgk.output import (
    read_csv,
    write_convergence,
    write_snapshot,
    write_trajectory,
)


def test_snapshot_roundtrip_bit_exact_1d(tmp_path):
    rng = np.random.default_rng(3)
    n = 57
    x = np.sort(rng.uniform(-1, 1, n))[:, None]
    rho = rng.uniform(0.1, 2.0, n)
    U = rng.normal(size=(n, 1))
    T = rng.uniform(0.5, 1.5, n)
    path = tmp_path / "snap.csv"
    write_snapshot(path, x, rho, U, T)
    data = read_csv(path)
    assert list(data) == ["x", "rho", "ux", "T"]
    assert np.array_equal(data["x"], x[:, 0])
    assert np.array_equal(data["rho"], rho)
    assert np.array_equal(data["ux"], U[:, 0])
    assert np.array_equal(data["T"], T)


def test_snapshot_has_header_plus_n_rows(tmp_path):
    n = 12
    x = np.linspace(0, 1, n)[:, None]
    path = tmp_path / "snap.csv"
    write_snapshot(path, x, np.ones(n), np.zeros((n, 1)), np.ones(n))
    lines = path.read_text().strip().splitlines()
    assert len(lines) == n + 1
    assert lines[0] == "x,rho,ux,T"


def test_snapshot_2d_schema(tmp_path):
    rng = np.random.default_rng(4)
    n = 20
    x = rng.uniform(size=(n, 2))
    path = tmp_path / "snap2.csv"
    write_snapshot(path, x, np.ones(n), rng.normal(size=(n, 2)), np.ones(n))
    data = read_csv(path)
    assert list(data) == ["x", "y", "rho", "ux", "uy", "T"]
    assert np.array_equal(data["y"], x[:, 1])


def test_trajectory_schemas(tmp_path):
    rec1 = [BodyRecord(0.1 * k, np.array([0.01 * k]), np.array([0.1]),
                       0.0, 0.0, np.array([1.0]), 0.0) for k in range(4)]
    p1 = tmp_path / "traj1.csv"
    write_trajectory(p1, rec1, dim=1)
    d1 = read_csv(p1)
    assert list(d1) == ["t", "xc", "vx"]
    assert np.array_equal(d1["t"], 0.1 * np.arange(4))

    rec2 = [BodyRecord(0.1 * k, np.array([0.0, 0.01 * k]), np.array([0.1, 0.2]),
                       0.3, 0.4, np.array([1.0, 2.0]), 0.5) for k in range(4)]
    p2 = tmp_path / "traj2.csv"
    write_trajectory(p2, rec2, dim=2)
    d2 = read_csv(p2)
    assert list(d2) == ["t", "xc", "yc", "vx", "vy", "omega"]
    assert np.all(d2["omega"] == 0.4)


def test_convergence_table_roundtrip(tmp_path):
    rows = [{"dx": 0.1, "dt": 0.01, "l1": 1e-2, "l1_order": np.nan,
             "l2": 2e-2, "l2_order": np.nan},
            {"dx": 0.05, "dt": 0.005, "l1": 5e-3, "l1_order": 1.0,
             "l2": 1e-2, "l2_order": 1.0}]
    path = tmp_path / "conv.csv"
    write_convergence(path, rows)
    data = read_csv(path)
    assert list(data) == ["dx", "dt", "l1", "l1_order", "l2", "l2_order"]
    assert np.array_equal(data["l1"], [1e-2, 5e-3])
    assert np.isnan(data["l1_order"][0]) and data["l1_order"][1] == 1.0


def test_identical_content_writes_identical_bytes(tmp_path):
    rng = np.random.default_rng(5)
    n = 30
    x = rng.uniform(size=(n, 1))
    rho, U, T = rng.uniform(size=n), rng.normal(size=(n, 1)), rng.uniform(size=n)
    pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
    write_snapshot(pa, x, rho, U, T)
    write_snapshot(pb, x, rho, U, T)
    assert pa.read_bytes() == pb.read_bytes()
