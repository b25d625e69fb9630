"""Command line interface: exit codes, produced files, overrides."""

import numpy as np

from alebgk.cli import main
from alebgk.output import read_csv


def test_run_preset_writes_snapshots_and_probe(tmp_path, capsys):
    rc = main(["run", "example1", "--t-final", "0.004", "--dx", "0.05",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "snapshot_init.csv").exists()
    assert (tmp_path / "snapshot_final.csv").exists()
    probe = read_csv(tmp_path / "probe.csv")
    assert list(probe) == ["x", "rho", "ux", "T"]
    assert len(probe["x"]) == 100
    assert "steps" in capsys.readouterr().out


def test_run_yaml_config_and_scheme_override(tmp_path):
    cfg_path = tmp_path / "case.yaml"
    cfg_path.write_text("""
name: tiny
layout: interval
dim: 1
R: 1.0
rho0: 1.0
T0: 1.0
tau_mode: fixed
tau_value: 1.0e-2
vmax: 5.0
Nv: 10
dx: 0.1
t_final: 0.01
params:
  domain: [0.0, 1.0]
  bc_left: {type: far_field}
  bc_right: {type: far_field}
""")
    rc = main(["run", str(cfg_path), "--scheme", "ARS(2,2,1)",
               "--out-dir", str(tmp_path / "out")])
    assert rc == 0


def test_run_numbered_snapshots(tmp_path):
    rc = main(["run", "example1", "--t-final", "0.004", "--dx", "0.05",
               "--snapshot-every", "1", "--out-dir", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "snapshot_0000.csv").exists()
    assert (tmp_path / "snapshot_0001.csv").exists()


def test_run_plate_writes_trajectory(tmp_path):
    rc = main(["run", "example4", "--t-final", "1e-5",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    traj = read_csv(tmp_path / "trajectory.csv")
    assert list(traj) == ["t", "xc", "vx"]
    assert len(traj["t"]) >= 1


def test_unknown_preset_fails_with_diagnostic(tmp_path, capsys):
    rc = main(["run", "not-a-preset", "--out-dir", str(tmp_path)])
    assert rc != 0
    assert "error:" in capsys.readouterr().err


def test_converge_writes_table(tmp_path):
    rc = main(["converge", "example1", "--ladder", "0.08,0.04,0.02",
               "--t-final", "0.005", "--out-dir", str(tmp_path)])
    assert rc == 0
    data = read_csv(tmp_path / "convergence.csv")
    assert list(data) == ["dx", "dt", "l1", "l1_order", "l2", "l2_order"]
    assert len(data["dx"]) == 2


def test_converge_rejects_short_ladder(tmp_path, capsys):
    rc = main(["converge", "example1", "--ladder", "0.08",
               "--out-dir", str(tmp_path)])
    assert rc != 0
    assert "ladder" in capsys.readouterr().err


def test_riemann_subcommand_samples_solution(tmp_path):
    rc = main(["riemann", "1,0,1", "0.125,0,0.1", "0.2", "-n", "201",
               "--out-dir", str(tmp_path)])
    assert rc == 0
    data = read_csv(tmp_path / "riemann.csv")
    assert len(data["x"]) == 201
    assert data["rho"][0] == 1.0 and data["rho"][-1] == 0.125
    assert np.all(np.diff(data["rho"]) <= 1e-12)  # monotone for this tube


def test_riemann_rejects_bad_state(capsys):
    rc = main(["riemann", "1,0", "0.125,0,0.1", "0.2"])
    assert rc != 0
    assert "rho,u,p" in capsys.readouterr().err
