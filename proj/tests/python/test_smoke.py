import math

import numpy as np
import pytest

import rdv


def fast(cfg):
    cfg.max_rounds = 0
    cfg.propagate = False
    return cfg


def test_presets():
    assert rdv.preset_names() == ["coplanar_nominal", "noncoplanar_10deg"]
    cfg = rdv.load_preset("coplanar_nominal")
    assert cfg.scenario.rf == 1.2
    assert cfg.scenario.coplanar()
    assert cfg.nodes == 101
    assert len(cfg.sweep_tf) == 16
    assert len(cfg.hash()) == 16


def test_config_errors():
    with pytest.raises(rdv.ConfigError, match="scenario.rf"):
        rdv.parse_config("scenario:\n  tf: 10\n")
    with pytest.raises(rdv.ConfigError):
        rdv.load_preset("missing")
    text = rdv.load_preset("noncoplanar_10deg").canonical_text()
    assert rdv.parse_config(text).hash() == rdv.load_preset("noncoplanar_10deg").hash()


def test_hohmann():
    assert rdv.hohmann_dm(1.0, 1.2, 1.0) == pytest.approx(0.0833, abs=1e-4)


def test_solve_nominal():
    rec = rdv.solve(fast(rdv.load_preset("coplanar_nominal")))
    assert rec.converged
    row = rec.row()
    assert list(row) == rdv.sweep_columns()
    assert row["family"] == "A"
    assert row["dm_total"] == pytest.approx(sum(rec.propellant))
    x = rec.states("I")
    assert x.shape == (7, 101)
    assert len(rec.times) == 101
    u = rec.controls("II")
    assert np.all(np.linalg.norm(u[:3], axis=0) <= u[3] + 1e-6)
    assert rec.theta_span[0] == pytest.approx(2 * math.pi, rel=0.15)
    assert rec.trajectory_csv().startswith("sat,t,r,theta")
    with pytest.raises(ValueError):
        rec.states("III")


def test_sweep_rows_sorted():
    cfg = fast(rdv.load_preset("coplanar_nominal"))
    rows = rdv.sweep(cfg, [11.0, 10.5])
    assert [r["tf"] for r in rows] == [10.5, 11.0]
    assert all(r["note"] == "" for r in rows)


def test_solver_failure_is_recorded():
    cfg = fast(rdv.load_preset("coplanar_nominal"))
    cfg.continuation = False
    rows = rdv.sweep(cfg, [0.5])
    assert not rows[0]["converged"]
    assert math.isnan(rows[0]["dm_total"])
    cfg.scenario.tf = 0.5
    with pytest.raises(rdv.SolverError):
        rdv.solve(cfg)
