import json
import math

import numpy as np
import pytest

import rydnhqc


def test_qs_closed_form_and_quadrature():
    assert rydnhqc.qs_closed_form(0.5, math.pi) == pytest.approx(4.0)
    assert rydnhqc.systematic_error_sensitivity(math.pi, 1.0, 4000) < 1e-12
    q = rydnhqc.systematic_error_sensitivity(0.7, 0.3, 4000)
    assert q == pytest.approx(rydnhqc.qs_closed_form(0.3, 0.7), rel=1e-6)


def test_controls_and_targets():
    ox, oy = rydnhqc.controls(0.25)
    assert math.hypot(ox, oy) == pytest.approx(20.34, abs=0.02)
    assert np.allclose(rydnhqc.target_gate("not"), [[0, 1], [1, 0]])
    assert rydnhqc.average_fidelity(np.eye(4, dtype=complex)) == pytest.approx(1.0)
    with pytest.raises(rydnhqc.ScheduleError):
        rydnhqc.controls(1.5)


def test_config_round_trip():
    c = rydnhqc.Config("error-sweep")
    assert c.level == "L2"
    assert len(c.epsilons) == 21
    c.epsilon = 0.02
    back = rydnhqc.Config.from_toml(c.to_toml())
    assert back == c
    with pytest.raises(rydnhqc.ConfigError):
        rydnhqc.Config("nonsense")
    with pytest.raises(rydnhqc.ConfigError):
        c.level = "L9"


def test_effective_not_gate_run(tmp_path):
    c = rydnhqc.Config("not-gate")
    c.level = "L2"
    c.steps = 4000
    c.snapshots = 50
    res = rydnhqc.run(c)
    assert res.scalars["F_avg"] > 1 - 1e-6
    assert res.scalars["theta_minus_T"] == pytest.approx(math.pi, abs=1e-6)
    fig4a = res.tables["fig4a"]
    assert fig4a.shape == (51, 3)
    assert res.columns("fig4a") == ["t", "t_us", "F_avg"]

    paths = rydnhqc.emit_outputs(res, c, tmp_path)
    assert {p.name for p in paths} == {"fig3b.csv", "fig3c.csv", "fig4a.csv", "summary.json"}
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["scalars"]["F_avg"] == res.scalars["F_avg"]
    data = np.loadtxt(tmp_path / "fig4a.csv", delimiter=",", comments="#")
    assert np.array_equal(data, fig4a)
