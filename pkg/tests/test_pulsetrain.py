"""Alice's pulse train seen by Bob."""

import io
import math

import numpy as np
import pytest

from blipframe import pulsetrain as pt
from blipframe import trajectory as tr
from blipframe.errors import NoIntersection, TooFewRecords


def scenario(traj, dt, count):
    return pt.ScenarioConfig(traj, dt, count)


def test_inertial_example():
    recs = pt.run_scenario(scenario(tr.ConstantVelocity(0.6), 1.0, 3))
    assert [r.n for r in recs] == [1, 2, 3]
    for r in recs:
        assert r.t_A_emit == r.n
        assert r.chi_A == -r.t_A_emit
        assert r.t_A_arrive == pytest.approx(2.5 * r.n, abs=1e-12)
        # pulse geometry: the light line x = t - n meets x = 0.6 t
        assert r.t_A_arrive == pytest.approx(r.n / (1 - 0.6), abs=1e-12)
        assert r.x_A_arrive == pytest.approx(0.6 * r.t_A_arrive, abs=1e-12)
        assert r.t_B_arrive == pytest.approx(2.0 * r.n, abs=1e-12)
        assert r.t_B_arrive == -r.chi_B


def test_resting_observer():
    recs = pt.run_scenario(scenario(tr.ConstantVelocity(0.0), 1.0, 4))
    for r in recs:
        assert r.t_B_arrive == pytest.approx(r.n, abs=1e-12)
        assert r.t_A_arrive == pytest.approx(r.n, abs=1e-12)
        assert r.t_A_emit == r.n
    np.testing.assert_allclose(pt.arrival_intervals(recs), 1.0, atol=1e-12)


def test_unit_acceleration_train_hits_horizon():
    # pulse n = 10 is the light line chi = -1, the a=1 horizon
    with pytest.raises(NoIntersection) as info:
        pt.run_scenario(scenario(tr.UniformProperAcceleration(1.0), 0.1, 50))
    assert info.value.pulse == 10
    assert "n=10" in str(info.value)


def test_accelerating_train_inside_horizon():
    a = 0.1
    recs = pt.run_scenario(scenario(tr.UniformProperAcceleration(a), 0.1, 50))
    t_B = np.array([r.t_B_arrive for r in recs])
    chi_A = np.array([r.chi_A for r in recs])
    np.testing.assert_allclose(t_B, -np.log1p(a * chi_A) / a, rtol=1e-10)
    gaps = pt.arrival_intervals(recs)
    assert np.all(np.diff(gaps) > 0)
    assert np.ptp(gaps) > 0


def test_arrival_intervals_inertial():
    recs = pt.run_scenario(scenario(tr.ConstantVelocity(0.6), 1.0, 20))
    np.testing.assert_allclose(pt.arrival_intervals(recs), 2.0, atol=1e-9)
    assert math.sqrt(1.6 / 0.4) == 2.0
    with pytest.raises(TooFewRecords):
        pt.arrival_intervals(recs[:1])


def test_bob_frame_examples():
    t_B, mu_B = pt.bob_frame_trajectory(scenario(tr.ConstantVelocity(0.0), 1.0, 5))
    np.testing.assert_allclose(mu_B, 0.0, atol=1e-15)
    np.testing.assert_allclose(t_B, np.arange(6), atol=1e-12)

    t_B, mu_B = pt.bob_frame_trajectory(scenario(tr.ConstantVelocity(0.6), 1.0, 10))
    np.testing.assert_allclose(np.diff(mu_B) / np.diff(t_B), -0.6, atol=1e-9)
    # Alice's clock dilated by gamma = 1.25 in Bob's frame
    np.testing.assert_allclose(np.diff(t_B), 1.25, atol=1e-12)


def test_bob_frame_accelerating():
    t_B, mu_B = pt.bob_frame_trajectory(scenario(tr.UniformProperAcceleration(0.1), 0.1, 50))
    speed = np.abs(np.diff(mu_B) / np.diff(t_B))
    assert np.all(np.diff(speed) > 0)
    assert np.all(speed < 1)
    assert t_B[0] == mu_B[0] == 0.0


def test_record_invariants():
    for beta in (0.2, 0.6, 0.9):
        recs = pt.run_scenario(scenario(tr.ConstantVelocity(beta), 0.7, 15))
        kappa = math.sqrt((1 + beta) / (1 - beta))
        for r in recs:
            assert abs(r.chi_A + (1 - beta) * r.t_A_arrive) <= 1e-10 * max(1, abs(r.chi_A))
            assert abs(r.chi_B / r.chi_A - kappa) <= 1e-10
            assert r.t_A_arrive > r.t_A_emit
        assert np.all(np.diff([r.t_B_arrive for r in recs]) > 0)


@pytest.mark.parametrize("traj", [
    tr.UniformProperAcceleration(0.3),
    tr.PiecewiseConstantVelocity((1.0, 2.0), (0.2, 0.5, 0.8)),
], ids=["rindler", "piecewise"])
def test_spacing_independence(traj):
    coarse = pt.run_scenario(scenario(traj, 0.2, 12))
    fine = pt.run_scenario(scenario(traj, 0.1, 24))
    np.testing.assert_allclose([r.chi_B for r in coarse], [r.chi_B for r in fine[1::2]], rtol=0, atol=1e-9)


@pytest.mark.parametrize("kw", [dict(dt_A=0.0), dict(dt_A=-1.0), dict(count=0), dict(count=2.5), dict(s=-1)])
def test_config_validation(kw):
    base = dict(traj=tr.ConstantVelocity(0.5), dt_A=1.0, count=3)
    with pytest.raises(ValueError):
        pt.ScenarioConfig(**{**base, **kw})


def test_csv_writers():
    cfg = scenario(tr.ConstantVelocity(0.6), 1.0, 2)
    recs = pt.run_scenario(cfg)
    buf = io.StringIO()
    pt.write_events_csv(recs, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "n,t_A_emit,t_A_arrive,x_A_arrive,chi_A,chi_B,t_B_arrive"
    assert lines[1].split(",")[0] == "1" and float(lines[1].split(",")[-1]) == pytest.approx(2.0)

    rows = pt.spacetime_rows(recs, *pt.bob_frame_trajectory(cfg, recs))
    assert len(rows) == 2 + 4 * len(recs)
    buf = io.StringIO()
    pt.write_spacetime_csv(rows, buf)
    assert buf.getvalue().splitlines()[0] == "frame,series,n,t,x"
    assert {r[0] for r in rows} == {"A", "B"}
