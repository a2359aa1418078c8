"""Alice's pulse-train protocol.

Alice sits at ``x = 0`` and fires a pulse every ``dt_A``. Each pulse is a
right-moving light line ``chi_A = -n dt_A``; it reaches Bob where it crosses
his worldline, and Bob's clock reading at arrival is ``t_B = -chi_B``.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import lightcone as lc
from . import trajectory as tr
from .errors import NoIntersection, TooFewRecords
from .quadrature import QuadratureConfig


@dataclass(frozen=True)
class ScenarioConfig:
    traj: tr.Trajectory
    dt_A: float
    count: int
    s: int = 1
    quad: QuadratureConfig = QuadratureConfig()

    def __post_init__(self):
        if not self.dt_A > 0:
            raise ValueError(f"dt_A must be positive, got {self.dt_A!r}")
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"count must be an integer >= 1, got {self.count!r}")
        if self.s != 1:
            raise ValueError("pulses travel from Alice towards Bob, so s must be +1")

    @property
    def frame_map(self):
        return lc.FrameMap(self.traj, self.s, self.quad)


@dataclass(frozen=True)
class EventRecord:
    n: int
    t_A_emit: float
    t_A_arrive: float
    x_A_arrive: float
    chi_A: float
    chi_B: float
    t_B_arrive: float


EVENT_FIELDS = tuple(f.name for f in fields(EventRecord))


def run_scenario(cfg):
    fm = cfg.frame_map
    records = []
    for n in range(1, cfg.count + 1):
        t_emit = n * cfg.dt_A
        chi_A = -t_emit
        try:
            hit = tr.light_intersection(cfg.traj, chi_A, cfg.s)
            chi_B = lc.general_map(fm, chi_A)
        except NoIntersection as exc:
            raise NoIntersection(f"pulse n={n}: {exc}", chi=chi_A, s=cfg.s, pulse=n) from exc
        records.append(EventRecord(n, t_emit, hit.t, hit.x, chi_A, chi_B, -chi_B))
    return records


def arrival_intervals(records):
    if len(records) < 2:
        raise TooFewRecords("need at least two records to form arrival intervals")
    return np.diff([r.t_B_arrive for r in records])


def bob_frame_trajectory(cfg, records=None):
    """Alice's worldline ``(t_B, mu_B)`` in Bob's frame, sampled at her emissions.

    Between consecutive pulses Bob is treated as inertial, with the velocity
    whose Doppler factor reproduces that segment's ``dchi_B / dchi_A``. Her
    clock then advances by ``gamma dt_A`` in his frame, and the step in her
    position follows from ``dchi_B = -dt_B + dmu_B``. Samples start at the
    shared origin.
    """
    records = records if records is not None else run_scenario(cfg)
    chi_B = np.concatenate([[0.0], [r.chi_B for r in records]])
    d_chi_B = np.diff(chi_B)
    k = d_chi_B / (-cfg.dt_A)
    gamma = (k * k + 1.0) / (2.0 * k)
    d_t_B = gamma * cfg.dt_A
    d_mu_B = d_chi_B + d_t_B
    t_B = np.concatenate([[0.0], np.cumsum(d_t_B)])
    mu_B = np.concatenate([[0.0], np.cumsum(d_mu_B)])
    return t_B, mu_B


def write_events_csv(records, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(EVENT_FIELDS)
    for r in records:
        row = asdict(r)
        writer.writerow([r.n] + [f"{row[name]:.17g}" for name in EVENT_FIELDS[1:]])


def spacetime_rows(records, t_B_emit, mu_B):
    """Long-format rows ``(frame, series, n, t, x)`` for spacetime diagrams.

    Frame A holds each pulse's emission at Alice and arrival at Bob; frame B
    holds the same two events in Bob's coordinates.
    """
    rows = [("A", "emit", 0, 0.0, 0.0), ("B", "emit", 0, 0.0, 0.0)]
    for r, tb, mb in zip(records, t_B_emit[1:], mu_B[1:]):
        rows.append(("A", "emit", r.n, r.t_A_emit, 0.0))
        rows.append(("A", "arrive", r.n, r.t_A_arrive, r.x_A_arrive))
        rows.append(("B", "emit", r.n, float(tb), float(mb)))
        rows.append(("B", "arrive", r.n, r.t_B_arrive, 0.0))
    return rows


def write_spacetime_csv(rows, stream):
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["frame", "series", "n", "t", "x"])
    for frame, series, n, t, x in rows:
        writer.writerow([frame, series, n, f"{t:.17g}", f"{x:.17g}"])
