"""Acceptance gate: the eight headline criteria at their stated tolerances.

Each test prints one ``PASS``/``FAIL`` line to the terminal. Running this file
directly (``python3 tests/test_acceptance.py``) prints the same summary.
"""

import math
import sys
import time

import numpy as np
import pytest

from blipframe import blipfield as bf
from blipframe import density as dn
from blipframe import lightcone as lc
from blipframe import pulsetrain as pt
from blipframe import trajectory as tr
from blipframe.errors import NumericalError

PIECEWISE = tr.PiecewiseConstantVelocity((1.0, 2.0), (0.2, 0.5, 0.8))
FAMILIES = {
    "constant": tr.ConstantVelocity(0.6),
    "piecewise": PIECEWISE,
    "rindler": tr.UniformProperAcceleration(1.0),
    "sampled": tr.Sampled((0.0, 1.0, 3.0, 4.0), (0.0, 0.3, 1.5, 2.2)),
}


def _timed(func):
    start = time.perf_counter()
    ok, detail = func()
    return ok, detail, time.perf_counter() - start


def inertial_reduction():
    worst = 0.0
    for beta in (-0.9, -0.6, -0.5, -0.3, -0.1, 0.1, 0.3, 0.5, 0.6, 0.9):
        for s in (1, -1):
            fm = lc.FrameMap(tr.ConstantVelocity(beta, extend_past=True), s)
            for chi in np.linspace(-10.0, 10.0, 21):
                dev = abs(lc.general_map(fm, chi) - lc.inertial_map(chi, beta, s)) / max(1.0, abs(chi))
                worst = max(worst, dev)
    return worst <= 1e-9, f"max |general - inertial| / max(1,|chi|) = {worst:.2e} (tol 1e-9)"


def oracle_equivalence():
    ok, parts = True, []
    for name, traj in (("rindler a=1", tr.UniformProperAcceleration(1.0)), ("piecewise", PIECEWISE)):
        fm = lc.FrameMap(traj)
        try:
            exact = lc.general_map(fm, -5.0)
            errs = [abs(lc.discretized_map(fm, -5.0, n) - exact) for n in (1_000, 10_000, 100_000)]
        except NumericalError as exc:
            ok = False
            parts.append(f"{name}: {type(exc).__name__} ({exc})")
            continue
        rel = errs[-1] / abs(exact)
        # orders are compared at 1e-6 resolution: the piecewise case is first order up to float noise
        orders = [round(math.log10(e1 / e2), 6) for e1, e2 in zip(errs, errs[1:])]
        good = rel <= 1e-4 and min(orders) >= 1.0
        ok &= good
        parts.append(f"{name}: rel err {rel:.2e}, orders {orders}")
    return ok, "; ".join(parts)


def round_trip():
    rng = np.random.default_rng(2024)
    worst = {}
    for name, traj in FAMILIES.items():
        fm = lc.FrameMap(traj)
        span = traj.t_max if math.isfinite(traj.t_max) else 5.0
        chis = traj.light_offset(rng.uniform(0.0, span, 100), 1)
        worst[name] = max(abs(lc.inverse_map(fm, lc.general_map(fm, c)) - c) for c in chis)
    text = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    return max(worst.values()) <= 1e-8, f"max |inverse(map(chi)) - chi|: {text} (tol 1e-8)"


def doppler_identity():
    beta = np.linspace(-0.99, 0.99, 199)
    dev = max(float(np.max(np.abs(bf.e45_factor(beta, s) ** 2 * lc.kappa(beta, s) - 1))) for s in (1, -1))
    return dev <= 1e-12, f"max |e45^2 kappa - 1| = {dev:.2e} (tol 1e-12)"


def _packet(params, lo, hi, n):
    centre, width, k, pol = params
    chi = np.linspace(lo, hi, n)
    amp = np.exp(-0.5 * ((chi - centre) / width) ** 2 + 1j * k * chi)
    return bf.WavePacket(bf.BlipMode(1, pol), chi, amp).normalized()


def norm_conservation():
    rng = np.random.default_rng(5)
    cases = {"beta=0.6": (tr.ConstantVelocity(0.6), -5.0), "rindler a=1": (tr.UniformProperAcceleration(1.0), -0.9)}
    ok, parts = True, []
    for name, (traj, lo) in cases.items():
        fm = lc.FrameMap(traj)
        worst, not_decreasing, region = 0.0, 0, 0.0
        for _ in range(20):
            span = -lo
            params = (lo + rng.uniform(0.3, 0.7) * span, rng.uniform(0.04, 0.1) * span,
                      rng.uniform(-20, 20) / span, rng.choice(bf.POLARIZATIONS))
            wp = _packet(params, lo, 0.0, 10_000)
            out = bf.transform_wavepacket(fm, wp)
            fine = bf.transform_wavepacket(fm, _packet(params, lo, 0.0, 20_000))
            errs = [abs(out.norm2() - 1.0), abs(fine.norm2() - 1.0)]
            worst = max(worst, errs[0])
            # below the roundoff floor there is nothing left to decrease
            if not (errs[1] < errs[0] or max(errs) <= 1e-13):
                not_decreasing += 1
            a, b = np.sort(rng.uniform(lo, 0.0, 2))
            moved = bf.number_in_region(out, lc.general_map(fm, a), lc.general_map(fm, b))
            region = max(region, abs(moved - bf.number_in_region(wp, a, b)))
        ok &= worst <= 1e-6 and not_decreasing == 0 and region <= 1e-6
        parts.append(f"{name}: max |norm^2-1| {worst:.1e}, non-decreasing {not_decreasing}/20, "
                     f"region dev {region:.1e}")
    return ok, "; ".join(parts) + " (tol 1e-6)"


def common_vacuum():
    outs = {name: bf.transform_state(lc.FrameMap(traj), bf.Vacuum()) for name, traj in FAMILIES.items()}
    ok = all(type(o) is bf.Vacuum and o == bf.Vacuum() for o in outs.values())
    return ok, "transform_state(Vacuum) is Vacuum for " + ", ".join(outs)


def doppler_scenario():
    beta = 0.6
    recs = pt.run_scenario(pt.ScenarioConfig(tr.ConstantVelocity(beta), 1.0, 20))
    gaps = pt.arrival_intervals(recs)
    dev = float(np.max(np.abs(gaps - 2.0)))
    # pulse geometry: pulse n meets x = beta t at t = n / (1 - beta); Bob's clock there reads t / gamma
    proper = np.array([r.n / (1 - beta) * math.sqrt(1 - beta**2) for r in recs])
    geo = float(np.max(np.abs(np.array([r.t_B_arrive for r in recs]) - proper)))
    return dev <= 1e-9 and geo <= 1e-9, f"max |dt_B - 2| = {dev:.1e}, max |t_B - geometric| = {geo:.1e} (tol 1e-9)"


def density_shape():
    flat = dn.density_profile(lc.FrameMap(tr.ConstantVelocity(0.6)), -10.0, 0.0, 101)
    var = float(np.var(flat.ratio))
    level = float(np.max(np.abs(flat.ratio - 1 / lc.kappa(0.6, 1))))
    curved = dn.density_profile(lc.FrameMap(tr.UniformProperAcceleration(1.0)), -0.95, 0.0, 11)
    monotone = bool(np.all(np.diff(curved.ratio) > 0))
    ok = var <= 1e-20 and level <= 1e-15 and monotone
    return ok, f"inertial variance {var:.1e} at 1/kappa (dev {level:.1e}); rindler strictly monotone: {monotone}"


CRITERIA = [
    (1, "inertial reduction", inertial_reduction, 1.0),
    (2, "discretised oracle equivalence", oracle_equivalence, 10.0),
    (3, "round trip", round_trip, 5.0),
    (4, "local factor / Jacobian identity", doppler_identity, None),
    (5, "norm and number conservation", norm_conservation, None),
    (6, "common vacuum", common_vacuum, None),
    (7, "Doppler pulse scenario", doppler_scenario, 1.0),
    (8, "density homogeneity", density_shape, None),
]


def evaluate(number, title, func, budget):
    try:
        ok, detail, elapsed = _timed(func)
    except Exception as exc:  # a crash is a failed criterion, reported like any other
        ok, detail, elapsed = False, f"{type(exc).__name__}: {exc}", float("nan")
    if budget is not None and not elapsed < budget:
        ok = False
        detail += f"; runtime {elapsed:.2f} s exceeds {budget:g} s"
    line = f"{'PASS' if ok else 'FAIL'}  [{number}] {title}: {detail} ({elapsed:.2f} s)"
    return ok, line


@pytest.mark.parametrize("number, title, func, budget", CRITERIA, ids=[f"criterion{c[0]}" for c in CRITERIA])
def test_criterion(number, title, func, budget, capsys):
    ok, line = evaluate(number, title, func, budget)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
