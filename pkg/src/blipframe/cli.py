"""Command-line front end.

Exit codes: 0 success, 1 an invariant failed in ``verify``, 2 invalid
configuration or arguments, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import blipfield as bf
from . import density as dn
from . import lightcone as lc
from . import pulsetrain as pt
from . import verify as vf
from .config import ConfigError, load
from .errors import NumericalError

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _fmt(x):
    return f"{x:.17g}" if isinstance(x, float) else str(x)


def _render(command, cfg, header, rows, extra=None):
    """Serialise a table with the resolved config echoed in front of it."""
    echo = json.dumps(cfg.resolved, sort_keys=True, separators=(",", ":"))
    if cfg.format == "json":
        doc = {"command": command, "config": cfg.resolved,
               "records": [dict(zip(header, row)) for row in rows]}
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# blipframe {command}\n# config: {echo}\n")
    for key, value in sorted((extra or {}).items()):
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text, cfg):
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _numeric(op, func, *args):
    try:
        return func(*args)
    except NumericalError as exc:
        raise _Fail(EXIT_NUMERIC, f"{op}: {type(exc).__name__}: {exc}") from None


def cmd_map(cfg, args):
    fm = lc.FrameMap(cfg.trajectory, args.s, cfg.quad)
    chi_B = _numeric("general_map", lc.general_map, fm, args.chi_A)
    jac = _numeric("jacobian", lc.jacobian, fm, args.chi_A)
    ratio = 1.0 / jac
    header = ["chi_A", "s", "chi_B", "jacobian", "density_ratio"]
    return _render("map", cfg, header, [[float(args.chi_A), args.s, chi_B, jac, ratio]])


def cmd_invert(cfg, args):
    fm = lc.FrameMap(cfg.trajectory, args.s, cfg.quad)
    chi_A = _numeric("inverse_map", lc.inverse_map, fm, args.chi_B)
    return _render("invert", cfg, ["chi_B", "s", "chi_A"], [[float(args.chi_B), args.s, chi_A]])


def cmd_simulate(cfg, args):
    # dt is given in display time units; internally c = 1
    scenario = pt.ScenarioConfig(cfg.trajectory, args.dt * cfg.c, args.count, 1, cfg.quad)
    records = _numeric("run_scenario", pt.run_scenario, scenario)
    c = cfg.c
    if args.spacetime:
        t_B, mu_B = pt.bob_frame_trajectory(scenario, records)
        rows = [[f, series, n, t / c, x] for f, series, n, t, x in pt.spacetime_rows(records, t_B, mu_B)]
        return _render("simulate", cfg, ["frame", "series", "n", "t", "x"], rows)
    rows = [[r.n, r.t_A_emit / c, r.t_A_arrive / c, r.x_A_arrive, r.chi_A, r.chi_B, r.t_B_arrive / c]
            for r in records]
    return _render("simulate", cfg, list(pt.EVENT_FIELDS), rows)


def cmd_transform_state(cfg, args):
    try:
        state = bf.state_from_dict(json.loads(Path(args.state).read_text(encoding="utf-8")))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise _Fail(EXIT_CONFIG, f"invalid state file {args.state}: {exc}") from None
    s = state.packet.mode.s if hasattr(state, "packet") else args.s
    fm = lc.FrameMap(cfg.trajectory, s, cfg.quad)
    out = _numeric("transform_state", bf.transform_state, fm, state)
    if isinstance(state, bf.Vacuum):
        report = {"kind": "vacuum"}
    else:
        report = {"kind": state.kind, "norm2_in": state.packet.norm2(), "norm2_out": out.packet.norm2()}
    print(f"# norm report: {json.dumps(report, sort_keys=True)}", file=sys.stderr)
    if cfg.format == "csv":
        buf = io.StringIO()
        buf.write(f"# blipframe transform-state\n# kind: {out.kind}\n")
        buf.write(f"# config: {json.dumps(cfg.resolved, sort_keys=True, separators=(',', ':'))}\n")
        if isinstance(out, bf.Vacuum):
            buf.write("chi,re,im\n")
        else:
            out.packet.write_csv(buf)
        return buf.getvalue()
    return json.dumps(bf.state_to_dict(out), indent=2, sort_keys=True) + "\n"


def cmd_density(cfg, args):
    fm = lc.FrameMap(cfg.trajectory, args.s, cfg.quad)
    try:
        profile = _numeric("density_profile", dn.density_profile, fm, args.lo, args.hi, args.samples)
    except ValueError as exc:
        raise _Fail(EXIT_CONFIG, f"density_profile: {exc}") from None
    rows = [[float(c), float(r)] for c, r in zip(profile.chi, profile.ratio)]
    return _render("density", cfg, ["chi_A", "ratio"], rows)


def cmd_verify(cfg, args):
    results = _numeric("verify", vf.run_checks, cfg.trajectory, cfg.quad, args.seed)
    rows = [[r.name, float(r.deviation), float(r.tolerance), "PASS" if r.passed else "FAIL"] for r in results]
    text = _render("verify", cfg, ["invariant", "deviation", "tolerance", "status"], rows)
    return text, all(r.passed for r in results)


def build_parser():
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON run configuration (default: $BLIPFRAME_CONFIG or built-in)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--tol", type=float, help="override the absolute quadrature tolerance")
    common.add_argument("--seed", type=int, help="seed for randomised sampling in verify")

    parser = argparse.ArgumentParser(prog="blipframe", parents=[common],
                                     description="Light-line frame maps for moving observers.")
    sub = parser.add_subparsers(dest="command", required=True)

    def direction(p):
        p.add_argument("--s", type=int, choices=[1, -1], default=1, help="propagation direction")

    p = sub.add_parser("map", parents=[common], help="map chi_A to chi_B")
    p.add_argument("chi_A", type=float)
    direction(p)
    p = sub.add_parser("invert", parents=[common], help="map chi_B back to chi_A")
    p.add_argument("chi_B", type=float)
    direction(p)
    p = sub.add_parser("simulate", parents=[common], help="run the pulse-train scenario")
    p.add_argument("--dt", type=float, required=True, help="emission interval (display time units)")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--spacetime", action="store_true", help="emit long-format spacetime-diagram rows instead")
    p = sub.add_parser("transform-state", parents=[common], help="transform a field state file")
    p.add_argument("state")
    direction(p)
    p = sub.add_parser("density", parents=[common], help="worldline density ratio profile")
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--samples", type=int, required=True)
    direction(p)
    sub.add_parser("verify", parents=[common], help="run the invariant suite")
    return parser


COMMANDS = {
    "map": cmd_map,
    "invert": cmd_invert,
    "simulate": cmd_simulate,
    "transform-state": cmd_transform_state,
    "density": cmd_density,
    "verify": cmd_verify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.seed = getattr(args, "seed", 0)
    try:
        cfg = load(getattr(args, "config", None), fmt=getattr(args, "format", None),
                   out=getattr(args, "out", None), tol=getattr(args, "tol", None))
        if args.command == "simulate" and not (args.dt > 0 and args.count >= 1):
            raise ConfigError("simulate needs --dt > 0 and --count >= 1")
        result = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"blipframe: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _Fail as exc:
        print(f"blipframe: {exc}", file=sys.stderr)
        return exc.code

    if args.command == "verify":
        text, ok = result
        _emit(text, cfg)
        return EXIT_OK if ok else EXIT_VERIFY
    _emit(result, cfg)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
