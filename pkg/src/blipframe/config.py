"""Run configuration: JSON schema, defaults, and trajectory construction."""

from __future__ import annotations

import copy
import json
import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from . import trajectory as tr
from .quadrature import QuadratureConfig

ENV_CONFIG = "BLIPFRAME_CONFIG"

_NUM = {"type": "number"}
_NUMS = {"type": "array", "items": _NUM}


def _kind(name, props, required):
    return {
        "type": "object",
        "additionalProperties": False,
        "properties": {"kind": {"const": name}, **props},
        "required": ["kind", *required],
    }


SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "trajectory": {
            "oneOf": [
                _kind("constant", {"beta": _NUM, "extend_past": {"type": "boolean"}}, ["beta"]),
                _kind("piecewise", {"breakpoints": _NUMS, "betas": _NUMS}, ["breakpoints", "betas"]),
                _kind("rindler", {"a": _NUM}, ["a"]),
                {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "kind": {"const": "sampled"},
                        "points": {"type": "array", "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}},
                        "csv": {"type": "string"},
                    },
                    "required": ["kind"],
                    "oneOf": [{"required": ["points"]}, {"required": ["csv"]}],
                },
            ]
        },
        "quadrature": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "abs_tol": {"type": "number", "exclusiveMinimum": 0},
                "rel_tol": {"type": "number", "exclusiveMinimum": 0},
                "max_subdivisions": {"type": "integer", "minimum": 1},
            },
        },
        "format": {"enum": ["csv", "json"]},
        "out": {"type": ["string", "null"]},
        "c": {"type": "number", "exclusiveMinimum": 0},
    },
}

DEFAULTS = {
    "trajectory": {"kind": "constant", "beta": 0.6},
    "quadrature": {"abs_tol": 1e-10, "rel_tol": 1e-9, "max_subdivisions": 1_000_000},
    "format": "csv",
    "out": None,
    "c": 1.0,
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Validated settings. ``resolved`` is the full dict echoed into outputs."""

    resolved: dict
    trajectory: tr.Trajectory
    quad: QuadratureConfig

    @property
    def format(self):
        return self.resolved["format"]

    @property
    def out(self):
        return self.resolved["out"]

    @property
    def c(self):
        return self.resolved["c"]


def build_trajectory(record, c=1.0, base_dir=None):
    """Construct a trajectory from its config record; times are scaled by ``c``."""
    kind = record["kind"]
    if kind == "constant":
        return tr.ConstantVelocity(record["beta"], record.get("extend_past", False))
    if kind == "piecewise":
        return tr.PiecewiseConstantVelocity(tuple(b * c for b in record["breakpoints"]), tuple(record["betas"]))
    if kind == "rindler":
        return tr.UniformProperAcceleration(record["a"])
    if kind == "sampled":
        if "csv" in record:
            path = Path(record["csv"])
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            return tr.Sampled.from_csv(path, time_scale=c)
        pts = record["points"]
        return tr.Sampled(tuple(p[0] * c for p in pts), tuple(p[1] for p in pts))
    raise ConfigError(f"unknown trajectory kind {kind!r}")


def resolve(raw=None, *, fmt=None, out=None, tol=None, base_dir=None):
    """Validate ``raw`` against the schema, merge defaults and overrides, build objects."""
    raw = {} if raw is None else raw
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None

    resolved = copy.deepcopy(DEFAULTS)
    for key, value in raw.items():
        if key == "quadrature":
            resolved["quadrature"].update(value)
        else:
            resolved[key] = copy.deepcopy(value)
    if fmt is not None:
        resolved["format"] = fmt
    if out is not None:
        resolved["out"] = out
    if tol is not None:
        resolved["quadrature"]["abs_tol"] = tol

    try:
        quad = QuadratureConfig(**resolved["quadrature"])
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            traj = build_trajectory(resolved["trajectory"], resolved["c"], base_dir)
    except (ValueError, OSError) as exc:
        raise ConfigError(f"invalid config: {exc}") from None
    for w in caught:
        warnings.warn(str(w.message), w.category, stacklevel=2)
    return RunConfig(resolved, traj, quad)


def load(path=None, **overrides):
    """Load a config file (or ``$BLIPFRAME_CONFIG``, or defaults when neither is set)."""
    path = path or os.environ.get(ENV_CONFIG)
    if not path:
        return resolve(None, **overrides)
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return resolve(raw, base_dir=Path(path).parent, **overrides)
