"""Time-like observer worldlines in the stationary frame (units with c = 1).

Every family passes through the shared origin, ``x(0) = 0``, and is
vectorised: ``position`` and ``velocity`` accept scalars or arrays.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NoIntersection, ToleranceNotMet

# light lines that would only meet the worldline beyond this time are treated as missing
_T_CAP = 1e15
_MAX_REFINE = 200


def check_beta(beta):
    beta = float(beta)
    if not abs(beta) < 1.0:
        raise ValueError(f"velocity must satisfy |beta| < 1, got {beta!r}")
    return beta


def check_direction(s):
    if s not in (1, -1):
        raise ValueError(f"propagation direction must be +1 or -1, got {s!r}")
    return int(s)


class Event(NamedTuple):
    t: float
    x: float


class Trajectory:
    """Common behaviour; subclasses supply ``_position`` and ``_velocity``."""

    t_min = 0.0
    t_max = math.inf

    def _check(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t_min) or np.any(t > self.t_max) or np.any(np.isnan(t)):
            bad = t[(t < self.t_min) | (t > self.t_max) | np.isnan(t)].flat[0]
            raise DomainError(f"t={bad!r} outside trajectory domain [{self.t_min}, {self.t_max}]")
        return t

    def position(self, t):
        t = self._check(t)
        return self._position(t)

    def velocity(self, t):
        t = self._check(t)
        return self._velocity(t)

    def light_offset(self, t, s):
        """Natural coordinate ``x(t) - s t`` of the light line through the worldline at ``t``."""
        return self._offset(self._check(t), s)

    def _offset(self, t, s):
        return self._position(t) - s * t

    def kinks(self):
        """Times at which the velocity jumps."""
        return ()


@dataclass(frozen=True)
class ConstantVelocity(Trajectory):
    """Inertial observer ``x = beta t``.

    Like every family it is defined for ``t >= 0``. With ``extend_past`` the
    straight line continues to negative times, so every light line in both
    directions meets it and the inertial map holds for all ``chi``.
    """

    beta: float
    extend_past: bool = False

    def __post_init__(self):
        object.__setattr__(self, "beta", check_beta(self.beta))

    @property
    def t_min(self):
        return -math.inf if self.extend_past else 0.0

    def _position(self, t):
        return self.beta * t

    def _velocity(self, t):
        return np.full_like(t, self.beta)


def _check_no_return(times, positions, final_beta):
    """Reject worldlines that cross back through x = 0 after leaving it."""
    side = 0.0
    for t, x in zip(times, positions):
        if side == 0.0:
            side = math.copysign(1.0, x) if x != 0.0 else 0.0
        elif x == 0.0 or math.copysign(1.0, x) != side:
            raise ValueError(f"trajectory returns to x = 0 at or before t = {t!r}")
    if side != 0.0 and final_beta * side < 0:
        raise ValueError("trajectory eventually crosses back through x = 0")


def _warn_sign_change(velocities):
    v = np.asarray(velocities)
    if np.any(v > 0) and np.any(v < 0):
        warnings.warn(
            "trajectory velocity changes sign; the light-line map has only been "
            "derived for observers receding at positive speed",
            stacklevel=3,
        )


@dataclass(frozen=True)
class PiecewiseConstantVelocity(Trajectory):
    """Straight segments; ``betas[k]`` applies on ``[breakpoints[k-1], breakpoints[k])``."""

    breakpoints: tuple
    betas: tuple
    _knots: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        bps = tuple(float(b) for b in self.breakpoints)
        betas = tuple(check_beta(b) for b in self.betas)
        if len(betas) != len(bps) + 1:
            raise ValueError("need exactly one more beta than breakpoints")
        if any(b <= 0 for b in bps) or any(b2 <= b1 for b1, b2 in zip(bps, bps[1:])):
            raise ValueError("breakpoints must be positive and strictly increasing")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "betas", betas)
        starts = np.array((0.0, *bps))
        knots = np.concatenate([[0.0], np.cumsum(np.diff(starts) * np.array(betas[:-1]))])
        object.__setattr__(self, "_knots", knots)
        _check_no_return(bps, knots[1:], betas[-1])
        _warn_sign_change(betas)

    def _segment(self, t):
        return np.searchsorted(self.breakpoints, t, side="right")

    def _position(self, t):
        k = self._segment(t)
        starts = np.array((0.0, *self.breakpoints))
        return self._knots[k] + np.array(self.betas)[k] * (t - starts[k])

    def _velocity(self, t):
        return np.array(self.betas)[self._segment(t)]

    def kinks(self):
        return self.breakpoints


@dataclass(frozen=True)
class UniformProperAcceleration(Trajectory):
    """Hyperbolic worldline ``x = (sqrt(1 + (a t)^2) - 1) / a``, starting at rest.

    Light lines with ``s = +1`` and ``chi <= -1/a`` lie beyond the horizon and
    never reach the observer.
    """

    a: float

    def __post_init__(self):
        a = float(self.a)
        if not (a > 0 and math.isfinite(a)):
            raise ValueError(f"proper acceleration must be positive and finite, got {a!r}")
        object.__setattr__(self, "a", a)

    def _position(self, t):
        T = self.a * t
        return T * T / (np.sqrt(1.0 + T * T) + 1.0) / self.a

    def _velocity(self, t):
        T = self.a * t
        return T / np.sqrt(1.0 + T * T)

    def _offset(self, t, s):
        if s == -1:
            return self._position(t) + t
        T = self.a * t
        root = np.sqrt(1.0 + T * T)
        with np.errstate(divide="ignore", invalid="ignore"):
            far = (1.0 / (root + T) - 1.0) / self.a
        return np.where(T < 1.0, self._position(t) - t, far)

    @property
    def horizon(self):
        return -1.0 / self.a


@dataclass(frozen=True)
class Sampled(Trajectory):
    """Linear interpolation through ``(t_i, x_i)`` samples starting at the origin."""

    t: tuple
    x: tuple

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        x = np.asarray(self.x, dtype=float)
        if t.ndim != 1 or t.shape != x.shape or t.size < 2:
            raise ValueError("sampled trajectory needs matching 1-d t and x with at least 2 points")
        if t[0] != 0.0 or x[0] != 0.0:
            raise ValueError("sampled trajectory must start at (t, x) = (0, 0)")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        slopes = np.diff(x) / np.diff(t)
        if np.any(np.abs(slopes) >= 1.0):
            k = int(np.argmax(np.abs(slopes) >= 1.0))
            raise ValueError(f"segment {k} has |dx/dt| = {abs(slopes[k])!r} >= c")
        _check_no_return(t[1:], x[1:], 0.0)
        _warn_sign_change(slopes)
        object.__setattr__(self, "t", tuple(t))
        object.__setattr__(self, "x", tuple(x))

    @property
    def t_max(self):
        return self.t[-1]

    def _position(self, t):
        return np.interp(t, self.t, self.x)

    def _velocity(self, t):
        ts = np.asarray(self.t)
        slopes = np.diff(self.x) / np.diff(ts)
        k = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(slopes) - 1)
        return slopes[k]

    def kinks(self):
        return self.t[1:-1]

    @classmethod
    def from_csv(cls, path, time_scale=1.0):
        """Read a ``t,x`` CSV; times are multiplied by ``time_scale`` (the display c)."""
        data = np.genfromtxt(path, delimiter=",", names=True, comments="#")
        if data.dtype.names != ("t", "x"):
            raise ValueError(f"{path}: expected header 't,x', got {data.dtype.names}")
        return cls(tuple(np.atleast_1d(data["t"]) * time_scale), tuple(np.atleast_1d(data["x"])))


def intersection_times(traj, chi, s):
    """Times at which light lines ``x = chi + s t`` cross the worldline.

    Vectorised bracketing and bisection. ``x(t) - chi - s t`` is strictly
    monotone (its slope ``beta - s`` has the sign of ``-s``), so it changes
    sign at most once. The bracket grows by doubling from ``|chi|``, a few
    bisection steps tighten it, and Illinois false-position steps finish the
    root to a few ulps.
    """
    s = check_direction(s)
    chi = np.asarray(chi, dtype=float)
    shape = chi.shape
    chi = chi.ravel()
    g0 = -chi
    sign0 = np.sign(g0)
    direction = sign0 * s
    out = np.zeros_like(chi)

    def fail(mask, why):
        bad = float(chi[mask][0])
        raise NoIntersection(f"light line chi={bad!r}, s={s:+d} {why}", chi=bad, s=s)

    active = sign0 != 0
    if np.any(active & (direction < 0) & (traj.t_min >= 0)):
        fail(active & (direction < 0), "would meet the observer before t = 0")

    idx = np.flatnonzero(active)
    d = direction[idx]
    c = chi[idx]
    sg = sign0[idx]
    limit = np.where(d > 0, traj.t_max, -traj.t_min) if idx.size else np.zeros(0)

    def g(t):
        return traj._offset(t, s) - c

    lo = np.zeros_like(c)
    reach = np.maximum(np.abs(c), np.finfo(float).tiny)
    hi = d * np.minimum(reach, limit)
    found = g(hi) * sg <= 0
    while not np.all(found):
        open_ = ~found
        at_edge = open_ & ((np.abs(hi) >= limit) | (np.abs(hi) >= _T_CAP * np.maximum(1.0, np.abs(c))))
        if np.any(at_edge):
            where = "within the trajectory's domain" if np.all(np.isfinite(limit[at_edge])) else "at any time"
            mask = np.zeros_like(chi, dtype=bool)
            mask[idx[at_edge]] = True
            fail(mask, f"never meets the observer {where}")
        lo = np.where(open_, hi, lo)
        hi = np.where(open_, d * np.minimum(2.0 * np.abs(hi), limit), hi)
        found = found | (g(hi) * sg <= 0)

    # coarse bisection, then Illinois false-position steps inside the bracket
    for _ in range(12):
        mid = 0.5 * (lo + hi)
        same_side = g(mid) * sg > 0
        lo = np.where(same_side, mid, lo)
        hi = np.where(same_side, hi, mid)

    # only unconverged crossings are carried from one step to the next
    glo, ghi = g(lo), g(hi)
    t = hi.copy()
    last = np.zeros_like(lo)  # +1: lo moved last time, -1: hi moved
    act = np.flatnonzero(ghi != 0)
    for _ in range(_MAX_REFINE):
        if act.size == 0:
            break
        a_lo, a_hi, a_glo, a_ghi, a_sg = lo[act], hi[act], glo[act], ghi[act], sg[act]
        with np.errstate(divide="ignore", invalid="ignore"):
            trial = a_hi - a_ghi * (a_hi - a_lo) / (a_ghi - a_glo)
        inside = (trial > np.minimum(a_lo, a_hi)) & (trial < np.maximum(a_lo, a_hi))
        trial = np.where(inside, trial, 0.5 * (a_lo + a_hi))
        gt = traj._offset(trial, s) - c[act]
        move_lo = gt * a_sg > 0
        move_hi = ~move_lo
        a_last = last[act]
        ghi[act] = np.where(move_lo & (a_last > 0), 0.5 * a_ghi, a_ghi)
        glo[act] = np.where(move_hi & (a_last < 0), 0.5 * a_glo, a_glo)
        lo[act] = np.where(move_lo, trial, a_lo)
        glo[act] = np.where(move_lo, gt, glo[act])
        hi[act] = np.where(move_hi, trial, a_hi)
        ghi[act] = np.where(move_hi, gt, ghi[act])
        last[act] = np.where(move_lo, 1.0, -1.0)
        step = np.abs(trial - t[act])
        t[act] = trial
        width = np.abs(hi[act] - lo[act])
        scale = 4 * np.finfo(float).eps * np.maximum(np.abs(trial), np.finfo(float).tiny)
        act = act[~((gt == 0) | (step <= scale) | (width <= scale))]
    if act.size:
        raise ToleranceNotMet("light-line crossing did not converge")

    out[idx] = t
    return out.reshape(shape)


def position_at(traj, t):
    return float(traj.position(t))


def velocity_at(traj, t):
    return float(traj.velocity(t))


def light_intersection(traj, chi, s):
    """Event where the light line with natural coordinate ``chi`` meets ``traj``."""
    t = float(intersection_times(traj, chi, s))
    return Event(t, float(traj.position(t)))


def beta_at_chi(traj, chi, s):
    """Observer velocity at the crossing with light line ``chi`` (vectorised)."""
    t = intersection_times(traj, chi, s)
    beta = traj.velocity(t)
    return float(beta) if np.ndim(beta) == 0 else beta
