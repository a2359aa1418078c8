"""Maps between the stationary and the moving observer's natural coordinates.

A light line is labelled by ``chi = x - s t`` (c = 1). For an inertial
observer with velocity ``beta`` the label rescales by the Doppler factor
``kappa = gamma (1 + s beta)``. For a general worldline the factor is
evaluated where each light line crosses the observer and integrated from the
shared origin outwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import trajectory as tr
from .errors import NoIntersection, OutOfRange, ToleranceNotMet
from .quadrature import QuadratureConfig, gk21_panels, integrate

KAPPA_CAP = 1e12
_CHUNK = 100_000


def gamma_of(beta):
    beta = np.asarray(beta, dtype=float)
    if np.any(np.abs(beta) >= 1):
        raise ValueError("gamma requires |beta| < 1")
    g = 1.0 / np.sqrt((1.0 - beta) * (1.0 + beta))
    return float(g) if g.ndim == 0 else g


def kappa(beta, s):
    """Doppler factor ``gamma (1 + s beta) = sqrt((1 + s beta) / (1 - s beta))``."""
    s = tr.check_direction(s)
    beta = np.asarray(beta, dtype=float)
    if np.any(np.abs(beta) >= 1):
        raise ValueError("kappa requires |beta| < 1")
    k = np.sqrt((1.0 + s * beta) / (1.0 - s * beta))
    return float(k) if k.ndim == 0 else k


def inertial_map(chi_A, beta, s):
    return kappa(beta, s) * chi_A


@dataclass(frozen=True)
class FrameMap:
    """Light-line map induced by ``traj`` for light moving in direction ``s``."""

    traj: tr.Trajectory
    s: int = 1
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        object.__setattr__(self, "s", tr.check_direction(self.s))

    @cached_property
    def kink_images(self):
        """Natural coordinates of the light lines through velocity breakpoints."""
        times = np.asarray(self.traj.kinks(), dtype=float)
        if times.size == 0:
            return ()
        return tuple(sorted(float(c) for c in self.traj.light_offset(times, self.s)))

    def density(self, chi):
        """``d chi_B / d chi_A`` at one or many light lines."""
        beta = tr.beta_at_chi(self.traj, chi, self.s)
        # |beta| rounding to 1 is the same failure as an overflowing kappa
        with np.errstate(divide="ignore"):
            k = np.sqrt((1.0 + self.s * beta) / (1.0 - self.s * beta)) if np.all(np.abs(beta) < 1) else math.inf
        if np.any(np.asarray(k) > KAPPA_CAP) or np.any(np.asarray(k) < 1.0 / KAPPA_CAP):
            raise ToleranceNotMet(
                f"Doppler factor outside [1/{KAPPA_CAP:g}, {KAPPA_CAP:g}]; the light line is too close to a horizon"
            )
        return float(k) if np.ndim(k) == 0 else k

    def integral(self, lo, hi):
        """``int_lo^hi kappa dchi`` for two points inside the map's domain."""
        if lo == hi:
            return 0.0
        value, _ = integrate(self.density, lo, hi, self.quad, self.kink_images)
        return value


def general_map(fm, chi_A):
    chi_A = float(chi_A)
    if chi_A == 0.0:
        return 0.0
    # endpoints are never quadrature nodes; probe the far end explicitly
    fm.density(chi_A)
    return fm.integral(0.0, chi_A)


def jacobian(fm, chi_A):
    return float(fm.density(float(chi_A)))


def map_points(fm, chis):
    """Vectorised ``general_map`` over many points.

    Panels between consecutive sorted points (plus the origin and the kink
    images) get one batched 21-point rule; only panels whose estimate misses
    their share of the tolerance are refined adaptively. The images are then
    accumulated outwards from the origin.
    """
    chis = np.asarray(chis, dtype=float)
    if chis.size == 0:
        return chis.copy()
    fm.density(np.array([chis.min(), chis.max()]))
    lo_all, hi_all = min(chis.min(), 0.0), max(chis.max(), 0.0)
    kinks = [k for k in fm.kink_images if lo_all < k < hi_all]
    knots = np.unique(np.concatenate([chis.ravel(), [0.0], kinks]))
    lefts, rights = knots[:-1], knots[1:]
    values = np.empty(lefts.size)
    errors = np.empty(lefts.size)
    for start in range(0, lefts.size, _CHUNK // 21 + 1):
        sl = slice(start, start + _CHUNK // 21 + 1)
        values[sl], errors[sl] = gk21_panels(fm.density, lefts[sl], rights[sl])
    span = hi_all - lo_all
    share = np.maximum(fm.quad.abs_tol * (rights - lefts) / span, fm.quad.rel_tol * np.abs(values))
    for i in np.flatnonzero(errors > share):
        cfg = QuadratureConfig(share[i], fm.quad.rel_tol, fm.quad.max_subdivisions)
        values[i], _ = integrate(fm.density, lefts[i], rights[i], cfg, fm.kink_images)

    images = np.empty(knots.size)
    zero = int(np.searchsorted(knots, 0.0))
    images[zero] = 0.0
    images[zero + 1:] = np.cumsum(values[zero:])
    images[:zero] = -np.cumsum(values[:zero][::-1])[::-1]
    return images[np.searchsorted(knots, chis)]


def inverse_map(fm, chi_B):
    """Natural coordinate ``chi_A`` whose image is ``chi_B``.

    Brackets the root from the inertial guess ``chi_B / kappa(0)`` and then
    runs Newton steps safeguarded by bisection. Each evaluation integrates
    only from the previous iterate, so the cost per step is a short panel.
    """
    chi_B = float(chi_B)
    if chi_B == 0.0:
        return 0.0
    tol = fm.quad.abs_tol
    sgn = math.copysign(1.0, chi_B)

    near, g_near = 0.0, 0.0
    far, g_far = None, None  # g_far stays None when `far` is outside the domain
    ref, g_ref = 0.0, 0.0
    x = chi_B / jacobian(fm, 0.0)
    while True:
        try:
            g = g_ref + fm.integral(ref, x)
        except NoIntersection:
            far = x
            break
        ref, g_ref = x, g
        if abs(g - chi_B) <= tol:
            return x
        if (g - chi_B) * sgn > 0:
            far, g_far = x, g
            break
        near, g_near = x, g
        if abs(x) > 1e15:
            raise OutOfRange(f"chi_B={chi_B!r} is not reached by the frame map")
        x *= 2.0

    for _ in range(400):
        step_from, g_from = (ref, g_ref)
        try:
            slope = jacobian(fm, step_from)
            x = step_from + (chi_B - g_from) / slope
        except NoIntersection:
            x = math.nan
        lo, hi = sorted((near, far))
        if not lo < x < hi:
            x = 0.5 * (near + far)
        if x in (near, far):
            break
        try:
            g = g_ref + fm.integral(ref, x)
        except NoIntersection:
            far, g_far = x, None
            continue
        ref, g_ref = x, g
        if abs(g - chi_B) <= tol:
            return x
        if (g - chi_B) * sgn < 0:
            near, g_near = x, g
        else:
            far, g_far = x, g

    if g_far is None:
        raise OutOfRange(f"chi_B={chi_B!r} lies beyond the image of the frame map")
    raise ToleranceNotMet(f"inverse map stalled at chi_A={near!r} (residual {abs(g_near - chi_B):.3e})")


def discretized_map(fm, chi_A, N):
    """Pulse-train construction: ``N`` equal steps, Doppler factor taken at each step's far end."""
    N = int(N)
    if N < 1:
        raise ValueError("N must be >= 1")
    chi_A = float(chi_A)
    if chi_A == 0.0:
        return 0.0
    step = chi_A / N
    parts = []
    for start in range(1, N + 1, _CHUNK):
        n = np.arange(start, min(start + _CHUNK, N + 1), dtype=float)
        parts.append(fm.density(n * step) * step)
    return math.fsum(np.concatenate(parts))
