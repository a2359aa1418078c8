"""Discretised blip modes and their transformation into the moving frame.

Amplitudes live on an increasing grid of natural coordinates. Integrals use
trapezoidal weights, and the discrete delta is ``delta_ij / dchi_i``, so that
``sum_i |f_i|^2 w_i`` is the photon number and ``[a_i, a_j^+] w_j`` is the
identity.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import lightcone as lc
from . import trajectory as tr
from .errors import EmptyRegion

POLARIZATIONS = ("H", "V")
NORM_TOL = 1e-9
# normalisation slack for packets produced by a transformation (trapezoid error on the image grid)
TRANSFORMED_NORM_TOL = 1e-6


@dataclass(frozen=True)
class BlipMode:
    s: int = 1
    polarization: str = "H"

    def __post_init__(self):
        object.__setattr__(self, "s", tr.check_direction(self.s))
        if self.polarization not in POLARIZATIONS:
            raise ValueError(f"polarization must be one of {POLARIZATIONS}, got {self.polarization!r}")


def uniform_grid(chi_min, chi_max, n_points):
    if n_points < 2 or not chi_max > chi_min:
        raise ValueError("need n_points >= 2 and chi_max > chi_min")
    return np.linspace(chi_min, chi_max, int(n_points))


def trapezoid_weights(chi):
    chi = np.asarray(chi, dtype=float)
    w = np.empty_like(chi)
    gaps = np.diff(chi)
    w[0] = 0.5 * gaps[0]
    w[-1] = 0.5 * gaps[-1]
    w[1:-1] = 0.5 * (gaps[:-1] + gaps[1:])
    return w


@dataclass(frozen=True, eq=False)
class WavePacket:
    """Complex amplitude ``f(chi)`` sampled on a strictly increasing grid."""

    mode: BlipMode
    chi: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        chi = np.array(self.chi, dtype=float)
        amp = np.array(self.amplitudes, dtype=complex)
        if chi.ndim != 1 or chi.size < 2 or amp.shape != chi.shape:
            raise ValueError("packet needs a 1-d grid of at least 2 points and one amplitude per point")
        if np.any(np.diff(chi) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if not (np.all(np.isfinite(chi)) and np.all(np.isfinite(amp))):
            raise ValueError("grid and amplitudes must be finite")
        chi.flags.writeable = False
        amp.flags.writeable = False
        object.__setattr__(self, "chi", chi)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def from_function(cls, mode, chi, func):
        chi = np.asarray(chi, dtype=float)
        return cls(mode, chi, func(chi))

    @property
    def weights(self):
        return trapezoid_weights(self.chi)

    def norm2(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2 * self.weights))

    def normalized(self):
        n2 = self.norm2()
        if n2 == 0:
            raise ValueError("cannot normalise an all-zero packet")
        return WavePacket(self.mode, self.chi, self.amplitudes / np.sqrt(n2))

    def same_as(self, other, atol=0.0):
        return (
            self.mode == other.mode
            and self.chi.shape == other.chi.shape
            and np.allclose(self.chi, other.chi, rtol=0, atol=atol)
            and np.allclose(self.amplitudes, other.amplitudes, rtol=0, atol=atol)
        )

    def support(self):
        """``(chi_first, chi_last)`` of the nonzero amplitudes, or None."""
        nz = np.flatnonzero(self.amplitudes)
        if nz.size == 0:
            return None
        return float(self.chi[nz[0]]), float(self.chi[nz[-1]])

    def to_dict(self):
        return {
            "s": self.mode.s,
            "polarization": self.mode.polarization,
            "chi": self.chi.tolist(),
            "re": self.amplitudes.real.tolist(),
            "im": self.amplitudes.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data):
        extra = set(data) - {"s", "polarization", "chi", "re", "im"}
        if extra:
            raise ValueError(f"unknown packet keys: {sorted(extra)}")
        mode = BlipMode(int(data.get("s", 1)), data.get("polarization", "H"))
        amp = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        return cls(mode, data["chi"], amp)

    def write_csv(self, stream):
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["chi", "re", "im"])
        for c, f in zip(self.chi, self.amplitudes):
            writer.writerow([f"{c:.17g}", f"{f.real:.17g}", f"{f.imag:.17g}"])

    @classmethod
    def read_csv(cls, path, mode=None):
        data = np.genfromtxt(path, delimiter=",", names=True, comments="#")
        if data.dtype.names != ("chi", "re", "im"):
            raise ValueError(f"{path}: expected header 'chi,re,im', got {data.dtype.names}")
        return cls(mode or BlipMode(), data["chi"], data["re"] + 1j * data["im"])


@dataclass(frozen=True)
class Vacuum:
    kind = "vacuum"


@dataclass(frozen=True, eq=False)
class SinglePhoton:
    packet: WavePacket
    kind = "single_photon"

    def __post_init__(self):
        n2 = self.packet.norm2()
        if abs(n2 - 1.0) > TRANSFORMED_NORM_TOL:
            raise ValueError(f"single-photon packet must be normalised, norm^2 = {n2!r}")


@dataclass(frozen=True, eq=False)
class Coherent:
    packet: WavePacket
    kind = "coherent"


def state_to_dict(state):
    if isinstance(state, Vacuum):
        return {"kind": "vacuum"}
    return {"kind": state.kind, "packet": state.packet.to_dict()}


def state_from_dict(data, strict_norm=True):
    """Build a FieldState from its JSON form.

    With ``strict_norm`` a single-photon packet must satisfy ``|norm^2 - 1| <= 1e-9``.
    """
    kind = data.get("kind")
    if kind == "vacuum":
        if set(data) != {"kind"}:
            raise ValueError("vacuum state takes no fields besides 'kind'")
        return Vacuum()
    if kind not in ("single_photon", "coherent") or set(data) != {"kind", "packet"}:
        raise ValueError(f"state needs kind in (vacuum, single_photon, coherent) and a packet, got {sorted(data)}")
    packet = WavePacket.from_dict(data["packet"])
    if kind == "coherent":
        return Coherent(packet)
    if strict_norm and abs(packet.norm2() - 1.0) > NORM_TOL:
        raise ValueError(f"single-photon packet must be normalised, norm^2 = {packet.norm2()!r}")
    return SinglePhoton(packet)


def e45_factor(beta, s):
    """Local operator factor ``sqrt(gamma (1 - s beta))`` relating ``b(chi_B)`` to ``a(chi_A)``."""
    s = tr.check_direction(s)
    beta = np.asarray(beta, dtype=float)
    out = np.sqrt(lc.gamma_of(beta) * (1.0 - s * beta))
    return float(out) if np.ndim(out) == 0 else out


def transform_wavepacket(fm, wp):
    """Re-express ``wp`` in the moving frame.

    Grid points go to their images (a non-uniform grid) and each amplitude
    picks up the local factor ``sqrt(gamma (1 - s beta))``, i.e.
    ``(d chi_A / d chi_B)^(1/2)``.
    """
    if wp.mode.s != fm.s:
        raise ValueError(f"packet direction s={wp.mode.s} does not match frame map s={fm.s}")
    beta = tr.beta_at_chi(fm.traj, wp.chi, fm.s)
    fm.density(wp.chi)  # horizon guard
    chi_B = lc.map_points(fm, wp.chi)
    return WavePacket(wp.mode, chi_B, wp.amplitudes * e45_factor(beta, fm.s))


def transform_state(fm, state):
    if isinstance(state, Vacuum):
        return Vacuum()
    if isinstance(state, SinglePhoton):
        return SinglePhoton(transform_wavepacket(fm, state.packet))
    if isinstance(state, Coherent):
        return Coherent(transform_wavepacket(fm, state.packet))
    raise TypeError(f"not a field state: {state!r}")


def number_in_region(wp, lo, hi):
    """Expected number of blip worldlines with ``lo <= chi <= hi``."""
    inside = (wp.chi >= lo) & (wp.chi <= hi)
    if not np.any(inside):
        raise EmptyRegion(f"no grid points in [{lo!r}, {hi!r}]")
    return float(np.sum(np.abs(wp.amplitudes[inside]) ** 2 * wp.weights[inside]))


def resample_uniform(wp, n_points):
    """Linear interpolation onto a uniform grid spanning the packet.

    Returns ``(packet, norm2_before, norm2_after)``; no renormalisation is applied.
    """
    grid = uniform_grid(wp.chi[0], wp.chi[-1], n_points)
    re = np.interp(grid, wp.chi, wp.amplitudes.real)
    im = np.interp(grid, wp.chi, wp.amplitudes.imag)
    out = WavePacket(wp.mode, grid, re + 1j * im)
    return out, wp.norm2(), out.norm2()


_MODES = tuple(BlipMode(s, p) for s in (1, -1) for p in POLARIZATIONS)


def commutator_matrix(grid, fm=None):
    """Vacuum expectations ``C_kl = <0|[a_k, a_l^+]|0>`` over the four modes.

    Builds ``a_k`` on the vacuum-plus-one-blip sector for the modes
    ``(s, polarization)`` in ``_MODES`` order, each block indexed by grid
    point. With ``fm`` the operators are the moving-frame ``b`` (local factor
    applied). Returns ``(C, weights)``, where ``weights`` are the cell widths
    that turn ``C`` into a discrete delta: the grid step, or the interior cell
    widths of the image grid (NaN at the two ends, which have no symmetric
    neighbour).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing with at least 2 points")
    n = grid.size
    m = len(_MODES)
    dchi = np.diff(grid)
    if np.ptp(dchi) > 1e-9 * abs(dchi.mean()):
        raise ValueError("commutator_check needs a uniform grid")
    step = dchi.mean()

    factor = np.ones(n)
    weights = np.full(n, step)
    if fm is not None:
        beta = tr.beta_at_chi(fm.traj, grid, fm.s)
        factor = e45_factor(beta, fm.s)
        images = lc.map_points(fm, grid)
        weights = np.full(n, np.nan)
        weights[1:-1] = 0.5 * (images[2:] - images[:-2])

    # <0| a_k maps one-blip basis state e_k to the vacuum with amplitude 1/sqrt(step)
    annihilate = sparse.kron(sparse.identity(m), sparse.diags(factor / np.sqrt(step)), format="csr")
    create = annihilate.T.conj().tocsr()
    # a_k^+ a_l |0> = 0, so only the first ordering survives on the vacuum
    return (annihilate @ create).tocsr(), weights


def commutator_check(grid, fm=None):
    """Largest deviation of the discretised canonical commutators.

    Same-mode rows must sum to one once weighted by the cell widths; cross-mode
    blocks must vanish. With ``fm`` the deviation is the O(h^2) mismatch of the
    discrete delta on the image grid.
    """
    comm, weights = commutator_matrix(grid, fm)
    n = weights.size
    worst = 0.0
    for i, mi in enumerate(_MODES):
        for j, mj in enumerate(_MODES):
            block = comm[i * n:(i + 1) * n, j * n:(j + 1) * n]
            if mi == mj:
                rows = block @ np.nan_to_num(weights)
                dev = np.abs(rows - 1.0)[np.isfinite(weights)]
                worst = max(worst, float(np.max(dev)))
            elif block.nnz:
                worst = max(worst, float(abs(block).max()))
    return worst
