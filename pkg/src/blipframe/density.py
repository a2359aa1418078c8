"""Worldline densities seen by the moving observer.

Density is counted per unit natural coordinate. A light-line interval of
width ``dchi_A`` occupies ``kappa dchi_A`` for the moving observer, so the
same worldlines are spread more thinly by the factor ``1 / kappa``. Every
worldline carries the same zero-point energy (set to 1), so the energy
density ratio equals the worldline density ratio.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class DensityProfile:
    chi: np.ndarray
    ratio: np.ndarray
    s: int

    def __post_init__(self):
        if np.any(self.ratio <= 0):
            raise ValueError("density ratios must be positive")

    def write_csv(self, stream):
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["chi_A", "ratio"])
        for c, r in zip(self.chi, self.ratio):
            writer.writerow([f"{c:.17g}", f"{r:.17g}"])


def worldline_density_ratio(fm, chi_A):
    """``rho_B / rho_A`` at the light line ``chi_A``."""
    r = 1.0 / np.asarray(fm.density(chi_A))
    return float(r) if r.ndim == 0 else r


def zero_point_energy_ratio(fm, chi_A):
    # (rho_B E) / (rho_A E): the per-worldline energy is frame independent
    return worldline_density_ratio(fm, chi_A)


def density_profile(fm, lo, hi, n_samples):
    if n_samples < 2:
        raise ValueError("a density profile needs at least 2 samples")
    if not hi > lo:
        raise ValueError("profile interval must have hi > lo")
    chi = np.linspace(lo, hi, int(n_samples))
    return DensityProfile(chi, np.asarray(worldline_density_ratio(fm, chi)), fm.s)
