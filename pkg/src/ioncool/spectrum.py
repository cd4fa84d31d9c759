"""Exact state counting on a coarse-grained energy grid and the smooth
density of states of N incommensurate harmonic modes.

Energy shells are half-open intervals [E - dE/2, E + dE/2), so every Fock
state falls into exactly one shell.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .ion_chain import ModeSpectrum, _readonly

__all__ = [
    "EnergyGrid",
    "ShellCensus",
    "EnumerationBudgetError",
    "count_states",
    "states_in_band",
    "count_in_band",
    "smooth_density",
]

DEFAULT_STATE_BUDGET = 20_000_000


class EnumerationBudgetError(RuntimeError):
    """Raised when an exact enumeration exceeds its state budget."""

    def __init__(self, budget):
        super().__init__(f"enumeration exceeded the state budget of {budget} states")
        self.budget = budget


@dataclass(frozen=True)
class EnergyGrid:
    """Equally spaced shell centers of width delta_e (units hbar nu_1)."""

    delta_e: float
    centers: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "centers", _readonly(self.centers))
        if self.delta_e <= 0:
            raise ValueError("delta_e must be positive")
        c = self.centers
        if c.ndim != 1 or c.size < 1:
            raise ValueError("centers must be a non-empty 1-D array")
        if c.size > 1:
            spacing = np.diff(c)
            if np.max(np.abs(spacing - self.delta_e)) > 1e-9 * self.delta_e:
                raise ValueError("centers must be equally spaced by delta_e")

    @classmethod
    def for_spectrum(
        cls,
        spectrum: ModeSpectrum,
        delta_e: float,
        e_max: float,
        anchor: float = 0.0,
    ) -> "EnergyGrid":
        """Grid of shells covering [ground energy, e_max], centers at
        anchor + k*delta_e with the first center at or above the ground
        state energy."""
        e0 = spectrum.ground_energy
        if e_max <= e0:
            raise ValueError(f"e_max {e_max} must exceed the ground energy {e0:.6f}")
        k0 = int(np.ceil((e0 - anchor) / delta_e - 1e-12))
        k1 = int(np.floor((e_max - anchor) / delta_e + 1e-12))
        if k1 < k0:
            raise ValueError("grid span contains no shell centers")
        centers = anchor + delta_e * np.arange(k0, k1 + 1)
        return cls(delta_e, centers)

    @property
    def n_shells(self) -> int:
        return self.centers.size

    @property
    def edges(self) -> np.ndarray:
        """Shell boundaries; shell k covers [edges[k], edges[k+1])."""
        return np.concatenate(
            [self.centers - 0.5 * self.delta_e, [self.centers[-1] + 0.5 * self.delta_e]]
        )

    def index_of(self, energy: float) -> int:
        """Shell index containing the given energy, or -1 if outside."""
        e = self.edges
        if energy < e[0] or energy >= e[-1]:
            return -1
        return int(np.searchsorted(e, energy, side="right") - 1)


@dataclass(frozen=True)
class ShellCensus:
    """Exact number of Fock states per shell, aligned with grid centers."""

    grid: EnergyGrid
    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)
        if counts.shape != (self.grid.n_shells,):
            raise ValueError("counts must align with the grid centers")
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return int(np.sum(self.counts))


def _census_recurse(freqs, order, mode, e_part, edges, counts, budget_box):
    """DFS over occupations of freqs[order], binning states into edges.

    freqs is ordered descending so pruning triggers early; the last mode is
    binned vectorized since its reachable energies form an arithmetic
    progression.
    """
    top = edges[-1]
    nu = freqs[order[mode]]
    if mode == len(order) - 1:
        n_max = int(np.floor((top - e_part) / nu - 1e-12))
        if n_max < 0:
            return
        budget_box[0] -= n_max + 1
        if budget_box[0] < 0:
            raise EnumerationBudgetError(budget_box[1])
        energies = e_part + nu * np.arange(n_max + 1)
        idx = np.searchsorted(edges, energies, side="right") - 1
        valid = (idx >= 0) & (idx < counts.size)
        np.add.at(counts, idx[valid], 1)
        return
    n_max = int(np.floor((top - e_part) / nu - 1e-12))
    for n in range(n_max + 1):
        _census_recurse(freqs, order, mode + 1, e_part + n * nu, edges, counts, budget_box)


def _census(frequencies, edges, budget):
    freqs = np.asarray(frequencies, dtype=float)
    counts = np.zeros(len(edges) - 1, dtype=np.int64)
    ground = 0.5 * float(np.sum(freqs))
    if ground >= edges[-1]:
        return counts
    order = list(np.argsort(freqs)[::-1])
    budget_box = [budget, budget]
    _census_recurse(freqs, order, 0, ground, np.asarray(edges, float), counts, budget_box)
    return counts


def count_states(
    spectrum: ModeSpectrum,
    grid: EnergyGrid,
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> ShellCensus:
    """Exact census of Fock states n with total energy
    sum_alpha (n_alpha + 1/2) nu_alpha inside each half-open shell."""
    counts = _census(spectrum.frequencies, grid.edges, state_budget)
    return ShellCensus(grid, counts)


def count_in_band(
    spectrum: ModeSpectrum,
    lo: float,
    hi: float,
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> int:
    """Number of Fock states with energy in [lo, hi)."""
    counts = _census(spectrum.frequencies, np.array([lo, hi]), state_budget)
    return int(counts[0])


def _band_recurse(freqs, mode, e_part, occ, lo, hi, out, budget_box):
    nu = freqs[mode]
    if mode == len(freqs) - 1:
        n_min = max(0, int(np.ceil((lo - e_part) / nu - 1e-12)))
        n_max = int(np.floor((hi - e_part) / nu - 1e-12))
        if n_max < n_min:
            return
        budget_box[0] -= n_max - n_min + 1
        if budget_box[0] < 0:
            raise EnumerationBudgetError(budget_box[1])
        for n in range(n_min, n_max + 1):
            e = e_part + n * nu
            if lo <= e < hi:
                out.append(occ + [n])
        return
    n_max = int(np.floor((hi - e_part) / nu - 1e-12))
    for n in range(n_max + 1):
        _band_recurse(freqs, mode + 1, e_part + n * nu, occ + [n], lo, hi, out, budget_box)


def states_in_band(
    spectrum: ModeSpectrum,
    lo: float,
    hi: float,
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> np.ndarray:
    """Occupation tuples (rows, mode-ordered as in the spectrum) of every
    Fock state with energy in [lo, hi)."""
    freqs = spectrum.frequencies
    ground = spectrum.ground_energy
    out: list = []
    if ground < hi:
        _band_recurse(list(freqs), 0, ground, [], lo, hi, out, [state_budget, state_budget])
    if not out:
        return np.zeros((0, spectrum.n_modes), dtype=np.int64)
    return np.array(out, dtype=np.int64)


def smooth_density(spectrum: ModeSpectrum, energy) -> np.ndarray | float:
    """Smooth density of states g(E) = E^(N-1) / ((N-1)! prod_a nu_a).

    Evaluated in the log domain so large N stays finite. Vectorized over
    energy; g(0) is 1/nu_1 for a single mode and 0 otherwise.
    """
    e = np.asarray(energy, dtype=float)
    if np.any(e < 0):
        raise ValueError("energy must be non-negative")
    n = spectrum.n_modes
    log_norm = gammaln(n) + np.sum(np.log(spectrum.frequencies))
    if n == 1:
        g = np.full(e.shape, np.exp(-log_norm))
    else:
        with np.errstate(divide="ignore"):
            g = np.exp((n - 1) * np.log(e) - log_norm)
    if np.ndim(energy) == 0:
        return float(g)
    return g
