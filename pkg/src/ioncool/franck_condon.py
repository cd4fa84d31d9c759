"""Exact Franck-Condon amplitudes of photon-recoil displacements, moment
identities, brute-force shell-averaged couplings and the Lamb-Dicke
expansion of transition weights.

The single-mode amplitude is

    <l| exp(i eta (a + a^dag)) |n>
        = exp(-eta^2/2) sqrt(r!/(r+d)!) (i eta)^d L_r^d(eta^2)

with r = min(n, l), d = |l - n|. Magnitudes are evaluated in the log
domain (log-gamma for the factorial ratio, a sign-tracked three-term
recurrence for the Laguerre polynomial); direct polynomial summation
cancels catastrophically already for moderate n and is never used.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .ion_chain import ChainConfig, ModeSpectrum, lamb_dicke
from .spectrum import EnergyGrid, EnumerationBudgetError, states_in_band

__all__ = [
    "FockState",
    "ShellCoupling",
    "LDWeights",
    "TruncationError",
    "fc_single",
    "fc_multi",
    "fc_abs2_matrix",
    "moments_bruteforce",
    "average_coupling_bruteforce",
    "ld_weights",
    "decorrelation_diagnostic",
]

DEFAULT_PAIR_BUDGET = 40_000_000
_RESCALE = 1e250
_LOG_RESCALE = np.log(_RESCALE)


class TruncationError(RuntimeError):
    """Per-mode truncation could not reach the completeness target."""

    def __init__(self, achieved, target):
        super().__init__(
            f"completeness {achieved:.3e} below target {target:.3e} at the cap limit"
        )
        self.achieved = achieved
        self.target = target


@dataclass(frozen=True)
class FockState:
    """Vibrational occupation numbers of the N chain modes."""

    occupations: tuple

    def __post_init__(self):
        occ = tuple(int(n) for n in self.occupations)
        if any(n < 0 for n in occ):
            raise ValueError("occupations must be non-negative")
        object.__setattr__(self, "occupations", occ)

    @property
    def n_modes(self) -> int:
        return len(self.occupations)

    def energy(self, spectrum: ModeSpectrum) -> float:
        """Total energy sum_alpha (n_alpha + 1/2) nu_alpha in hbar nu_1."""
        occ = np.asarray(self.occupations, dtype=float)
        if occ.size != spectrum.n_modes:
            raise ValueError("state and spectrum mode counts differ")
        return float(np.sum((occ + 0.5) * spectrum.frequencies))


@dataclass(frozen=True)
class ShellCoupling:
    """Shell-averaged squared Franck-Condon coupling Q(E, E')."""

    e_from: float
    e_to: float
    q: float

    def __post_init__(self):
        if self.q < 0:
            raise ValueError("coupling must be non-negative")


def _laguerre_signed_log(r: int, d: int, x: float):
    """(sign, log|L_r^d(x)|) via the three-term recurrence with rescaling."""
    prev = 1.0  # L_0
    offset = 0.0
    if r == 0:
        return _signed_log(prev, offset)
    curr = 1.0 + d - x  # L_1
    for k in range(2, r + 1):
        prev, curr = curr, ((2 * k - 1 + d - x) * curr - (k - 1 + d) * prev) / k
        m = max(abs(prev), abs(curr))
        if m > _RESCALE:
            prev /= _RESCALE
            curr /= _RESCALE
            offset += _LOG_RESCALE
    return _signed_log(curr, offset)


def _signed_log(value, offset):
    if value == 0.0:
        return 0.0, -np.inf
    return np.sign(value), np.log(abs(value)) + offset


def fc_single(n: int, l: int, eta: float) -> complex:
    """Single-mode Franck-Condon amplitude <l| exp(i eta (a+a^dag)) |n>."""
    if n < 0 or l < 0:
        raise ValueError("occupation numbers must be non-negative")
    if eta == 0.0:
        return complex(1.0 if n == l else 0.0)
    r, d = min(n, l), abs(l - n)
    x = eta * eta
    sign, log_l = _laguerre_signed_log(r, d, x)
    log_mag = (
        -0.5 * x
        + 0.5 * (gammaln(r + 1) - gammaln(r + d + 1))
        + d * np.log(abs(eta))
        + log_l
    )
    phase = (1j * np.sign(eta)) ** d
    return complex(sign * np.exp(log_mag) * phase)


def fc_multi(n, l, eta_row) -> complex:
    """Multi-mode amplitude: product of per-mode factors."""
    n_occ = n.occupations if isinstance(n, FockState) else tuple(n)
    l_occ = l.occupations if isinstance(l, FockState) else tuple(l)
    eta_row = np.asarray(eta_row, dtype=float)
    if not (len(n_occ) == len(l_occ) == eta_row.size):
        raise ValueError("states and eta_row must share the mode count")
    amp = complex(1.0)
    for na, la, eta in zip(n_occ, l_occ, eta_row):
        amp *= fc_single(na, la, eta)
        if amp == 0.0:
            break
    return amp


_matrix_cache: dict = {}


def fc_abs2_matrix(eta: float, size: int) -> np.ndarray:
    """Matrix W[n, l] = |<l| exp(i eta (a+a^dag)) |n>|^2 for n, l < size.

    Built from the same log-domain recurrence as fc_single, vectorized
    over the index offset d = |l - n|. Results are cached per (eta, size).
    """
    key = (float(eta), int(size))
    cached = _matrix_cache.get(key)
    if cached is not None:
        return cached
    if eta == 0.0:
        w = np.eye(size)
    else:
        w = _build_abs2(float(eta), int(size))
    w.flags.writeable = False
    _matrix_cache[key] = w
    return w


def _build_abs2(eta: float, size: int) -> np.ndarray:
    x = eta * eta
    d = np.arange(size, dtype=float)
    w = np.zeros((size, size))
    l_prev = np.ones(size)
    offset = np.zeros(size)
    # r = 0 row: L_0 = 1
    _fill_diagonals(w, 0, x, d, l_prev, offset)
    if size > 1:
        l_curr = 1.0 + d - x
        _fill_diagonals(w, 1, x, d, l_curr, offset)
        for r in range(2, size):
            l_prev, l_curr = (
                l_curr,
                ((2 * r - 1 + d - x) * l_curr - (r - 1 + d) * l_prev) / r,
            )
            m = np.maximum(np.abs(l_prev), np.abs(l_curr))
            big = m > _RESCALE
            if np.any(big):
                l_prev[big] /= _RESCALE
                l_curr[big] /= _RESCALE
                offset[big] += _LOG_RESCALE
            _fill_diagonals(w, r, x, d, l_curr, offset)
    return w


def _fill_diagonals(w, r, x, d, laguerre, offset):
    size = w.shape[0]
    n_d = size - r
    dd = d[:n_d]
    lag = laguerre[:n_d]
    with np.errstate(divide="ignore"):
        log_l = np.where(lag == 0.0, -np.inf, np.log(np.abs(lag)) + offset[:n_d])
    log_mag2 = (
        -x
        + (gammaln(r + 1) - gammaln(r + 1 + dd))
        + dd * np.log(x)
        + 2.0 * log_l
    )
    vals = np.exp(log_mag2)
    rows = np.full(n_d, r)
    cols = r + np.arange(n_d)
    w[rows, cols] = vals
    w[cols, rows] = vals


def _default_cap(n: int, eta: float) -> int:
    return int(n + 10 + np.ceil(20.0 * abs(eta) * np.sqrt(n + 1.0)))


def _mode_row(n: int, eta: float, cap: int, hard_cap: int | None = None) -> np.ndarray:
    size = max(cap, n + 2)
    size = ((size + 31) // 32) * 32  # quantize for cache reuse
    if hard_cap is not None:
        size = max(n + 1, min(size, hard_cap))
    return fc_abs2_matrix(eta, size)[n, :]


def moments_bruteforce(
    state: FockState,
    spectrum: ModeSpectrum,
    config: ChainConfig,
    cos_theta: float,
    ion: int | None = None,
    completeness_target: float = 1.0 - 1e-10,
    max_cap: int = 4000,
):
    """First and second moments of the energy-transfer distribution
    |<k|exp(i k cos(theta) z_j)|n>|^2 by exact summation over final states.

    The full product sum over the truncated occupation box factorizes
    exactly into per-mode sums, which is how it is evaluated here. With
    ion=None the second moment is averaged over the ions of the chain;
    the first moment is ion-independent. Raises TruncationError when the
    per-mode caps cannot reach the completeness target.
    """
    eta_all = lamb_dicke(spectrum, config, cos_theta).eta
    nu = spectrum.frequencies
    ions = range(config.n_ions) if ion is None else [ion]
    m1_total = 0.0
    m2_total = 0.0
    for j in ions:
        mu1 = np.zeros(spectrum.n_modes)
        mu2 = np.zeros(spectrum.n_modes)
        comp = np.zeros(spectrum.n_modes)
        for a, n_a in enumerate(state.occupations):
            eta = eta_all[j, a]
            cap = min(_default_cap(n_a, eta), max_cap)
            while True:
                row = _mode_row(n_a, eta, cap, hard_cap=max_cap)
                comp[a] = row.sum()
                if comp[a] >= completeness_target or cap >= max_cap:
                    break
                cap = min(int(1.5 * cap) + 16, max_cap)
            delta = np.arange(row.size) - n_a
            mu1[a] = np.dot(delta, row)
            mu2[a] = np.dot(delta * delta, row)
        total_comp = float(np.prod(comp))
        if total_comp < completeness_target:
            raise TruncationError(total_comp, completeness_target)
        comp_others = total_comp / comp
        m1 = float(np.sum(nu * mu1 * comp_others))
        m2 = float(np.sum(nu**2 * mu2 * comp_others))
        cross = np.outer(nu * mu1, nu * mu1) * total_comp / np.outer(comp, comp)
        m2 += float(np.sum(cross) - np.sum(np.diag(cross)))
        m1_total += m1
        m2_total += m2
    k = config.n_ions if ion is None else 1
    return m1_total / k, m2_total / k


def average_coupling_bruteforce(
    e_from: float,
    e_to: float,
    grid: EnergyGrid,
    spectrum: ModeSpectrum,
    config: ChainConfig,
    cos_theta: float,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
) -> ShellCoupling:
    """Exact shell-averaged coupling

        Q = 1/(N D D') sum_j sum'_n sum'_k |<k| exp(-i k z_j) |n>|^2

    with the primed sums running over the members of the two shells.
    """
    i_from = grid.index_of(e_from)
    i_to = grid.index_of(e_to)
    if i_from < 0 or i_to < 0:
        raise ValueError("shell energies must lie inside the grid")
    edges = grid.edges
    members_from = states_in_band(spectrum, edges[i_from], edges[i_from + 1])
    members_to = states_in_band(spectrum, edges[i_to], edges[i_to + 1])
    d_from, d_to = len(members_from), len(members_to)
    if d_from == 0 or d_to == 0:
        raise ValueError("both shells must be non-empty")
    if min(d_from, d_to) < 10:
        warnings.warn(
            f"shell occupancy D = {min(d_from, d_to)} < 10: the ergodic "
            "premise D(E) >> 1 is marginal",
            stacklevel=2,
        )
    if d_from * d_to > pair_budget:
        raise EnumerationBudgetError(pair_budget)
    eta_all = lamb_dicke(spectrum, config, cos_theta).eta
    n_ions = config.n_ions
    sizes = [
        int(max(members_from[:, a].max(), members_to[:, a].max())) + 1
        for a in range(spectrum.n_modes)
    ]
    total = 0.0
    for j in range(n_ions):
        block = np.ones((d_from, d_to))
        for a in range(spectrum.n_modes):
            w = fc_abs2_matrix(eta_all[j, a], ((sizes[a] + 31) // 32) * 32)
            block *= w[members_from[:, a][:, None], members_to[:, a][None, :]]
        total += float(block.sum())
    q = total / (n_ions * d_from * d_to)
    return ShellCoupling(float(grid.centers[i_from]), float(grid.centers[i_to]), q)


@dataclass(frozen=True)
class LDWeights:
    """First-order Lamb-Dicke transition weights for one scattering event,
    summed over the ions of the chain."""

    carrier: float
    blue: np.ndarray
    red: np.ndarray

    def total(self) -> float:
        return self.carrier + float(np.sum(self.blue)) + float(np.sum(self.red))


def ld_weights(
    state: FockState,
    spectrum: ModeSpectrum,
    config: ChainConfig,
    cos_theta: float,
) -> LDWeights:
    """Carrier and per-mode sideband weights to first order in eta^2.

    Uses the ion-summed sum rule sum_j eta_j_beta^2 = w_R cos^2(theta)/nu_beta,
    so the weights are those of the chain-wide scattering event. They sum
    to one exactly at this order.
    """
    eta = lamb_dicke(spectrum, config, cos_theta).eta
    if np.max(np.abs(eta)) > 0.3:
        warnings.warn(
            f"max |eta| = {np.max(np.abs(eta)):.3f} > 0.3: first-order "
            "Lamb-Dicke expansion is unreliable",
            stacklevel=2,
        )
    occ = np.asarray(state.occupations, dtype=float)
    s = config.recoil_frequency * cos_theta**2 / spectrum.frequencies
    blue = s * (occ + 1.0)
    red = s * occ
    carrier = 1.0 - float(np.sum(s * (2.0 * occ + 1.0)))
    return LDWeights(carrier, blue, red)


def decorrelation_diagnostic(
    state_from: FockState,
    state_to: FockState,
    shell_lo: float,
    shell_hi: float,
    spectrum: ModeSpectrum,
    config: ChainConfig,
    cos_theta_abs: float,
    cos_theta_em: float,
):
    """Diagnostic pair (correlated, decorrelated) for the absorption +
    emission double sum over an intermediate shell.

    The correlated value keeps absorption and emission on the same ion;
    the decorrelated value replaces delta_jl by 1/N as in the derivation
    of the shell rate equation. No tolerance is asserted anywhere: the
    replacement is an uncontrolled approximation surfaced for inspection.
    """
    members = states_in_band(spectrum, shell_lo, shell_hi)
    if len(members) == 0:
        raise ValueError("intermediate shell is empty")
    eta_abs = lamb_dicke(spectrum, config, cos_theta_abs).eta
    eta_em = lamb_dicke(spectrum, config, cos_theta_em).eta
    n_ions = config.n_ions
    a = np.ones((n_ions, len(members)))
    b = np.ones((n_ions, len(members)))
    sizes = [
        int(max(members[:, m].max(), state_from.occupations[m], state_to.occupations[m])) + 1
        for m in range(spectrum.n_modes)
    ]
    for j in range(n_ions):
        for m in range(spectrum.n_modes):
            size = ((sizes[m] + 31) // 32) * 32
            wa = fc_abs2_matrix(eta_abs[j, m], size)
            we = fc_abs2_matrix(eta_em[j, m], size)
            a[j] *= wa[state_from.occupations[m], members[:, m]]
            b[j] *= we[state_to.occupations[m], members[:, m]]
    correlated = float(np.sum(a * b))
    decorrelated = float(np.sum(a.sum(axis=0) * b.sum(axis=0))) / n_ions
    return correlated, decorrelated
