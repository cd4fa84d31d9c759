"""Closed-form classical energy-transfer kernel of a single scattering
event and the matching shell coupling.

For N modes, initial shell energy E and effective recoil R (the
single-photon recoil projected on the relevant axis), the density of the
final energy E' is

    f_E(E') = Gamma(N) / (sqrt(pi) Gamma(N - 1/2) sqrt(4 R E))
              * [1 - ((E' - E - R)^2 / (4 R E))]^(N - 3/2)

supported on E + R +- sqrt(4 R E); it integrates to one, has mean shift R
and second moment R^2 + 2 R E / N. Quadratures over the kernel use the
substitution E' = E + R + sqrt(4 R E) sin(u), which absorbs the N = 1
inverse-square-root endpoint divergence into the measure.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import betainc, gammaln

from .ion_chain import ModeSpectrum
from .spectrum import smooth_density

__all__ = [
    "KernelParams",
    "kernel_f",
    "kernel_cdf",
    "kernel_moments",
    "kernel_support",
    "q_classical",
    "kernel_sample",
]


@dataclass(frozen=True)
class KernelParams:
    """Initial shell energy, effective recoil hbar w_R cos^2(theta) and
    mode count, all in units hbar nu_1."""

    e: float
    recoil: float
    n_ions: int

    def __post_init__(self):
        if self.e <= 0:
            raise ValueError("shell energy must be positive")
        if self.recoil < 0:
            raise ValueError("recoil must be non-negative")
        if self.n_ions < 1:
            raise ValueError("n_ions must be >= 1")

    @property
    def is_degenerate(self) -> bool:
        """True when recoil = 0 and the kernel collapses to a delta at E."""
        return self.recoil == 0.0

    @property
    def half_width(self) -> float:
        return float(np.sqrt(4.0 * self.recoil * self.e))

    @property
    def support(self) -> tuple:
        c = self.e + self.recoil
        return (c - self.half_width, c + self.half_width)


def kernel_support(params: KernelParams) -> tuple:
    return params.support


def _log_prefactor(n: int) -> float:
    return gammaln(n) - gammaln(n - 0.5) - 0.5 * np.log(np.pi)


def kernel_f(params: KernelParams, e_prime) -> np.ndarray | float:
    """Kernel density f_E(E'); zero outside the support.

    With recoil = 0 the kernel degenerates to a delta distribution: inf is
    returned at E' = E and 0 elsewhere (a distinguished value, not an
    overflow), and is_degenerate lets callers branch beforehand.
    """
    ep = np.atleast_1d(np.asarray(e_prime, dtype=float))
    if params.is_degenerate:
        out = np.where(ep == params.e, np.inf, 0.0)
        return float(out[0]) if np.ndim(e_prime) == 0 else out
    n = params.n_ions
    w = params.half_width
    t = 1.0 - ((ep - params.e - params.recoil) / w) ** 2
    out = np.zeros_like(ep)
    inside = t > 0
    out[inside] = np.exp(
        _log_prefactor(n) - np.log(w) + (n - 1.5) * np.log(t[inside])
    )
    if n == 1:
        out[t == 0] = np.inf
    return float(out[0]) if np.ndim(e_prime) == 0 else out


def kernel_cdf(params: KernelParams, e_prime) -> np.ndarray | float:
    """Cumulative mass of the kernel below e_prime (regularized incomplete
    beta in the sine substitution variable)."""
    ep = np.asarray(e_prime, dtype=float)
    if params.is_degenerate:
        out = np.where(ep >= params.e, 1.0, 0.0)
        return float(out) if np.ndim(e_prime) == 0 else out
    n = params.n_ions
    z = (ep - params.e - params.recoil) / params.half_width
    x = np.clip(0.5 * (1.0 + z), 0.0, 1.0)
    out = betainc(n - 0.5, n - 0.5, x)
    return float(out) if np.ndim(e_prime) == 0 else out


@lru_cache(maxsize=32)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def kernel_quadrature_nodes(params: KernelParams, n_nodes: int = 200):
    """Nodes E'_q and weights a_q such that sum_q a_q h(E'_q) approximates
    integral f_E(E') h(E') dE', exact in the n_nodes -> inf limit."""
    if params.is_degenerate:
        return np.array([params.e]), np.array([1.0])
    x, w = _gauss_legendre(n_nodes)
    u = 0.5 * np.pi * x
    nodes = params.e + params.recoil + params.half_width * np.sin(u)
    n = params.n_ions
    weights = (
        0.5 * np.pi * w * np.exp(_log_prefactor(n)) * np.cos(u) ** (2 * n - 2)
    )
    return nodes, weights


def kernel_moments(params: KernelParams, n_nodes: int = 200):
    """(normalization, first moment of E'-E, second moment of (E'-E)^2)
    by Gauss-Legendre quadrature in the sine-substitution variable."""
    nodes, weights = kernel_quadrature_nodes(params, n_nodes)
    shift = nodes - params.e
    return (
        float(np.sum(weights)),
        float(np.sum(weights * shift)),
        float(np.sum(weights * shift**2)),
    )


def q_classical(
    e: float, e_prime: float, spectrum: ModeSpectrum, recoil: float
) -> float:
    """Closed-form shell coupling Q(E, E'), symmetric in its energy
    arguments by construction and related to the kernel density through
    g(E') Q(E, E') = f_E(E').

    Zero outside the mutual support.
    """
    if recoil < 0:
        raise ValueError("recoil must be non-negative")
    if e <= 0 or e_prime <= 0:
        raise ValueError("shell energies must be positive")
    if recoil == 0.0:
        raise ValueError("recoil = 0 gives a degenerate delta coupling")
    n = spectrum.n_modes
    b = 2.0 * recoil * (e + e_prime) - (e - e_prime) ** 2 - recoil**2
    if b <= 0:
        return 0.0
    log_q = (
        2.0 * gammaln(n)
        - gammaln(n - 0.5)
        - 0.5 * np.log(np.pi)
        + np.sum(np.log(spectrum.frequencies))
        - (n - 1) * np.log(4.0 * recoil)
        - (n - 1) * np.log(e * e_prime)
        + (n - 1.5) * np.log(b)
    )
    return float(np.exp(log_q))


def kernel_sample(
    params: KernelParams, rng: np.random.Generator, size=None
) -> np.ndarray | float:
    """Draw E' from the kernel density.

    N = 1 uses the exact inverse transform (the substitution angle is
    uniform); N >= 2 draws the symmetric Beta(N-1/2, N-1/2) shape of the
    kernel in the scaled variable. A fixed-seed generator reproduces the
    stream exactly.
    """
    if params.is_degenerate:
        raise ValueError("recoil must be positive to sample the kernel")
    n = params.n_ions
    if n == 1:
        u = rng.uniform(-0.5 * np.pi, 0.5 * np.pi, size)
        s = np.sin(u)
    else:
        s = 2.0 * rng.beta(n - 0.5, n - 0.5, size) - 1.0
    out = params.e + params.recoil + params.half_width * s
    return float(out) if size is None else out


def kernel_vs_density_identity(
    e: float, e_prime, spectrum: ModeSpectrum, recoil: float
):
    """(f_E(E'), g(E') Q(E, E')) for direct inspection of the defining
    identity; both sides agree to roundoff inside the support."""
    params = KernelParams(e, recoil, spectrum.n_modes)
    f = kernel_f(params, e_prime)
    gq = smooth_density(spectrum, e_prime) * q_classical(e, e_prime, spectrum, recoil)
    return f, gq
