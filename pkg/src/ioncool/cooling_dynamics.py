"""Cooling dynamics of the crystal's total mechanical energy: the
coarse-grained shell rate equation, its Fokker-Planck limit (steady state,
relaxation rate, thermal-ansatz evolution) and the Lamb-Dicke per-mode
rate equations.

Conventions (hbar = 1, rates in nu_1, energies in hbar nu_1):

    L(x)  = M Omega^2 gamma / (4 (x - delta)^2 + gamma^2)

is the below-saturation scattering-rate weight at mechanical energy gain
x; its slope at x = 0 is evaluated as the actual derivative of this
expression, L'(0) = 8 M Omega^2 gamma delta / (4 delta^2 + gamma^2)^2,
which keeps the Fokker-Planck drift consistent with both the shell rate
equation and the Lamb-Dicke detailed balance. The drift constant is

    C = 2 cos^2(theta0) / (cos^2(theta0) + alpha) * L'(0) / L(0),

negative for red detuning, and the steady state is the Gamma distribution
P0(E) = |C|^N E^(N-1) exp(C E) / Gamma(N) with mean N / |C|.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, gammainc

from .ergodic_kernel import KernelParams, kernel_quadrature_nodes
from .ion_chain import ModeSpectrum, _readonly
from .spectrum import EnergyGrid

__all__ = [
    "CoolingParams",
    "EnergyDistribution",
    "FPCoefficients",
    "FPSolution",
    "LDModeState",
    "alpha_from_pattern",
    "pattern_density",
    "lorentzian",
    "lorentzian_derivative",
    "fp_coefficients",
    "fp_steady",
    "steady_energy",
    "fp_solution",
    "fp_evolution",
    "cooling_rate",
    "thermal_distribution",
    "transition_matrix",
    "evolve_ergodic",
    "ld_coefficients",
    "ld_steady_occupations",
    "ld_evolve",
    "ld_total_energy",
]

_PATTERNS = {
    "isotropic": lambda c: np.full_like(np.asarray(c, float), 0.5),
    "dipole_linear": lambda c: 0.75 * (1.0 - np.asarray(c, float) ** 2),
    "dipole_circular": lambda c: 0.375 * (1.0 + np.asarray(c, float) ** 2),
}


def pattern_density(pattern, c):
    """Emission pattern N(cos theta) for a preset tag or a custom
    (cos theta, density) table (linearly interpolated)."""
    if isinstance(pattern, str):
        try:
            return _PATTERNS[pattern](c)
        except KeyError:
            raise ValueError(
                f"unknown pattern {pattern!r}; choose from {sorted(_PATTERNS)}"
            ) from None
    table_c, table_n = pattern
    return np.interp(np.asarray(c, float), np.asarray(table_c, float), np.asarray(table_n, float))


def alpha_from_pattern(pattern, n_nodes: int = 64) -> float:
    """Geometric emission factor alpha = integral c^2 N(c) dc over [-1, 1]
    by Gauss-Legendre quadrature. A custom table must be normalized to
    integral N = 1 (checked to 1e-6)."""
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    dens = pattern_density(pattern, x)
    norm = float(np.sum(w * dens))
    if abs(norm - 1.0) > 1e-6:
        raise ValueError(f"emission pattern integrates to {norm:.8f}, not 1")
    return float(np.sum(w * x**2 * dens))


@dataclass(frozen=True)
class CoolingParams:
    """Laser and geometry parameters of the driven crystal.

    gamma: electronic linewidth; detuning: signed laser detuning delta;
    rabi: Rabi frequency Omega (below saturation); recoil: omega_R with
    the full |k|; cos_theta0: projection of the laser wavevector on the
    trap axis; pattern: spontaneous-emission pattern; m_driven: number of
    driven ions M <= N.
    """

    gamma: float
    detuning: float
    rabi: float
    recoil: float
    cos_theta0: float
    n_ions: int
    m_driven: int | None = None
    pattern: object = "isotropic"

    def __post_init__(self):
        if self.m_driven is None:
            object.__setattr__(self, "m_driven", self.n_ions)
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.recoil < 0:
            raise ValueError("recoil must be non-negative")
        if abs(self.cos_theta0) > 1:
            raise ValueError("cos_theta0 must lie in [-1, 1]")
        if self.n_ions < 1:
            raise ValueError("n_ions must be >= 1")
        if not (1 <= self.m_driven <= self.n_ions):
            raise ValueError("m_driven must satisfy 1 <= M <= N")
        if self.rabi / self.gamma > 0.3:
            warnings.warn(
                f"Omega/gamma = {self.rabi / self.gamma:.2f} > 0.3: the "
                "low-saturation premise is strained",
                stacklevel=2,
            )
        alpha = alpha_from_pattern(self.pattern)
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"pattern gives alpha = {alpha:.4f} outside [0, 1]")
        object.__setattr__(self, "_alpha", alpha)

    @property
    def alpha(self) -> float:
        return self._alpha


def lorentzian(x, params: CoolingParams):
    """Scattering-rate weight L(x) at mechanical energy gain x."""
    x = np.asarray(x, dtype=float)
    out = (
        params.m_driven
        * params.rabi**2
        * params.gamma
        / (4.0 * (x - params.detuning) ** 2 + params.gamma**2)
    )
    return float(out) if out.ndim == 0 else out


def lorentzian_derivative(x, params: CoolingParams):
    """dL/dx, analytically."""
    x = np.asarray(x, dtype=float)
    den = 4.0 * (x - params.detuning) ** 2 + params.gamma**2
    out = -8.0 * params.m_driven * params.rabi**2 * params.gamma * (x - params.detuning) / den**2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class EnergyDistribution:
    """Normalized population density P(E) on an energy grid:
    sum P dE = 1 and P >= 0."""

    grid: EnergyGrid
    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.shape != (self.grid.n_shells,):
            raise ValueError("density must align with the grid")
        if p.min() < -1e-12:
            raise ValueError(f"negative density {p.min():.3e} beyond -1e-12")
        p[p < 0] = 0.0
        total = float(np.sum(p) * self.grid.delta_e)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"density integrates to {total!r}, not 1 within 1e-9")
        p.flags.writeable = False
        object.__setattr__(self, "p", p)

    def mean_energy(self) -> float:
        return float(np.sum(self.grid.centers * self.p) * self.grid.delta_e)

    def l1_distance(self, other: "EnergyDistribution") -> float:
        if other.grid.n_shells != self.grid.n_shells:
            raise ValueError("distributions live on different grids")
        return float(np.sum(np.abs(self.p - other.p)) * self.grid.delta_e)


@dataclass(frozen=True)
class FPCoefficients:
    """Drift/diffusion data of the Fokker-Planck limit in rescaled time
    tau = tau_scale * t."""

    c: float
    tau_scale: float
    n_ions: int

    def drift(self, e):
        return 1.0 + self.c * np.asarray(e, float) / self.n_ions

    def diffusion(self, e):
        return 2.0 * np.asarray(e, float) / self.n_ions


def fp_coefficients(params: CoolingParams) -> FPCoefficients:
    """Drift constant C, time scale, and the coefficient functions
    A(E) = 1 + C E / N, B(E) = 2 E / N."""
    if params.cos_theta0 == 0.0:
        raise ValueError("no axial cooling component (cos_theta0 = 0)")
    c2 = params.cos_theta0**2
    l0 = lorentzian(0.0, params)
    l1 = lorentzian_derivative(0.0, params)
    c = 2.0 * c2 / (c2 + params.alpha) * l1 / l0
    tau_scale = params.recoil * (c2 + params.alpha) * l0
    return FPCoefficients(c=c, tau_scale=tau_scale, n_ions=params.n_ions)


def thermal_distribution(grid: EnergyGrid, n_ions: int, u: float) -> EnergyDistribution:
    """Gamma-shaped thermal ansatz F E^(N-1) exp(-E/U), binned exactly on
    the grid via incomplete-gamma shell masses and renormalized there."""
    if u <= 0:
        raise ValueError("thermal parameter U must be positive")
    masses = np.diff(gammainc(n_ions, grid.edges / u))
    total = masses.sum()
    if total <= 0:
        raise ValueError("thermal distribution has no mass on the grid")
    return EnergyDistribution(grid, masses / total / grid.delta_e)


def fp_steady(params: CoolingParams, grid: EnergyGrid) -> EnergyDistribution:
    """Steady state P0(E) = |C|^N E^(N-1) exp(C E) / Gamma(N) on the grid."""
    coeff = fp_coefficients(params)
    if coeff.c >= 0:
        raise ValueError(
            "no stationary distribution (blue detuning or no axial projection)"
        )
    return thermal_distribution(grid, params.n_ions, 1.0 / abs(coeff.c))


def steady_energy(params: CoolingParams) -> float:
    """Steady-state energy N / |C| in units hbar nu_1."""
    coeff = fp_coefficients(params)
    if coeff.c >= 0:
        raise ValueError(
            "no stationary distribution (blue detuning or no axial projection)"
        )
    return params.n_ions / abs(coeff.c)


def cooling_rate(params: CoolingParams) -> float:
    """Relaxation rate of the mean energy toward the steady state,
    2 w_R cos^2(theta0) |L'(0)| / N."""
    return (
        2.0
        * params.recoil
        * params.cos_theta0**2
        * abs(lorentzian_derivative(0.0, params))
        / params.n_ions
    )


@dataclass(frozen=True)
class FPSolution:
    """Thermal-ansatz solution of the Fokker-Planck equation: the
    distribution stays Gamma-shaped with time-dependent scale U(t)."""

    c: float
    u0: float
    rate: float
    n_ions: int

    def __post_init__(self):
        if self.u0 <= 0:
            raise ValueError("initial U must be positive")

    @property
    def u_inf(self) -> float:
        return -1.0 / self.c

    def u(self, t):
        val = self.u_inf + (self.u0 - self.u_inf) * np.exp(-self.rate * np.asarray(t, float))
        return float(val) if val.ndim == 0 else val

    def mean_energy(self, t):
        return self.n_ions * self.u(t)


def fp_solution(params: CoolingParams, u0: float) -> FPSolution:
    coeff = fp_coefficients(params)
    if coeff.c >= 0:
        raise ValueError("thermal-ansatz solution requires red detuning (C < 0)")
    return FPSolution(c=coeff.c, u0=u0, rate=cooling_rate(params), n_ions=params.n_ions)


def fp_evolution(
    params: CoolingParams, u0: float, t: float, grid: EnergyGrid
) -> tuple:
    """(U(t), distribution at t) for the thermal ansatz started at U0."""
    sol = fp_solution(params, u0)
    ut = sol.u(t)
    if ut <= 0:
        raise ValueError("thermal parameter collapsed to U <= 0")
    return ut, thermal_distribution(grid, params.n_ions, ut)


# --------------------------------------------------------------------------
# shell rate equation


def transition_matrix(
    grid: EnergyGrid,
    params: CoolingParams,
    spectrum: ModeSpectrum,
    n_theta: int = 32,
    n_quad: int = 64,
):
    """Discretized two-step (absorb, then emit) scattering generator.

    gain[i, m] is the rate from shell m into shell i: the absorption
    kernel from E_m (recoil w_R cos^2 theta0, Lorentzian-weighted) is
    integrated by Gauss-Legendre quadrature in the sine-substitution
    variable, and for every intermediate energy the emission kernel mass
    landing in shell i is taken exactly from the kernel CDF, integrated
    over the emission pattern with n_theta Gauss-Legendre nodes.

    The loss vector is the column sum of the gain matrix, which makes the
    generator conserve total probability exactly; leak[m] reports the
    relative emission mass falling outside the grid (flagged by
    evolve_ergodic above 1e-6).
    """
    if params.n_ions != spectrum.n_modes:
        raise ValueError("params.n_ions and spectrum mode count differ")
    if params.recoil <= 0:
        raise ValueError("recoil must be positive to build the generator")
    n = spectrum.n_modes
    centers = grid.centers
    edges = grid.edges
    s = grid.n_shells
    ct, wt = np.polynomial.legendre.leggauss(n_theta)
    pat_w = wt * pattern_density(params.pattern, ct)
    r_theta = params.recoil * ct**2
    r0 = params.recoil * params.cos_theta0**2
    gain = np.zeros((s, s))
    leak = np.zeros(s)
    a_beta = n - 0.5
    for m in range(s):
        em = centers[m]
        absorb = KernelParams(em, r0, n) if r0 > 0 else None
        if absorb is None:
            e1 = np.array([em])
            aw = np.array([1.0])
        else:
            e1, aw = kernel_quadrature_nodes(absorb, n_quad)
        lw = lorentzian(e1 - em, params) * aw
        # emission kernel CDF at all shell edges, per (node, theta)
        cen = e1[:, None] + r_theta[None, :]
        wid = np.sqrt(4.0 * r_theta[None, :] * e1[:, None])
        z = (edges[None, None, :] - cen[:, :, None]) / wid[:, :, None]
        x = np.clip(0.5 * (1.0 + z), 0.0, 1.0)
        cdf = betainc(a_beta, a_beta, x)
        masses = np.diff(cdf, axis=2)
        gain[:, m] = np.einsum("q,t,qts->s", lw, pat_w, masses)
        covered = cdf[:, :, -1] - cdf[:, :, 0]
        rate_tot = float(np.sum(lw) * np.sum(pat_w))
        leaked = rate_tot - float(np.einsum("q,t,qt->", lw, pat_w, covered))
        leak[m] = min(max(leaked / rate_tot, 0.0), 1.0) if rate_tot > 0 else 0.0
    loss = gain.sum(axis=0)
    return gain, loss, leak


def evolve_ergodic(
    p0: EnergyDistribution,
    params: CoolingParams,
    spectrum: ModeSpectrum,
    t_final: float,
    dt: float | None = None,
    n_theta: int = 32,
    n_quad: int = 64,
    callback=None,
    callback_interval: float | None = None,
) -> EnergyDistribution:
    """Integrate the shell rate equation from p0 for a time t_final.

    Explicit Euler stepping with dt bounded by 0.1 / (max total loss
    rate); total probability is conserved to 1e-9 at every step and
    densities can never go negative under that bound. An optional
    callback(t, EnergyDistribution) is invoked every callback_interval
    time units and at the final time.
    """
    grid = p0.grid
    if grid.delta_e > 0.2 * params.gamma:
        warnings.warn(
            f"dE = {grid.delta_e:.3g} is not small against gamma = "
            f"{params.gamma:.3g}: coarse graining premise dE << gamma is strained",
            stacklevel=2,
        )
    if p0.mean_energy() < 5.0 * grid.delta_e:
        warnings.warn(
            "mean energy is within a few shell widths of the grid scale; "
            "the continuum form of the rate equation is unreliable here",
            stacklevel=2,
        )
    if params.rabi == 0.0:
        if callback is not None:
            callback(t_final, p0)
        return p0
    if params.recoil <= 0:
        raise ValueError("recoil must be positive to scatter")
    gain, loss, leak = transition_matrix(grid, params, spectrum, n_theta, n_quad)
    if leak.max() > 1e-6:
        warnings.warn(
            f"emission mass of up to {leak.max():.2e} per scattering event "
            "falls outside the grid (re-absorbed by conservation); extend "
            "the grid if this matters",
            stacklevel=2,
        )
    max_loss = float(loss.max())
    dt_max = 0.1 / max_loss if max_loss > 0 else t_final
    if dt is not None and dt > dt_max:
        raise ValueError(
            f"dt = {dt:.3e} violates the stability bound 0.1/max loss = {dt_max:.3e}"
        )
    n_steps = max(1, int(np.ceil(t_final / (dt if dt is not None else dt_max))))
    h = t_final / n_steps
    p = p0.p.copy()
    de = grid.delta_e
    next_cb = callback_interval if (callback and callback_interval) else np.inf
    t = 0.0
    for step in range(n_steps):
        p = p + h * (gain @ p - loss * p)
        t += h
        total = float(np.sum(p) * de)
        if abs(total - 1.0) > 1e-9:
            raise RuntimeError(
                f"probability drifted to {total!r} at t = {t:.4g}; "
                "conservation broken beyond 1e-9"
            )
        if p.min() < -1e-12:
            raise RuntimeError(
                f"negative density {p.min():.3e} at t = {t:.4g} "
                f"(shell {int(np.argmin(p))}); aborting"
            )
        if callback is not None and (t >= next_cb or step == n_steps - 1):
            callback(t, EnergyDistribution(grid, p / total))
            while next_cb <= t:
                next_cb += callback_interval
    return EnergyDistribution(grid, p / (np.sum(p) * de))


# --------------------------------------------------------------------------
# Lamb-Dicke per-mode rate equations


@dataclass(frozen=True)
class LDModeState:
    """Mean vibrational occupation per mode."""

    mean_occupations: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "mean_occupations", _readonly(self.mean_occupations)
        )
        if np.any(self.mean_occupations < 0):
            raise ValueError("mean occupations must be non-negative")


def ld_coefficients(params: CoolingParams, spectrum: ModeSpectrum):
    """(heating, cooling) rate coefficients per mode:
    A+_beta = (w_R/nu_beta) [cos^2(theta0) L(+nu_beta) + alpha L(0)],
    A-_beta likewise with L(-nu_beta)."""
    nu = spectrum.frequencies
    c2 = params.cos_theta0**2
    al0 = params.alpha * lorentzian(0.0, params)
    a_plus = params.recoil / nu * (c2 * lorentzian(nu, params) + al0)
    a_minus = params.recoil / nu * (c2 * lorentzian(-nu, params) + al0)
    return a_plus, a_minus


def ld_steady_occupations(params: CoolingParams, spectrum: ModeSpectrum) -> np.ndarray:
    """Detailed-balance steady state <n_beta> = A+ / (A- - A+)."""
    a_plus, a_minus = ld_coefficients(params, spectrum)
    if np.any(a_minus <= a_plus):
        raise ValueError(
            "heating regime (A- <= A+ for some mode): steady state undefined"
        )
    return a_plus / (a_minus - a_plus)


def _warn_ld_validity(params, spectrum):
    eta2_max = params.recoil * params.cos_theta0**2 / spectrum.frequencies.min()
    if np.sqrt(eta2_max) > 0.3:
        warnings.warn(
            f"chain-summed eta = {np.sqrt(eta2_max):.2f} > 0.3: Lamb-Dicke "
            "expansion is unreliable for these parameters",
            stacklevel=3,
        )


def ld_evolve(
    spectrum: ModeSpectrum,
    params: CoolingParams,
    initial: LDModeState,
    t: float,
    dt: float | None = None,
) -> LDModeState:
    """Integrate the per-mode birth-death rate equations for a time t.

    The mean-occupation equations d<n>/dt = A+ - (A- - A+) <n> close
    exactly for rates linear in n; they are advanced with fixed-step RK4.
    Modes evolve independently.
    """
    if initial.mean_occupations.size != spectrum.n_modes:
        raise ValueError("state and spectrum mode counts differ")
    if t < 0:
        raise ValueError("integration time must be non-negative")
    _warn_ld_validity(params, spectrum)
    if params.rabi == 0.0 or t == 0.0:
        return initial
    a_plus, a_minus = ld_coefficients(params, spectrum)
    decay = a_minus - a_plus
    if np.any(decay <= 0):
        warnings.warn(
            "heating regime (A- <= A+ for some mode): occupations grow "
            "without bound",
            stacklevel=2,
        )
    rate_scale = float(np.max(np.abs(decay)))
    if dt is None:
        dt = 0.5 / rate_scale if rate_scale > 0 else t
    n_steps = max(1, int(np.ceil(t / dt)))
    h = t / n_steps
    y = initial.mean_occupations.copy()

    def f(y):
        return a_plus - decay * y

    for _ in range(n_steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return LDModeState(np.maximum(y, 0.0))


def ld_total_energy(state: LDModeState, spectrum: ModeSpectrum) -> float:
    """Total mechanical energy sum_beta nu_beta (<n_beta> + 1/2)."""
    return float(np.sum(spectrum.frequencies * (state.mean_occupations + 0.5)))
