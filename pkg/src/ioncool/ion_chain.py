"""Mechanics of a 1-D trapped-ion Coulomb crystal: equilibrium positions,
quadratic potential matrix, normal modes and Lamb-Dicke parameters.

Natural units throughout the package: hbar = 1, ion mass m = 1, and the
axial (center-of-mass) trap frequency nu_1 as the frequency unit. Lengths
are measured in l = (e^2 / (4 pi eps0 m nu^2))^(1/3), so the dimensionless
axial coordinate u_j of ion j obeys the force balance

    u_j = sum_{k<j} 1/(u_j - u_k)^2 - sum_{k>j} 1/(u_k - u_j)^2 .

All energies downstream are reported in units of hbar*nu_1.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ChainConfig",
    "EquilibriumPositions",
    "ModeSpectrum",
    "LambDickeSet",
    "EquilibriumError",
    "NotAnEquilibriumError",
    "UnstableModesError",
    "solve_equilibrium",
    "hessian",
    "solve_modes",
    "lamb_dicke",
    "chain_modes",
]

_RESIDUAL_TOL = 1e-12
_MAX_NEWTON_ITER = 200


class EquilibriumError(RuntimeError):
    """Equilibrium solver failed to converge; carries the residual norm."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual norm {residual:.3e})")
        self.residual = residual


class NotAnEquilibriumError(ValueError):
    """Positions handed to hessian() do not satisfy the force balance."""

    def __init__(self, residual):
        super().__init__(
            f"positions are not an equilibrium: residual norm {residual:.3e} "
            f"exceeds {_RESIDUAL_TOL:.0e}"
        )
        self.residual = residual


class UnstableModesError(ValueError):
    """Potential matrix has a non-positive eigenvalue (no crystal)."""


@dataclass(frozen=True)
class ChainConfig:
    """Trap and crystal definition.

    n_ions: number of ions (equal mass and charge).
    recoil_frequency: omega_R = hbar k^2 / 2m in units of nu_1, defined with
        the full laser wavevector magnitude |k|.
    axial_frequency: center-of-mass frequency in units of nu_1 (normally 1).
    """

    n_ions: int
    recoil_frequency: float = 0.0
    axial_frequency: float = 1.0

    def __post_init__(self):
        if self.n_ions < 1:
            raise ValueError(f"n_ions must be >= 1, got {self.n_ions}")
        if self.axial_frequency <= 0:
            raise ValueError("axial_frequency must be positive")
        if self.recoil_frequency < 0:
            raise ValueError("recoil_frequency must be non-negative")


def _readonly(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class EquilibriumPositions:
    """Dimensionless axial equilibrium coordinates, sorted ascending."""

    positions: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "positions", _readonly(self.positions))
        u = self.positions
        if u.ndim != 1 or u.size < 1:
            raise ValueError("positions must be a non-empty 1-D array")
        if u.size > 1 and not np.all(np.diff(u) > 0):
            raise ValueError("positions must be strictly increasing")

    @property
    def n_ions(self) -> int:
        return self.positions.size


@dataclass(frozen=True)
class ModeSpectrum:
    """Normal-mode frequencies (ascending, units nu_1) and the orthonormal
    eigenvector matrix b[j, alpha] (ion j, mode alpha)."""

    frequencies: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "frequencies", _readonly(self.frequencies))
        object.__setattr__(self, "eigenvectors", _readonly(self.eigenvectors))
        nu, b = self.frequencies, self.eigenvectors
        n = nu.size
        if b.shape != (n, n):
            raise ValueError("eigenvector matrix must be N x N")
        if np.any(nu <= 0):
            raise ValueError("mode frequencies must be positive")
        if n > 1 and not np.all(np.diff(nu) > 0):
            raise ValueError("mode frequencies must be strictly increasing")
        if np.max(np.abs(b.T @ b - np.eye(n))) > 1e-12:
            raise ValueError("eigenvector matrix is not orthonormal to 1e-12")

    @property
    def n_modes(self) -> int:
        return self.frequencies.size

    @property
    def ground_energy(self) -> float:
        """Zero-point energy sum_alpha nu_alpha / 2 in units hbar nu_1."""
        return 0.5 * float(np.sum(self.frequencies))


@dataclass(frozen=True)
class LambDickeSet:
    """Lamb-Dicke parameters eta[j, alpha] for a given laser projection."""

    eta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eta", _readonly(self.eta))
        if self.eta.ndim != 2 or self.eta.shape[0] != self.eta.shape[1]:
            raise ValueError("eta must be an N x N matrix")


def potential_gradient(u: np.ndarray) -> np.ndarray:
    """Gradient of the dimensionless chain potential at positions u."""
    u = np.asarray(u, dtype=float)
    if u.size == 1:
        return u.copy()
    d = u[:, None] - u[None, :]
    np.fill_diagonal(d, np.inf)
    return u - np.sum(np.sign(d) / d**2, axis=1)


def _hessian_matrix(u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    n = u.size
    if n == 1:
        return np.array([[1.0]])
    d = np.abs(u[:, None] - u[None, :])
    np.fill_diagonal(d, np.inf)
    off = -2.0 / d**3
    v = off.copy()
    np.fill_diagonal(v, 1.0 + 2.0 * np.sum(1.0 / d**3, axis=1))
    return v


def solve_equilibrium(config: ChainConfig) -> EquilibriumPositions:
    """Find the classical equilibrium positions by damped Newton iteration.

    Seeded with a uniformly spaced guess whose spacing follows the
    asymptotic ~2/N^0.56 law; residual tolerance 1e-12 on the gradient.
    """
    n = config.n_ions
    if n == 1:
        return EquilibriumPositions(np.zeros(1))
    spacing = 2.018 / n**0.559
    u = spacing * (np.arange(n) - 0.5 * (n - 1))
    res = potential_gradient(u)
    norm = np.max(np.abs(res))
    for _ in range(_MAX_NEWTON_ITER):
        if norm < _RESIDUAL_TOL:
            break
        step = np.linalg.solve(_hessian_matrix(u), res)
        lam = 1.0
        accepted = False
        while lam > 1e-6:
            trial = u - lam * step
            if np.all(np.diff(trial) > 0):
                tres = potential_gradient(trial)
                tnorm = np.max(np.abs(tres))
                if tnorm < norm:
                    u, res, norm = trial, tres, tnorm
                    accepted = True
                    break
            lam *= 0.5
        if not accepted:
            raise EquilibriumError("Newton line search stalled", norm)
    else:
        raise EquilibriumError(
            f"no convergence after {_MAX_NEWTON_ITER} iterations", norm
        )
    # enforce exact antisymmetry of the converged configuration
    u = 0.5 * (u - u[::-1])
    return EquilibriumPositions(u)


def hessian(positions: EquilibriumPositions) -> np.ndarray:
    """Quadratic potential matrix V_jk at an equilibrium, units m nu^2.

    Raises NotAnEquilibriumError when the force balance residual exceeds
    the solver tolerance.
    """
    u = positions.positions
    residual = float(np.max(np.abs(potential_gradient(u))))
    if residual > 1e-10:
        raise NotAnEquilibriumError(residual)
    return _hessian_matrix(u)


def solve_modes(v: np.ndarray, axial_frequency: float = 1.0) -> ModeSpectrum:
    """Solve the secular eigenproblem of the potential matrix.

    Frequencies are sqrt(eigenvalue) scaled by the trap frequency; the
    eigenvector sign convention makes the largest-magnitude component of
    each mode positive.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise ValueError("potential matrix must be square")
    if np.max(np.abs(v - v.T)) > 1e-12 * max(1.0, np.max(np.abs(v))):
        raise ValueError("potential matrix must be symmetric")
    w, b = np.linalg.eigh(v)
    if np.any(w <= 0):
        raise UnstableModesError(
            f"non-positive eigenvalue {w.min():.3e}: configuration is not a crystal"
        )
    for a in range(b.shape[1]):
        col = b[:, a]
        if col[np.argmax(np.abs(col))] < 0:
            b[:, a] = -col
    return ModeSpectrum(axial_frequency * np.sqrt(w), b)


def lamb_dicke(
    spectrum: ModeSpectrum, config: ChainConfig, cos_theta0: float
) -> LambDickeSet:
    """Lamb-Dicke matrix eta[j, alpha] = cos_theta0 * b_j^alpha * sqrt(w_R/nu_alpha).

    Satisfies the per-mode sum rule
    sum_j eta[j, beta]^2 = w_R cos_theta0^2 / nu_beta.
    """
    if abs(cos_theta0) > 1:
        raise ValueError("cos_theta0 must lie in [-1, 1]")
    scale = np.sqrt(config.recoil_frequency / spectrum.frequencies)
    return LambDickeSet(cos_theta0 * spectrum.eigenvectors * scale[None, :])


def chain_modes(config: ChainConfig) -> ModeSpectrum:
    """Equilibrium, potential matrix and mode solve in one step."""
    eq = solve_equilibrium(config)
    return solve_modes(hessian(eq), config.axial_frequency)
