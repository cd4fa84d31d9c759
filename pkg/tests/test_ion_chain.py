import numpy as np
import pytest
from scipy.optimize import brentq

from ioncool import (
    ChainConfig,
    EquilibriumPositions,
    ModeSpectrum,
    chain_modes,
    hessian,
    lamb_dicke,
    solve_equilibrium,
    solve_modes,
)
from ioncool.ion_chain import (
    NotAnEquilibriumError,
    UnstableModesError,
    potential_gradient,
)


def chain_potential(u):
    d = np.abs(u[:, None] - u[None, :])
    iu = np.triu_indices(len(u), 1)
    return 0.5 * np.sum(u**2) + np.sum(1.0 / d[iu])


class TestEquilibrium:
    def test_single_ion_sits_at_origin(self):
        assert solve_equilibrium(ChainConfig(1)).positions == pytest.approx([0.0])

    def test_two_ions_match_scalar_force_balance(self):
        # independent oracle: root of z - 1/(2z)^2 = 0
        z = brentq(lambda z: z - 1.0 / (2 * z) ** 2, 0.1, 2.0, xtol=1e-14)
        u = solve_equilibrium(ChainConfig(2)).positions
        assert u == pytest.approx([-z, z], abs=1e-12)
        assert u == pytest.approx([-0.62996, 0.62996], abs=1e-5)

    def test_three_ions_symmetric_about_center(self):
        u = solve_equilibrium(ChainConfig(3)).positions
        assert u[1] == pytest.approx(0.0, abs=1e-12)
        assert u[0] == pytest.approx(-u[2], abs=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 5, 8, 12])
    def test_gradient_vanishes_and_sorted(self, n):
        u = solve_equilibrium(ChainConfig(n)).positions
        assert np.max(np.abs(potential_gradient(u))) < 1e-12
        assert np.all(np.diff(u) > 0)

    @pytest.mark.parametrize("n", [2, 4, 7, 10])
    def test_antisymmetry(self, n):
        u = solve_equilibrium(ChainConfig(n)).positions
        assert np.max(np.abs(u + u[::-1])) < 1e-12

    def test_equilibrium_is_a_potential_minimum(self):
        u = solve_equilibrium(ChainConfig(4)).positions
        base = chain_potential(u)
        rng = np.random.default_rng(1)
        for _ in range(20):
            du = rng.normal(0, 1e-3, size=4)
            assert chain_potential(u + du) > base

    def test_invalid_config_rejected(self):
        with pytest.raises(ValueError):
            ChainConfig(0)
        with pytest.raises(ValueError):
            ChainConfig(2, recoil_frequency=-0.1)
        with pytest.raises(ValueError):
            ChainConfig(2, axial_frequency=0.0)


class TestHessian:
    def test_single_ion_trap_curvature(self):
        v = hessian(solve_equilibrium(ChainConfig(1)))
        assert v.shape == (1, 1) and v[0, 0] == pytest.approx(1.0)

    def test_two_ion_eigenvalues_analytic(self):
        # d = 2 (1/4)^(1/3) gives 2/d^3 = 1: V = [[2, -1], [-1, 2]],
        # eigenvalues via trace/determinant
        v = hessian(solve_equilibrium(ChainConfig(2)))
        tr, det = np.trace(v), np.linalg.det(v)
        disc = np.sqrt(tr**2 - 4 * det)
        lam = sorted([(tr - disc) / 2, (tr + disc) / 2])
        assert lam == pytest.approx([1.0, 3.0], abs=1e-10)

    @pytest.mark.parametrize("n", [2, 3, 6])
    def test_symmetric_exactly(self, n):
        v = hessian(solve_equilibrium(ChainConfig(n)))
        assert np.array_equal(v, v.T)

    def test_positive_definite(self):
        v = hessian(solve_equilibrium(ChainConfig(5)))
        assert np.all(np.linalg.eigvalsh(v) > 0)

    def test_rejects_non_equilibrium_with_residual(self):
        bad = EquilibriumPositions(np.array([-0.5, 0.5]))
        with pytest.raises(NotAnEquilibriumError) as exc:
            hessian(bad)
        assert exc.value.residual > 1e-10

    def test_matches_finite_differences_of_potential(self):
        eq = solve_equilibrium(ChainConfig(4))
        v = hessian(eq)
        u0, h = eq.positions, 1e-4
        num = np.zeros_like(v)
        for i in range(4):
            for j in range(4):
                for si, sj, w in ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
                    du = np.zeros(4)
                    du[i] += si * h
                    du[j] += sj * h
                    num[i, j] += w * chain_potential(u0 + du)
        num /= 4 * h * h
        assert np.max(np.abs(num - v)) < 1e-6


class TestModes:
    def test_three_ion_frequencies(self, spec3):
        ref = np.array([1.0, 1.7321, 2.4083])
        assert np.max(np.abs(spec3.frequencies - ref) / ref) < 1e-3

    def test_two_ion_frequencies(self, spec2):
        assert spec2.frequencies == pytest.approx([1.0, np.sqrt(3.0)], rel=1e-12)

    def test_single_ion(self):
        spec = chain_modes(ChainConfig(1))
        assert spec.frequencies == pytest.approx([1.0])
        assert spec.eigenvectors[0, 0] == pytest.approx(1.0)

    def test_orthonormal_and_ascending(self):
        spec = chain_modes(ChainConfig(7))
        n = spec.n_modes
        assert np.max(np.abs(spec.eigenvectors.T @ spec.eigenvectors - np.eye(n))) < 1e-12
        assert np.all(np.diff(spec.frequencies) > 0)

    def test_com_mode_uniform(self):
        spec = chain_modes(ChainConfig(6))
        assert spec.eigenvectors[:, 0] == pytest.approx(np.full(6, 1 / np.sqrt(6)), abs=1e-12)
        assert spec.frequencies[0] == pytest.approx(1.0, abs=1e-12)

    def test_sign_convention_deterministic(self):
        spec = chain_modes(ChainConfig(5))
        for a in range(5):
            col = spec.eigenvectors[:, a]
            assert col[np.argmax(np.abs(col))] > 0

    def test_axial_frequency_scales_spectrum(self):
        spec = chain_modes(ChainConfig(3, axial_frequency=2.5))
        base = chain_modes(ChainConfig(3))
        assert spec.frequencies == pytest.approx(2.5 * base.frequencies)

    def test_rejects_unstable_matrix(self):
        with pytest.raises(UnstableModesError):
            solve_modes(np.array([[-1.0]]))

    def test_rejects_asymmetric_matrix(self):
        with pytest.raises(ValueError):
            solve_modes(np.array([[1.0, 0.2], [0.1, 1.0]]))

    def test_perturbed_positions_shift_frequencies_linearly(self):
        eq = solve_equilibrium(ChainConfig(3))
        v0 = hessian(eq)
        f0 = solve_modes(v0).frequencies
        from ioncool.ion_chain import _hessian_matrix

        shifts = []
        for eps in (1e-3, 5e-4):
            u = eq.positions + eps * np.array([1.0, -0.4, 0.1])
            f = np.sqrt(np.linalg.eigvalsh(_hessian_matrix(u)))
            shifts.append(np.max(np.abs(f - f0)))
        assert shifts[0] < 0.05
        assert shifts[1] < 0.6 * shifts[0]  # shrinks with eps


class TestLambDicke:
    def test_single_ion_value(self):
        cfg = ChainConfig(1, recoil_frequency=0.01)
        spec = chain_modes(cfg)
        eta = lamb_dicke(spec, cfg, 1.0).eta
        assert eta.shape == (1, 1) and eta[0, 0] == pytest.approx(0.1)

    @pytest.mark.parametrize("cos_theta", [1.0, 0.7, -0.4])
    def test_sum_rule(self, cos_theta):
        cfg = ChainConfig(5, recoil_frequency=0.03)
        spec = chain_modes(cfg)
        eta = lamb_dicke(spec, cfg, cos_theta).eta
        target = 0.03 * cos_theta**2 / spec.frequencies
        assert np.max(np.abs((eta**2).sum(axis=0) - target)) < 1e-12

    def test_orthogonal_laser_decouples(self, spec3):
        cfg = ChainConfig(3, recoil_frequency=0.05)
        assert np.all(lamb_dicke(spec3, cfg, 0.0).eta == 0)

    def test_projection_bounds(self, spec3):
        with pytest.raises(ValueError):
            lamb_dicke(spec3, ChainConfig(3), 1.3)


class TestTypeValidation:
    def test_positions_must_increase(self):
        with pytest.raises(ValueError):
            EquilibriumPositions(np.array([0.3, -0.3]))

    def test_spectrum_rejects_non_orthonormal(self):
        with pytest.raises(ValueError):
            ModeSpectrum(np.array([1.0, 2.0]), np.array([[1.0, 0.1], [0.0, 1.0]]))

    def test_spectrum_rejects_unsorted(self):
        b = np.eye(2)
        with pytest.raises(ValueError):
            ModeSpectrum(np.array([2.0, 1.0]), b)

    def test_ground_energy(self, spec3):
        assert spec3.ground_energy == pytest.approx(0.5 * spec3.frequencies.sum())
