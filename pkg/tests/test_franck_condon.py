import numpy as np
import pytest

from ioncool import (
    ChainConfig,
    EnergyGrid,
    FockState,
    average_coupling_bruteforce,
    chain_modes,
    count_in_band,
    fc_abs2_matrix,
    fc_multi,
    fc_single,
    ld_weights,
    moments_bruteforce,
)
from ioncool.franck_condon import TruncationError, decorrelation_diagnostic
from ioncool.spectrum import EnumerationBudgetError


def mp_abs2_oracle(n, l, eta):
    """Arbitrary-precision |<l|exp(i eta (a+a^dag))|n>|^2."""
    import mpmath as mp

    with mp.workdps(60):
        r, d = min(n, l), abs(n - l)
        x = mp.mpf(eta) ** 2
        val = (
            mp.e ** (-x)
            * mp.factorial(r)
            / mp.factorial(r + d)
            * x**d
            * mp.laguerre(r, d, x) ** 2
        )
        return float(val)


def wavefunction_overlap_oracle(n, l, eta, points=4001):
    """Displaced-oscillator overlap by direct quadrature of the
    position-space wavefunctions: exp(i eta (a+a^dag)) = exp(i k x) with
    k = eta sqrt(2) in units m = nu = hbar = 1."""
    from numpy.polynomial.hermite import hermval
    from scipy.special import gammaln

    x = np.linspace(-25, 25, points)

    def psi(m):
        c = np.zeros(m + 1)
        c[m] = 1.0
        log_norm = -0.5 * (m * np.log(2.0) + gammaln(m + 1) + 0.5 * np.log(np.pi))
        return hermval(x, c) * np.exp(log_norm - 0.5 * x * x)

    integrand = np.conj(psi(l)) * np.exp(1j * eta * np.sqrt(2.0) * x) * psi(n)
    return np.trapezoid(integrand, x)


class TestFcSingle:
    def test_vacuum_gaussian_factor(self):
        assert fc_single(0, 0, 0.3) == pytest.approx(np.exp(-0.045))

    def test_diagonal_with_first_laguerre(self):
        assert fc_single(1, 1, 0.5) == pytest.approx(np.exp(-0.125) * 0.75)

    def test_zero_displacement_is_identity(self):
        assert fc_single(7, 7, 0.0) == 1.0
        assert fc_single(7, 9, 0.0) == 0.0

    def test_negative_occupation_rejected(self):
        with pytest.raises(ValueError):
            fc_single(-1, 0, 0.1)

    @pytest.mark.parametrize("eta", [0.1, 0.5, 1.0, 2.0])
    def test_against_arbitrary_precision_oracle(self, eta, rng):
        pairs = {(int(a), int(b)) for a, b in rng.integers(0, 31, size=(40, 2))}
        pairs |= {(0, 0), (30, 30), (0, 30), (17, 22)}
        for n, l in pairs:
            mine = abs(fc_single(n, l, eta)) ** 2
            ref = mp_abs2_oracle(n, l, eta)
            assert mine == pytest.approx(ref, rel=1e-9, abs=1e-300), (n, l, eta)

    @pytest.mark.parametrize("n,l,eta", [(1, 1, 0.5), (0, 3, 0.8), (5, 2, 1.1)])
    def test_against_displaced_wavefunction_overlap(self, n, l, eta):
        ref = wavefunction_overlap_oracle(n, l, eta)
        mine = fc_single(n, l, eta)
        assert mine == pytest.approx(ref, abs=1e-8)

    def test_parity_of_magnitudes(self, rng):
        for _ in range(50):
            n, l = (int(v) for v in rng.integers(0, 60, size=2))
            eta = float(rng.uniform(0.05, 1.8))
            assert abs(fc_single(n, l, eta)) == abs(fc_single(l, n, eta))

    def test_phase_is_power_of_i(self):
        # d = 1 transitions carry a single factor of i
        amp = fc_single(0, 1, 0.4)
        assert amp.real == 0.0 and amp.imag != 0.0
        amp2 = fc_single(0, 2, 0.4)
        assert amp2.imag == 0.0 and amp2.real < 0

    def test_deep_oscillatory_region_stays_bounded(self):
        # very large quantum numbers: |amplitude| <= 1 and finite
        for n, l in [(150, 150), (200, 180), (120, 260)]:
            a = abs(fc_single(n, l, 1.3))
            assert np.isfinite(a) and a <= 1.0


class TestFcMatrix:
    def test_matches_scalar_entries(self):
        w = fc_abs2_matrix(0.7, 48)
        for n, l in [(0, 0), (3, 10), (31, 30), (47, 47), (12, 40)]:
            assert w[n, l] == pytest.approx(abs(fc_single(n, l, 0.7)) ** 2, rel=1e-12)

    def test_unitarity_rows(self):
        w = fc_abs2_matrix(0.6, 200)
        assert np.abs(w[:80].sum(axis=1) - 1.0).max() < 1e-11

    def test_identity_at_zero(self):
        assert np.array_equal(fc_abs2_matrix(0.0, 8), np.eye(8))


class TestFcMulti:
    def test_zero_displacement_identity(self):
        assert fc_multi((1, 2, 3), (1, 2, 3), [0.0, 0.0, 0.0]) == 1.0
        assert fc_multi((1, 2, 3), (1, 2, 4), [0.0, 0.0, 0.0]) == 0.0

    def test_factorizes_over_modes(self):
        a = fc_multi((2, 5), (3, 4), [0.3, 0.6])
        b = fc_single(2, 3, 0.3) * fc_single(5, 4, 0.6)
        assert a == pytest.approx(b)

    def test_completeness(self):
        # sum over final states of |amplitude|^2 converges to 1
        etas = [0.4, 0.7]
        w1 = fc_abs2_matrix(etas[0], 64)
        w2 = fc_abs2_matrix(etas[1], 64)
        total = float(np.outer(w1[3], w2[5]).sum())
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fc_multi((1, 2), (1, 2, 3), [0.1, 0.2])


class TestMoments:
    def test_first_moment_per_ion_is_recoil(self, rng):
        cfg = ChainConfig(3, recoil_frequency=0.02)
        spec = chain_modes(cfg)
        for j in range(3):
            st = FockState(tuple(int(v) for v in rng.integers(0, 40, size=3)))
            ct = float(rng.uniform(0.3, 1.0))
            m1, _ = moments_bruteforce(st, spec, cfg, ct, ion=j)
            assert m1 == pytest.approx(0.02 * ct**2, rel=1e-9)

    def test_second_moment_ion_averaged(self, rng):
        for n in (1, 2, 3):
            cfg = ChainConfig(n, recoil_frequency=0.015)
            spec = chain_modes(cfg)
            st = FockState(tuple(int(v) for v in rng.integers(0, 50, size=n)))
            ct = float(rng.uniform(0.3, 1.0))
            m1, m2 = moments_bruteforce(st, spec, cfg, ct)
            r = 0.015 * ct**2
            expected = 2 * r * st.energy(spec) / n + r * r
            assert m2 == pytest.approx(expected, rel=1e-6)

    def test_ground_state_single_ion_example(self):
        # m2 = 2 w_R (nu/2) + w_R^2 for the ground state at cos(theta) = 1
        cfg = ChainConfig(1, recoil_frequency=0.01)
        spec = chain_modes(cfg)
        m1, m2 = moments_bruteforce(FockState((0,)), spec, cfg, 1.0)
        assert m1 == pytest.approx(0.01, rel=1e-9)
        assert m2 == pytest.approx(2 * 0.01 * 0.5 + 0.01**2, rel=1e-9)

    def test_truncation_failure_reports_completeness(self):
        cfg = ChainConfig(1, recoil_frequency=2.0)
        spec = chain_modes(cfg)
        with pytest.raises(TruncationError) as exc:
            moments_bruteforce(FockState((40,)), spec, cfg, 1.0, max_cap=42)
        assert 0 < exc.value.achieved < 1.0 - 1e-10


class TestShellCoupling:
    def test_identity_at_zero_projection(self, spec3):
        cfg = ChainConfig(3, recoil_frequency=0.5)
        grid = EnergyGrid.for_spectrum(spec3, 2.0, 30.0)
        e = float(grid.centers[8])
        d = count_in_band(spec3, grid.edges[8], grid.edges[9])
        coupling = average_coupling_bruteforce(e, e, grid, spec3, cfg, 0.0)
        assert coupling.q == pytest.approx(1.0 / d, rel=1e-12)

    def test_warns_when_shell_occupancy_is_marginal(self, spec3):
        cfg = ChainConfig(3, recoil_frequency=0.5)
        grid = EnergyGrid.for_spectrum(spec3, 2.0, 30.0)
        e = float(grid.centers[0])  # bottom shell holds only a few states
        with pytest.warns(UserWarning, match="ergodic"):
            average_coupling_bruteforce(e, e, grid, spec3, cfg, 0.0)

    def test_symmetric_in_shells(self, spec2):
        cfg = ChainConfig(2, recoil_frequency=0.8)
        grid = EnergyGrid.for_spectrum(spec2, 3.0, 40.0)
        a = average_coupling_bruteforce(24.0, 30.0, grid, spec2, cfg, 1.0)
        b = average_coupling_bruteforce(30.0, 24.0, grid, spec2, cfg, 1.0)
        assert a.q == pytest.approx(b.q, rel=1e-12)

    def test_pair_budget_enforced(self, spec2):
        cfg = ChainConfig(2, recoil_frequency=0.8)
        grid = EnergyGrid.for_spectrum(spec2, 3.0, 40.0)
        with pytest.raises(EnumerationBudgetError):
            average_coupling_bruteforce(24.0, 30.0, grid, spec2, cfg, 1.0, pair_budget=10)

    def test_shell_energy_outside_grid_rejected(self, spec2):
        cfg = ChainConfig(2, recoil_frequency=0.8)
        grid = EnergyGrid.for_spectrum(spec2, 3.0, 40.0)
        with pytest.raises(ValueError):
            average_coupling_bruteforce(24.0, 55.0, grid, spec2, cfg, 1.0)


class TestLDWeights:
    def test_single_ion_example(self):
        cfg = ChainConfig(1, recoil_frequency=0.01)
        spec = chain_modes(cfg)
        w = ld_weights(FockState((5,)), spec, cfg, 1.0)
        assert w.blue[0] == pytest.approx(0.06)
        assert w.red[0] == pytest.approx(0.05)

    def test_weights_sum_to_one(self, spec3):
        cfg = ChainConfig(3, recoil_frequency=0.004)
        w = ld_weights(FockState((4, 1, 7)), spec3, cfg, 0.8)
        assert w.total() == pytest.approx(1.0, abs=1e-15)

    def test_vacuum_has_no_red_sidebands(self, spec3):
        cfg = ChainConfig(3, recoil_frequency=0.004)
        w = ld_weights(FockState((0, 0, 0)), spec3, cfg, 1.0)
        assert np.all(w.red == 0.0)

    def test_blue_weight_tracks_exact_coefficient(self):
        cfg = ChainConfig(1, recoil_frequency=0.01)
        spec = chain_modes(cfg)
        w = ld_weights(FockState((5,)), spec, cfg, 1.0)
        exact = abs(fc_single(5, 6, 0.1)) ** 2
        assert abs(w.blue[0] - exact) < 2 * (0.1**2 * 6) ** 2

    def test_warns_outside_lamb_dicke(self):
        cfg = ChainConfig(1, recoil_frequency=0.25)
        spec = chain_modes(cfg)
        with pytest.warns(UserWarning, match="Lamb-Dicke"):
            ld_weights(FockState((2,)), spec, cfg, 1.0)


class TestDecorrelationDiagnostic:
    def test_reports_both_sums(self, spec2):
        cfg = ChainConfig(2, recoil_frequency=0.3)
        correlated, decorrelated = decorrelation_diagnostic(
            FockState((4, 3)), FockState((5, 3)), 8.0, 10.0, spec2, cfg, 1.0, 0.6
        )
        # no tolerance asserted: the replacement is an uncontrolled
        # approximation; both sums must simply be finite and comparable
        assert np.isfinite(correlated) and np.isfinite(decorrelated)
        assert correlated > 0 and decorrelated > 0
