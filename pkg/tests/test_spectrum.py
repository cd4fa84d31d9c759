import itertools

import numpy as np
import pytest

from ioncool import (
    ChainConfig,
    EnergyGrid,
    chain_modes,
    count_in_band,
    count_states,
    smooth_density,
    states_in_band,
)
from ioncool.ion_chain import ModeSpectrum
from ioncool.spectrum import EnumerationBudgetError


def box_census_oracle(frequencies, edges):
    """Independent enumeration: plain scan of the full occupation box."""
    frequencies = np.asarray(frequencies, float)
    ground = 0.5 * frequencies.sum()
    top = edges[-1]
    ranges = [range(int((top - ground) / nu) + 2) for nu in frequencies]
    counts = np.zeros(len(edges) - 1, dtype=int)
    for occ in itertools.product(*ranges):
        e = ground + float(np.dot(occ, frequencies))
        k = np.searchsorted(edges, e, side="right") - 1
        if 0 <= k < len(counts):
            counts[k] += 1
    return counts


@pytest.fixture(scope="module")
def single_mode():
    return ModeSpectrum(np.array([1.0]), np.array([[1.0]]))


class TestEnergyGrid:
    def test_rejects_bad_spacing(self):
        with pytest.raises(ValueError):
            EnergyGrid(0.5, np.array([1.0, 1.5, 2.1]))

    def test_rejects_nonpositive_width(self):
        with pytest.raises(ValueError):
            EnergyGrid(0.0, np.array([1.0]))

    def test_for_spectrum_starts_at_or_above_ground(self, spec3):
        grid = EnergyGrid.for_spectrum(spec3, 0.2, 10.0)
        assert grid.centers[0] >= spec3.ground_energy
        assert grid.centers[0] - 0.2 < spec3.ground_energy
        assert grid.centers[-1] <= 10.0 + 1e-12

    def test_edges_and_lookup(self, spec3):
        grid = EnergyGrid.for_spectrum(spec3, 0.5, 12.0)
        assert len(grid.edges) == grid.n_shells + 1
        k = grid.index_of(grid.centers[3])
        assert k == 3
        # half-open: the left edge belongs to the shell, the right does not
        assert grid.index_of(grid.edges[3]) == 3
        assert grid.index_of(grid.edges[-1]) == -1


class TestCensus:
    def test_single_oscillator_shell_holds_one_state(self, single_mode):
        grid = EnergyGrid(0.5, np.array([10.5]))
        census = count_states(single_mode, grid)
        assert census.counts.tolist() == [1]  # only n = 10

    def test_single_oscillator_misaligned_shell_is_empty(self, single_mode):
        grid = EnergyGrid(0.4, np.array([10.0]))
        # states sit at half-integers; [9.8, 10.2) contains none
        assert count_states(single_mode, grid).counts.tolist() == [0]

    @pytest.mark.parametrize("n", [2, 3])
    def test_matches_independent_box_oracle(self, n):
        spec = chain_modes(ChainConfig(n))
        grid = EnergyGrid.for_spectrum(spec, 0.3, 18.0)
        census = count_states(spec, grid)
        oracle = box_census_oracle(spec.frequencies, grid.edges)
        assert np.array_equal(census.counts, oracle)

    def test_total_equals_band_count(self, spec3):
        grid = EnergyGrid.for_spectrum(spec3, 0.2, 25.0)
        census = count_states(spec3, grid)
        assert census.total == count_in_band(spec3, grid.edges[0], grid.edges[-1])

    def test_partition_additivity(self, spec3):
        lo, hi = 2.0, 21.3
        total = count_in_band(spec3, lo, hi)
        for mid in np.linspace(lo + 0.1, hi - 0.1, 7):
            assert count_in_band(spec3, lo, mid) + count_in_band(spec3, mid, hi) == total

    def test_half_shell_shift_preserves_total(self, spec3):
        # two interleaved grids sharing outer edges partition the same states
        lo, hi, de = 2.5, 22.5, 0.4
        edges_a = np.arange(lo, hi + de / 2, de)
        edges_b = np.concatenate([[lo], np.arange(lo + de / 2, hi - de / 4, de), [hi]])
        count_a = sum(count_in_band(spec3, a, b) for a, b in zip(edges_a[:-1], edges_a[1:]))
        count_b = sum(count_in_band(spec3, a, b) for a, b in zip(edges_b[:-1], edges_b[1:]))
        assert count_a == count_b == count_in_band(spec3, lo, hi)

    def test_budget_error_names_cap(self, spec3):
        grid = EnergyGrid.for_spectrum(spec3, 0.2, 28.0)
        with pytest.raises(EnumerationBudgetError, match="500"):
            count_states(spec3, grid, state_budget=500)

    def test_states_in_band_members(self, spec2):
        members = states_in_band(spec2, 5.0, 6.0)
        assert members.shape[1] == 2
        energies = spec2.ground_energy + members @ spec2.frequencies
        assert np.all((energies >= 5.0) & (energies < 6.0))
        assert len(members) == count_in_band(spec2, 5.0, 6.0)


class TestSmoothDensity:
    def test_single_mode_constant(self, single_mode):
        assert smooth_density(single_mode, 3.7) == pytest.approx(1.0)
        assert smooth_density(single_mode, 0.0) == pytest.approx(1.0)

    def test_power_law_scaling(self, spec3):
        assert smooth_density(spec3, 16.0) / smooth_density(spec3, 8.0) == pytest.approx(
            2.0 ** (3 - 1), rel=1e-12
        )

    def test_value_against_direct_formula(self, spec2):
        e = 9.0
        expected = e / np.prod(spec2.frequencies)
        assert smooth_density(spec2, e) == pytest.approx(expected, rel=1e-12)

    def test_large_mode_count_stays_finite(self):
        spec = ModeSpectrum(np.linspace(1.0, 3.0, 60), np.eye(60))
        val = smooth_density(spec, 200.0)
        assert np.isfinite(val) and val > 0

    def test_negative_energy_rejected(self, spec3):
        with pytest.raises(ValueError):
            smooth_density(spec3, -1.0)

    def test_tracks_census_where_dense(self, spec3):
        grid = EnergyGrid.for_spectrum(spec3, 0.2, 30.0)
        census = count_states(spec3, grid)
        g_de = smooth_density(spec3, grid.centers) * grid.delta_e
        top = grid.centers >= 25.0
        rel = np.abs(census.counts[top] - g_de[top]) / census.counts[top]
        assert rel.mean() < 0.1
