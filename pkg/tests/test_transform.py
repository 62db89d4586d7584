import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import frfband as fb

_component = st.floats(min_value=-100.0, max_value=100.0,
                       allow_nan=False, allow_infinity=False)


def _frf_values(m=11):
    return st.tuples(
        arrays(np.float64, m, elements=_component),
        arrays(np.float64, m, elements=_component),
    ).map(lambda p: p[0] + 1j * p[1])


def _unit_frf(grid, k, value):
    values = np.zeros(len(grid), dtype=complex)
    values[k] = value
    return fb.Frf(values)


class TestPirFromFrf:
    def test_real_unit_component(self, grid, tg):
        # H = 1 at 0.05 Hz renders cos(0.1 pi t); at t = 10 s that is -1
        pir = fb.pir_from_frf(_unit_frf(grid, 0, 1.0), grid, tg)
        expected = np.cos(2 * np.pi * 0.05 * tg.times)
        np.testing.assert_allclose(pir.samples, expected, atol=1e-12)
        i10 = int(round(10.0 * tg.sample_rate))
        assert pir.samples[i10] == pytest.approx(-1.0, abs=1e-9)

    def test_imag_unit_component(self, grid, tg):
        # H = j at 0.05 Hz renders -sin(0.1 pi t); at t = 5 s that is -1
        pir = fb.pir_from_frf(_unit_frf(grid, 0, 1j), grid, tg)
        expected = -np.sin(2 * np.pi * 0.05 * tg.times)
        np.testing.assert_allclose(pir.samples, expected, atol=1e-12)
        i5 = int(round(5.0 * tg.sample_rate))
        assert pir.samples[i5] == pytest.approx(-1.0, abs=1e-9)

    def test_zero_frf(self, grid, tg):
        pir = fb.pir_from_frf(fb.Frf(np.zeros(11, dtype=complex)), grid, tg)
        assert np.all(pir.samples == 0.0)

    def test_length_mismatch(self, grid, tg):
        with pytest.raises(fb.ValidationError):
            fb.pir_from_frf(fb.Frf(np.ones(5, dtype=complex)), grid, tg)

    def test_samples_are_real_floats(self, grid, tg, rng):
        h = fb.Frf(rng.standard_normal(11) + 1j * rng.standard_normal(11))
        pir = fb.pir_from_frf(h, grid, tg)
        assert pir.samples.dtype == np.float64

    @given(_frf_values())
    def test_periodicity(self, values):
        grid = fb.make_frequency_grid(fb.DEFAULT_FREQS)
        frf = fb.Frf(values)
        at = fb.pir_samples_at(frf, grid.freqs, [0.0, grid.period])
        assert at[1] == pytest.approx(at[0], abs=1e-9)

    @given(_frf_values(), _frf_values(),
           st.floats(-5, 5, allow_nan=False),
           st.floats(-5, 5, allow_nan=False))
    def test_linearity(self, v1, v2, a, b):
        grid = fb.make_frequency_grid(fb.DEFAULT_FREQS)
        tg = fb.make_time_grid(grid)
        combined = fb.pir_from_frf(fb.Frf(a * v1 + b * v2), grid, tg)
        parts = (a * fb.pir_from_frf(fb.Frf(v1), grid, tg).samples
                 + b * fb.pir_from_frf(fb.Frf(v2), grid, tg).samples)
        scale = max(1.0, np.max(np.abs(parts)))
        np.testing.assert_allclose(combined.samples, parts,
                                   atol=1e-12 * scale)


class TestFrfFromPir:
    @given(_frf_values())
    def test_round_trip(self, values):
        grid = fb.make_frequency_grid(fb.DEFAULT_FREQS)
        tg = fb.make_time_grid(grid)
        frf = fb.Frf(values)
        back = fb.frf_from_pir(fb.pir_from_frf(frf, grid, tg), grid, tg)
        assert np.max(np.abs(back.values - frf.values)) < 1e-9

    def test_zero_pir(self, grid, tg):
        back = fb.frf_from_pir(fb.Pir(np.zeros(tg.n_samples)), grid, tg)
        assert np.all(back.values == 0.0)

    def test_pure_cosine(self, grid, tg):
        pir = fb.Pir(np.cos(2 * np.pi * 0.05 * tg.times))
        back = fb.frf_from_pir(pir, grid, tg)
        assert back.values[0] == pytest.approx(1.0 + 0j, abs=1e-9)
        assert np.max(np.abs(back.values[1:])) < 1e-9

    def test_inclusive_grid_rejected(self, grid):
        tgi = fb.make_time_grid(grid, inclusive_endpoint=True)
        with pytest.raises(fb.AlignmentError):
            fb.frf_from_pir(fb.Pir(np.zeros(tgi.n_samples)), grid, tgi)

    def test_misaligned_grid_rejected(self, grid):
        # 439 samples at 22 Hz give a 22/439 Hz bin width, off every
        # grid frequency
        tg_bad = fb.TimeGrid(sample_rate=22.0, n_samples=439)
        assert not tg_bad.is_bin_aligned(grid)
        with pytest.raises(fb.AlignmentError):
            fb.frf_from_pir(fb.Pir(np.zeros(439)), grid, tg_bad)

    def test_length_mismatch(self, grid, tg):
        with pytest.raises(fb.ValidationError):
            fb.frf_from_pir(fb.Pir(np.zeros(10)), grid, tg)


class TestSpectrumAt:
    def test_zero_pir(self, grid, tg):
        out = fb.spectrum_at(fb.Pir(np.zeros(tg.n_samples)), tg, [0.3, 1.7])
        assert np.all(out == 0.0)

    def test_pure_cosine_at_grid_freq(self, grid, tg):
        pir = fb.Pir(np.cos(2 * np.pi * 0.05 * tg.times))
        out = fb.spectrum_at(pir, tg, [0.05])
        assert out[0] == pytest.approx(1.0 + 0j, abs=1e-9)

    def test_off_comb_gain_near_zero(self, grid, tg, rng):
        # between the comb peaks of a rendered FRF the projected gain
        # collapses toward zero: probe base-frequency multiples that are
        # not grid frequencies (off-comb DFT bins)
        h = fb.Frf(rng.standard_normal(11) + 1j * rng.standard_normal(11))
        pir = fb.pir_from_frf(h, grid, tg)
        probes = [0.1, 0.2, 0.25, 0.35, 1.0, 2.0]
        assert not set(probes) & set(grid.freqs)
        out = fb.spectrum_at(pir, tg, probes)
        max_gain = np.max(np.abs(h.values))
        assert np.max(np.abs(out)) < 0.05 * max_gain

    def test_nyquist_rejected(self, grid, tg):
        with pytest.raises(fb.AliasingError):
            fb.spectrum_at(fb.Pir(np.zeros(tg.n_samples)), tg, [11.0])

    def test_non_finite_rejected(self, grid, tg):
        with pytest.raises(fb.ValidationError):
            fb.spectrum_at(fb.Pir(np.zeros(tg.n_samples)), tg, [np.nan])

    def test_matches_frf_from_pir_on_bins(self, grid, tg, rng):
        h = fb.Frf(rng.standard_normal(11) + 1j * rng.standard_normal(11))
        pir = fb.pir_from_frf(h, grid, tg)
        via_spectrum = fb.spectrum_at(pir, tg, grid.freqs)
        via_inverse = fb.frf_from_pir(pir, grid, tg).values
        np.testing.assert_allclose(via_spectrum, via_inverse, atol=1e-12)


class TestPointwiseStats:
    def test_identical_pirs(self, rng):
        p = fb.Pir(rng.standard_normal(50))
        mean = fb.pointwise_mean([p, p])
        std = fb.pointwise_std([p, p])
        np.testing.assert_array_equal(mean.samples, p.samples)
        assert np.all(std == 0.0)

    def test_hand_computed_pair(self):
        p1 = fb.Pir([1.0])
        p2 = fb.Pir([3.0])
        assert fb.pointwise_mean([p1, p2]).samples[0] == 2.0
        assert fb.pointwise_std([p1, p2])[0] == pytest.approx(np.sqrt(2.0))

    def test_against_naive_oracle(self, rng):
        pirs = [fb.Pir(rng.standard_normal(30)) for _ in range(5)]
        mean = fb.pointwise_mean(pirs)
        std = fb.pointwise_std(pirs)
        for t in range(30):
            column = [p.samples[t] for p in pirs]
            naive_mean = sum(column) / 5
            naive_var = sum((x - naive_mean) ** 2 for x in column) / 4
            assert abs(mean.samples[t] - naive_mean) < 1e-12
            assert abs(std[t] - np.sqrt(naive_var)) < 1e-12

    def test_mean_accepts_single(self, rng):
        p = fb.Pir(rng.standard_normal(10))
        np.testing.assert_array_equal(fb.pointwise_mean([p]).samples,
                                      p.samples)

    def test_std_requires_two(self, rng):
        with pytest.raises(fb.ValidationError):
            fb.pointwise_std([fb.Pir(rng.standard_normal(10))])

    def test_empty_rejected(self):
        with pytest.raises(fb.ValidationError):
            fb.pointwise_mean([])

    def test_length_mismatch_rejected(self, rng):
        with pytest.raises(fb.ValidationError):
            fb.pointwise_std([fb.Pir(np.zeros(5)), fb.Pir(np.zeros(6))])

    def test_std_shift_invariance_and_scaling(self, rng):
        pirs = [fb.Pir(rng.standard_normal(20)) for _ in range(4)]
        std = fb.pointwise_std(pirs)
        shift = rng.standard_normal(20)
        shifted = [fb.Pir(p.samples + shift) for p in pirs]
        np.testing.assert_allclose(fb.pointwise_std(shifted), std, atol=1e-12)
        scaled = [fb.Pir(-2.5 * p.samples) for p in pirs]
        np.testing.assert_allclose(fb.pointwise_std(scaled), 2.5 * std,
                                   rtol=1e-12)


class TestContainers:
    def test_frf_rejects_non_finite(self):
        with pytest.raises(fb.ValidationError):
            fb.Frf([1.0, np.nan])

    def test_pir_rejects_non_finite(self):
        with pytest.raises(fb.ValidationError):
            fb.Pir([0.0, np.inf])

    def test_group_checks_member_lengths(self, grid):
        with pytest.raises(fb.ValidationError):
            fb.FrfGroup(grid=grid, members=(fb.Frf(np.ones(5, complex)),))

    def test_group_checks_label_count(self, grid):
        members = (fb.Frf(np.ones(11, complex)),) * 2
        with pytest.raises(fb.ValidationError):
            fb.FrfGroup(grid=grid, members=members, labels=("only-one",))

    def test_group_matrix(self, grid, rng):
        members = tuple(
            fb.Frf(rng.standard_normal(11) + 1j * rng.standard_normal(11))
            for _ in range(3)
        )
        g = fb.FrfGroup(grid=grid, members=members)
        mat = g.as_matrix()
        assert mat.shape == (3, 11)
        np.testing.assert_array_equal(mat[1], members[1].values)
