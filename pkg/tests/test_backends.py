"""Bitwise contract between the compiled and pure-Python kernels.

The two implementations must agree to the last bit, not merely within
tolerance, because result documents are hashed byte-for-byte.
"""
import numpy as np
import pytest

import frfband as fb
from frfband import _kernels_py
from frfband.backend import kernel_backend

try:
    from frfband import _kernels
except ImportError:
    _kernels = None

needs_compiled = pytest.mark.skipif(
    _kernels is None, reason="compiled kernels not built"
)


def _random_problem(rng, n1=7, n2=5, t=40, bs=13):
    y1 = rng.standard_normal((n1, t))
    y2 = rng.standard_normal((n2, t))
    cnt1 = rng.multinomial(n1, np.full(n1, 1.0 / n1), size=bs).astype(np.float64)
    cnt2 = rng.multinomial(n2, np.full(n2, 1.0 / n2), size=bs).astype(np.float64)
    idx1 = rng.integers(0, n1, size=n1)
    idx2 = rng.integers(0, n2, size=n2)
    return y1, y2, cnt1, cnt2, idx1, idx2


@needs_compiled
class TestKernelEquality:
    def test_diff_sigma_bitwise(self, rng):
        for _ in range(20):
            y1, y2, cnt1, cnt2, idx1, idx2 = _random_problem(rng)
            a = _kernels.diff_sigma(y1, y2, idx1, idx2, cnt1, cnt2)
            b = _kernels_py.diff_sigma(y1, y2, idx1, idx2, cnt1, cnt2)
            np.testing.assert_array_equal(a, b)

    def test_pivot_stat_bitwise(self, rng):
        for _ in range(20):
            y1, y2, cnt1, cnt2, idx1, idx2 = _random_problem(rng)
            xm = y1.mean(axis=0) - y2.mean(axis=0)
            a = _kernels.pivot_stat(y1, y2, xm, idx1, idx2, cnt1, cnt2, 1e-12)
            b = _kernels_py.pivot_stat(y1, y2, xm, idx1, idx2, cnt1, cnt2, 1e-12)
            assert a == b

    def test_pivot_stat_degenerate_flag(self):
        y1 = np.zeros((4, 8))
        y2 = np.zeros((3, 8))
        cnt1 = np.tile(np.array([4.0, 0.0, 0.0, 0.0]), (5, 1))
        cnt2 = np.tile(np.array([3.0, 0.0, 0.0]), (5, 1))
        idx = np.zeros(4, dtype=np.int64)
        args = (y1, y2, np.zeros(8), idx, idx[:3], cnt1, cnt2, 1e-12)
        assert _kernels.pivot_stat(*args) == (0.0, True)
        assert _kernels_py.pivot_stat(*args) == (0.0, True)


@needs_compiled
class TestFullRunEquality:
    def test_band_bitwise_across_backends(self, grid, tg, monkeypatch):
        g1 = fb.synth_group(fb.reference_frf(grid), grid, 0.1, 6, seed=3)
        g2 = fb.synth_group(fb.reference_frf(grid), grid, 0.1, 5, seed=4)
        params = fb.BootstrapParams(B=150, Bs=25, seed=12)

        import frfband.backend as backend

        results = {}
        for mod in (_kernels, _kernels_py):
            monkeypatch.setattr(backend, "diff_sigma", mod.diff_sigma)
            monkeypatch.setattr(backend, "pivot_stat", mod.pivot_stat)
            results[mod.BACKEND] = fb.confidence_band_difference(
                g1, g2, tg, params
            )
        a, b = results["cython"], results["python"]
        np.testing.assert_array_equal(a.avg.samples, b.avg.samples)
        np.testing.assert_array_equal(a.sigma, b.sigma)
        np.testing.assert_array_equal(a.stats, b.stats)
        assert a.cc == b.cc
        np.testing.assert_array_equal(a.band_upper, b.band_upper)
        np.testing.assert_array_equal(a.band_lower, b.band_lower)
        assert a.reject == b.reject


class TestThreadEquality:
    def test_threads_do_not_change_bytes(self, grid, tg):
        g1 = fb.synth_group(fb.reference_frf(grid), grid, 0.1, 6, seed=5)
        g2 = fb.synth_group(fb.reference_frf(grid), grid, 0.1, 6, seed=6)
        params = fb.BootstrapParams(B=200, Bs=20, seed=77)
        r1 = fb.confidence_band_difference(g1, g2, tg, params, threads=1)
        r4 = fb.confidence_band_difference(g1, g2, tg, params, threads=4)
        np.testing.assert_array_equal(r1.stats, r4.stats)
        np.testing.assert_array_equal(r1.band_upper, r4.band_upper)
        np.testing.assert_array_equal(r1.band_lower, r4.band_lower)
        assert r1.cc == r4.cc
        assert r1.reject == r4.reject


class TestAgainstNaiveResampling:
    def test_diff_sigma_matches_bruteforce(self, rng):
        # the counts formulation must agree with literally gathering rows
        n1, n2, t, bs = 6, 4, 12, 9
        y1 = rng.standard_normal((n1, t))
        y2 = rng.standard_normal((n2, t))
        picks1 = rng.integers(0, n1, size=(bs, n1))
        picks2 = rng.integers(0, n2, size=(bs, n2))
        cnt1 = np.zeros((bs, n1))
        cnt2 = np.zeros((bs, n2))
        for b in range(bs):
            cnt1[b] = np.bincount(picks1[b], minlength=n1)
            cnt2[b] = np.bincount(picks2[b], minlength=n2)
        from frfband.backend import diff_sigma
        got = diff_sigma(y1, y2, np.arange(n1), np.arange(n2), cnt1, cnt2)
        diffs = np.empty((bs, t))
        for b in range(bs):
            diffs[b] = y1[picks1[b]].mean(axis=0) - y2[picks2[b]].mean(axis=0)
        expected = diffs.std(axis=0, ddof=1)
        np.testing.assert_allclose(got, expected, atol=1e-12)


class TestResampleIndices:
    def test_deterministic(self):
        s1 = fb.philox_stream(3, fb.PURPOSE_PIVOT, 0)
        s2 = fb.philox_stream(3, fb.PURPOSE_PIVOT, 0)
        np.testing.assert_array_equal(
            fb.resample_indices(8, s1), fb.resample_indices(8, s2)
        )

    def test_range_and_shape(self):
        idx = fb.resample_indices(9, fb.philox_stream(0, 0, 0))
        assert idx.shape == (9,)
        assert idx.min() >= 0 and idx.max() < 9

    def test_marginal_uniformity(self):
        # index frequencies over many draws stay within 3 sigma of uniform
        n, reps = 5, 4000
        stream = fb.philox_stream(11, fb.PURPOSE_PIVOT, 123)
        draws = np.concatenate(
            [fb.resample_indices(n, stream) for _ in range(reps)]
        )
        counts = np.bincount(draws, minlength=n)
        expected = len(draws) / n
        sigma = np.sqrt(len(draws) * (1 / n) * (1 - 1 / n))
        assert np.all(np.abs(counts - expected) < 3.5 * sigma)


class TestBackendSelection:
    def test_reported_backend_valid(self):
        assert kernel_backend() in ("cython", "python")

    def test_python_module_importable(self):
        assert _kernels_py.BACKEND == "python"
