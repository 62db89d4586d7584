"""Nested pivotized bootstrap confidence bands on group mean differences.

The test: given two groups of FRFs, render every member as a
pseudo-impulse-response, take the difference of the group mean curves, and
build a simultaneous confidence band around it.  The null hypothesis (equal
group means) is rejected when the zero line exits the band anywhere.

Band construction follows the nested scheme: the band half-width is the
bootstrap pointwise std of the mean difference scaled by a critical
constant, and the constant is the empirical alpha-quantile of B pivot
statistics, each the maximum over time of |observed difference - resampled
difference| divided by a pointwise std estimated from Bs nested resamples
of that iteration's resampled groups.  Pivotizing by the inner std is what
lets one constant cover the whole curve at the target level.

Every random draw derives from (seed, purpose, iteration index), so results
are identical for any thread count and any execution order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import ValidationError
from .grids import TimeGrid
from .streams import PURPOSE_BAND_SIGMA, PURPOSE_PIVOT, philox_stream
from .transform import FrfGroup, Pir, pir_from_frf, pointwise_mean, spectrum_at

QUANTILE_METHODS = ("order", "histogram")

# Guard on ceil(alpha * B): the float product can land a hair above the
# exact integer (e.g. 0.95 * 100) and ceil must not overshoot it.
_CEIL_EPS = 1e-12

# Bins of the histogram-based quantile compatibility mode.
_HIST_BINS = 1000


@dataclass(frozen=True)
class BootstrapParams:
    """Parameters of the nested bootstrap band.

    alpha: simultaneous confidence level as a fraction in (0, 1).
    B: outer bootstrap replications (>= 100).
    Bs: nested replications estimating each pointwise std (>= 2).
    seed: integer stream seed; equal seeds give bitwise-equal results.
    sigma_floor: relative floor under which a pointwise std is treated as
        zero and excluded from the max (see max_pivot_statistic).
    quantile_method: 'order' for the order statistic, 'histogram' for the
        cumulative-histogram compatibility mode.
    """

    alpha: float = 0.95
    B: int = 10_000
    Bs: int = 200
    seed: int = 0
    sigma_floor: float = 1e-12
    quantile_method: str = "order"

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValidationError(f"alpha must be in (0, 1), got {self.alpha!r}")
        if self.B < 100:
            raise ValidationError(f"B must be >= 100, got {self.B!r}")
        if self.Bs < 2:
            raise ValidationError(f"Bs must be >= 2, got {self.Bs!r}")
        if not (0.0 <= self.sigma_floor < 1.0):
            raise ValidationError(
                f"sigma_floor must be in [0, 1), got {self.sigma_floor!r}"
            )
        if self.quantile_method not in QUANTILE_METHODS:
            raise ValidationError(
                f"quantile_method must be one of {QUANTILE_METHODS}, "
                f"got {self.quantile_method!r}"
            )


@dataclass(frozen=True)
class Crossing:
    """Maximal run of consecutive samples where zero is outside the band."""

    t_start: float
    t_end: float
    n_samples: int


@dataclass(frozen=True)
class BandResult:
    """Confidence band on the difference of group mean curves.

    band_upper = avg + cc * sigma and band_lower = avg - cc * sigma hold
    exactly (same floating-point expression).  reject is true iff crossings
    is non-empty iff the zero line exits the band at some sample.
    degenerate marks data whose resamples carried no variance (the band
    collapses to the mean difference; no NaN is produced).
    """

    avg: Pir
    sigma: np.ndarray
    cc: float
    band_upper: np.ndarray
    band_lower: np.ndarray
    stats: np.ndarray
    reject: bool
    crossings: tuple
    degenerate: bool = False


def resample_indices(n, rng_stream) -> np.ndarray:
    """n independent uniform draws from {0..n-1} (resampling with replacement)."""
    if n < 1:
        raise ValidationError(f"group size must be >= 1, got {n!r}")
    return rng_stream.integers(0, n, size=int(n), dtype=np.int64)


def diff_of_means(g1, g2) -> Pir:
    """Difference of the pointwise mean curves of two groups of PIRs."""
    m1 = pointwise_mean(g1)
    m2 = pointwise_mean(g2)
    if len(m1) != len(m2):
        raise ValidationError(
            f"groups have different sample lengths: {len(m1)} vs {len(m2)}"
        )
    return Pir(m1.samples - m2.samples)


def _identity_indices(n):
    return np.arange(n, dtype=np.int64)


def _counts(nidx, n):
    """Per-replicate draw counts of each row, as float64 for the kernels."""
    bs = nidx.shape[0]
    offsets = np.arange(bs, dtype=np.int64)[:, None] * n
    flat = (nidx + offsets).ravel()
    return np.bincount(flat, minlength=bs * n).reshape(bs, n).astype(np.float64)


def _draw_nested_counts(rng, n1, n2, bs):
    # draw order is part of the result contract: group 1 before group 2
    nidx1 = rng.integers(0, n1, size=(bs, n1), dtype=np.int64)
    nidx2 = rng.integers(0, n2, size=(bs, n2), dtype=np.int64)
    return _counts(nidx1, n1), _counts(nidx2, n2)


def bootstrap_sigma(g1, g2, Bs, rng_stream) -> np.ndarray:
    """Pointwise std of the mean difference over Bs resamples of both groups.

    Each replicate independently resamples both groups with replacement and
    takes the difference of the resampled means; the std uses 1/(Bs-1).
    """
    if Bs < 2:
        raise ValidationError(f"Bs must be >= 2, got {Bs!r}")
    y1 = _pir_matrix(g1)
    y2 = _pir_matrix(g2)
    if y1.shape[1] != y2.shape[1]:
        raise ValidationError(
            f"groups have different sample lengths: {y1.shape[1]} vs {y2.shape[1]}"
        )
    if y1.shape[0] < 2 or y2.shape[0] < 2:
        raise ValidationError("both groups need at least 2 members")
    cnt1, cnt2 = _draw_nested_counts(rng_stream, y1.shape[0], y2.shape[0], int(Bs))
    return backend.diff_sigma(
        y1, y2, _identity_indices(y1.shape[0]), _identity_indices(y2.shape[0]),
        cnt1, cnt2,
    )


def _pir_matrix(pirs):
    pirs = list(pirs)
    if not pirs:
        raise ValidationError("group must not be empty")
    lengths = {len(p) for p in pirs}
    if len(lengths) > 1:
        raise ValidationError(f"PIR lengths differ: {sorted(lengths)}")
    return np.ascontiguousarray(
        np.stack([p.samples for p in pirs]), dtype=np.float64
    )


def max_pivot_statistic(xm: Pir, xb: Pir, sb, floor_policy=1e-12):
    """Max over admissible samples of |xm - xb| / sb.

    A sample is admissible when its sb clears floor_policy * max(sb); with
    every sample below the floor the statistic is 0 and the degenerate flag
    is set, so zero-variance resamples never produce NaN.

    Returns (statistic, degenerate).
    """
    sb = np.asarray(sb, dtype=np.float64)
    if len(xm) != len(xb) or len(xm) != sb.shape[0]:
        raise ValidationError("xm, xb and sb must have equal lengths")
    max_sb = float(np.max(sb))
    if max_sb == 0.0:
        return 0.0, True
    keep = sb >= float(floor_policy) * max_sb
    stat = float(np.max(np.abs(xm.samples - xb.samples)[keep] / sb[keep]))
    return stat, False


def critical_constant(stats, alpha, method="order") -> float:
    """Empirical alpha-quantile of the bootstrap statistics.

    'order' sorts and takes element ceil(alpha * B) - 1 (1-based order
    statistic).  'histogram' reproduces the cumulative-histogram lookup of
    the original tooling: 1000 equal bins over [min, max], cumulative counts
    divided by B, first bin whose cdf exceeds alpha, that bin's left edge.
    """
    stats = np.sort(np.asarray(stats, dtype=np.float64))
    if stats.size == 0:
        raise ValidationError("stats must not be empty")
    if not (0.0 < alpha < 1.0):
        raise ValidationError(f"alpha must be in (0, 1), got {alpha!r}")
    if method == "order":
        k = math.ceil(alpha * stats.size - _CEIL_EPS)
        k = min(max(k, 1), stats.size)
        return float(stats[k - 1])
    if method == "histogram":
        lo, hi = float(stats[0]), float(stats[-1])
        if lo == hi:
            return lo
        edges = np.linspace(lo, hi, _HIST_BINS + 1)
        counts, _ = np.histogram(stats, bins=edges)
        cdf = np.cumsum(counts) / stats.size
        first = int(np.argmax(cdf > alpha))
        return float(edges[first])
    raise ValidationError(f"unknown quantile method {method!r}")


def zero_crossings(band_lower, band_upper, times) -> tuple:
    """Maximal runs of consecutive samples where zero is outside the band."""
    outside = (band_lower > 0.0) | (band_upper < 0.0)
    crossings = []
    start = None
    for i, out in enumerate(outside):
        if out and start is None:
            start = i
        elif not out and start is not None:
            crossings.append(Crossing(float(times[start]), float(times[i - 1]),
                                      i - start))
            start = None
    if start is not None:
        n = len(outside)
        crossings.append(Crossing(float(times[start]), float(times[n - 1]),
                                  n - start))
    return tuple(crossings)


def _pivot_chunk(y1, y2, xm, seed, eps, bs, b_lo, b_hi, stats, degen):
    n1, n2 = y1.shape[0], y2.shape[0]
    for b in range(b_lo, b_hi):
        rng = philox_stream(seed, PURPOSE_PIVOT, b)
        oidx1 = resample_indices(n1, rng)
        oidx2 = resample_indices(n2, rng)
        ncnt1, ncnt2 = _draw_nested_counts(rng, n1, n2, bs)
        stats[b], degen[b] = backend.pivot_stat(
            y1, y2, xm, oidx1, oidx2, ncnt1, ncnt2, eps
        )


def confidence_band_difference(group1: FrfGroup, group2: FrfGroup,
                               tg: TimeGrid, params: BootstrapParams,
                               threads=1) -> BandResult:
    """Simultaneous confidence band on the difference of group mean PIRs.

    Steps: render member PIRs; avg = difference of group means; sigma =
    bootstrap pointwise std of that difference (Bs resamples of the
    original groups); B outer iterations each resample both groups, estimate
    a nested std from Bs resamples of the resampled groups, and record the
    max pivotized deviation; cc = empirical alpha-quantile of the B
    statistics; band = avg +/- cc * sigma; reject iff the zero line exits
    the band.

    threads splits the outer loop across a thread pool; every iteration
    draws from its own (seed, iteration) stream and writes its own slot, so
    the result is bitwise-independent of the thread count.
    """
    if group1.grid != group2.grid:
        raise ValidationError("groups must share a frequency grid")
    if len(group1) < 2 or len(group2) < 2:
        raise ValidationError("both groups need at least 2 members")
    if threads < 1:
        raise ValidationError(f"threads must be >= 1, got {threads!r}")
    grid = group1.grid
    pirs1 = [pir_from_frf(m, grid, tg) for m in group1.members]
    pirs2 = [pir_from_frf(m, grid, tg) for m in group2.members]
    y1 = _pir_matrix(pirs1)
    y2 = _pir_matrix(pirs2)

    avg = diff_of_means(pirs1, pirs2)
    sigma = bootstrap_sigma(
        pirs1, pirs2, params.Bs,
        philox_stream(params.seed, PURPOSE_BAND_SIGMA),
    )

    xm = avg.samples
    stats = np.empty(params.B, dtype=np.float64)
    degen = np.empty(params.B, dtype=bool)
    if threads == 1:
        _pivot_chunk(y1, y2, xm, params.seed, params.sigma_floor,
                     params.Bs, 0, params.B, stats, degen)
    else:
        bounds = np.linspace(0, params.B, int(threads) + 1).astype(int)
        with ThreadPoolExecutor(max_workers=int(threads)) as pool:
            futures = [
                pool.submit(_pivot_chunk, y1, y2, xm, params.seed,
                            params.sigma_floor, params.Bs, lo, hi, stats, degen)
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            for fut in futures:
                fut.result()

    stats = np.sort(stats)
    cc = critical_constant(stats, params.alpha, params.quantile_method)
    band_upper = xm + cc * sigma
    band_lower = xm - cc * sigma
    crossings = zero_crossings(band_lower, band_upper, tg.times)
    # groups whose members are all bitwise identical cannot carry resampling
    # variance even when count-weighted accumulation leaves ulp-level noise
    # in sigma, so the structural check is part of the degeneracy test
    constant_data = bool(np.all(y1 == y1[0])) and bool(np.all(y2 == y2[0]))
    return BandResult(
        avg=avg,
        sigma=sigma,
        cc=cc,
        band_upper=band_upper,
        band_lower=band_lower,
        stats=stats,
        reject=bool(crossings),
        crossings=crossings,
        degenerate=bool(np.all(degen)) or float(np.max(sigma)) == 0.0
        or constant_data,
    )


def residual(curve: Pir, band: BandResult) -> Pir:
    """Portion of a curve exceeding the band, signed by the side it exits.

    curve - band_upper where the curve is at or above the upper edge,
    curve - band_lower where at or below the lower edge, zero inside.  For
    the unpaired test the curve of interest is the zero line.
    """
    x = curve.samples
    if len(x) != len(band.band_upper):
        raise ValidationError(
            f"curve has {len(x)} samples, band has {len(band.band_upper)}"
        )
    out = np.zeros_like(x)
    above = x >= band.band_upper
    below = x <= band.band_lower
    out[above] = x[above] - band.band_upper[above]
    out[below] = x[below] - band.band_lower[below]
    return Pir(out)


def zero_line(tg: TimeGrid) -> Pir:
    """The null-hypothesis curve: zero at every sample."""
    return Pir(np.zeros(tg.n_samples, dtype=np.float64))


def residual_spectrum(res: Pir, tg: TimeGrid, grid) -> tuple:
    """Residual projected onto the grid frequencies, plus magnitudes.

    Returns (complex values, magnitudes); the magnitudes are the usual
    frequency-domain view of where a curve exceeded the band.
    """
    values = spectrum_at(res, tg, grid.freqs)
    return values, np.abs(values)
