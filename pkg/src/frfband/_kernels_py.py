"""Pure-numpy bootstrap kernels, bit-identical to the compiled extension.

Both backends promise bitwise-equal outputs, so the arithmetic here is
pinned, not merely equivalent:

  * resampled-group means accumulate count * row products in ascending row
    order, one multiply and one add per element (no fused multiply-add, no
    pairwise summation), then divide the accumulator by the group size;
  * the pointwise standard deviation is two-pass: mean over replicates in
    ascending replicate order, then squared deviations summed in the same
    order, divided by (Bs - 1), square root last;
  * the pivot statistic maximizes |xm - xb| / sb over samples whose sb
    clears the relative floor, scanning with a running maximum.

The compiled kernel implements the same per-element operation sequences in
C loops; -ffp-contract=off keeps the compiler from fusing the multiply-adds
that would break the equality.  Any change here must be mirrored there.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def _resampled_means(y, idx, cnt):
    """Means of count-weighted resamples of y's rows, one per replicate.

    y: (n, ns) group matrix; idx: (n,) row map defining the resampled group
    (identity for the original group); cnt: (Bs, n) float64 draw counts per
    replicate.  Returns (Bs, ns).
    """
    yb = y[idx]
    n = yb.shape[0]
    acc = np.zeros((cnt.shape[0], yb.shape[1]), dtype=np.float64)
    for i in range(n):
        acc += cnt[:, i : i + 1] * yb[i]
    return acc / float(n)


def diff_sigma(y1, y2, idx1, idx2, cnt1, cnt2):
    """Pointwise std (1/(Bs-1)) of resampled mean differences.

    Groups enter as row matrices; idx maps resampled-group slots to rows
    (identity arrays resample the originals); cnt holds per-replicate draw
    counts.  Returns (ns,) float64.
    """
    d = _resampled_means(y1, idx1, cnt1) - _resampled_means(y2, idx2, cnt2)
    bs, ns = d.shape
    msum = np.zeros(ns, dtype=np.float64)
    for j in range(bs):
        msum += d[j]
    m = msum / float(bs)
    ss = np.zeros(ns, dtype=np.float64)
    for j in range(bs):
        dev = d[j] - m
        ss += dev * dev
    return np.sqrt(ss / float(bs - 1))


def pivot_stat(y1, y2, xm, oidx1, oidx2, ncnt1, ncnt2, eps):
    """One outer bootstrap iteration: max pivotized deviation statistic.

    oidx resamples each group once; ncnt holds the nested replicate counts
    over the resampled groups.  Returns (stat, degenerate); degenerate means
    every nested std was zero, in which case the statistic is 0.
    """
    xb = _gather_mean(y1, oidx1) - _gather_mean(y2, oidx2)
    sb = diff_sigma(y1, y2, oidx1, oidx2, ncnt1, ncnt2)
    max_sb = float(np.max(sb))
    if max_sb == 0.0:
        return 0.0, True
    floor = eps * max_sb
    keep = sb >= floor
    stat = float(np.max(np.abs(xm - xb)[keep] / sb[keep]))
    return stat, False


def _gather_mean(y, idx):
    acc = np.zeros(y.shape[1], dtype=np.float64)
    for i in range(idx.shape[0]):
        acc += y[idx[i]]
    return acc / float(idx.shape[0])
