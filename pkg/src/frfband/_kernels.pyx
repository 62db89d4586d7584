# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled bootstrap kernels, bit-identical to the pure-numpy backend.

The per-element operation sequences are pinned by the backend contract (see
_kernels_py.py): ascending-order count * row accumulation with separate
multiply and add, accumulator divided by the group size, two-pass variance
in ascending replicate order, square root last, running-maximum scan with a
relative sigma floor.  The build compiles with -ffp-contract=off so the
multiply-adds stay unfused; fused instructions would round differently and
break the bitwise equality the tests assert.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, sqrt

BACKEND = "cython"


cdef void _diff_sigma_core(const double[:, ::1] y1, const double[:, ::1] y2,
                           const cnp.int64_t[::1] idx1,
                           const cnp.int64_t[::1] idx2,
                           const double[:, ::1] cnt1,
                           const double[:, ::1] cnt2,
                           double[:, ::1] d, double[::1] acc1,
                           double[::1] acc2, double[::1] m,
                           double[::1] sigma) noexcept nogil:
    cdef Py_ssize_t bs = cnt1.shape[0]
    cdef Py_ssize_t n1 = idx1.shape[0]
    cdef Py_ssize_t n2 = idx2.shape[0]
    cdef Py_ssize_t ns = y1.shape[1]
    cdef double dn1 = <double> n1
    cdef double dn2 = <double> n2
    cdef double dbs = <double> bs
    cdef double dbsm1 = <double> (bs - 1)
    cdef Py_ssize_t i, j, t, r
    cdef double c, dev

    for j in range(bs):
        for t in range(ns):
            acc1[t] = 0.0
            acc2[t] = 0.0
        for i in range(n1):
            c = cnt1[j, i]
            r = idx1[i]
            for t in range(ns):
                acc1[t] += c * y1[r, t]
        for i in range(n2):
            c = cnt2[j, i]
            r = idx2[i]
            for t in range(ns):
                acc2[t] += c * y2[r, t]
        for t in range(ns):
            d[j, t] = acc1[t] / dn1 - acc2[t] / dn2

    # two-pass pointwise std over replicates; m doubles as the mean-sum buffer
    for t in range(ns):
        m[t] = 0.0
    for j in range(bs):
        for t in range(ns):
            m[t] += d[j, t]
    for t in range(ns):
        m[t] = m[t] / dbs
    for t in range(ns):
        sigma[t] = 0.0
    for j in range(bs):
        for t in range(ns):
            dev = d[j, t] - m[t]
            sigma[t] += dev * dev
    for t in range(ns):
        sigma[t] = sqrt(sigma[t] / dbsm1)


def diff_sigma(const double[:, ::1] y1 not None,
               const double[:, ::1] y2 not None,
               const cnp.int64_t[::1] idx1 not None,
               const cnp.int64_t[::1] idx2 not None,
               const double[:, ::1] cnt1 not None,
               const double[:, ::1] cnt2 not None):
    """Pointwise std (1/(Bs-1)) of resampled mean differences; see _kernels_py."""
    cdef Py_ssize_t bs = cnt1.shape[0]
    cdef Py_ssize_t ns = y1.shape[1]
    d_arr = np.empty((bs, ns), dtype=np.float64)
    acc1_arr = np.empty(ns, dtype=np.float64)
    acc2_arr = np.empty(ns, dtype=np.float64)
    m_arr = np.empty(ns, dtype=np.float64)
    sigma_arr = np.empty(ns, dtype=np.float64)
    cdef double[:, ::1] d = d_arr
    cdef double[::1] acc1 = acc1_arr
    cdef double[::1] acc2 = acc2_arr
    cdef double[::1] m = m_arr
    cdef double[::1] sigma = sigma_arr
    with nogil:
        _diff_sigma_core(y1, y2, idx1, idx2, cnt1, cnt2, d, acc1, acc2, m, sigma)
    return sigma_arr


def pivot_stat(const double[:, ::1] y1 not None,
               const double[:, ::1] y2 not None,
               const double[::1] xm not None,
               const cnp.int64_t[::1] oidx1 not None,
               const cnp.int64_t[::1] oidx2 not None,
               const double[:, ::1] ncnt1 not None,
               const double[:, ::1] ncnt2 not None,
               double eps):
    """One outer bootstrap iteration's max pivot statistic; see _kernels_py."""
    cdef Py_ssize_t bs = ncnt1.shape[0]
    cdef Py_ssize_t n1 = oidx1.shape[0]
    cdef Py_ssize_t n2 = oidx2.shape[0]
    cdef Py_ssize_t ns = y1.shape[1]
    d_arr = np.empty((bs, ns), dtype=np.float64)
    acc1_arr = np.empty(ns, dtype=np.float64)
    acc2_arr = np.empty(ns, dtype=np.float64)
    m_arr = np.empty(ns, dtype=np.float64)
    sb_arr = np.empty(ns, dtype=np.float64)
    xb_arr = np.empty(ns, dtype=np.float64)
    cdef double[:, ::1] d = d_arr
    cdef double[::1] acc1 = acc1_arr
    cdef double[::1] acc2 = acc2_arr
    cdef double[::1] m = m_arr
    cdef double[::1] sb = sb_arr
    cdef double[::1] xb = xb_arr
    cdef double dn1 = <double> n1
    cdef double dn2 = <double> n2
    cdef Py_ssize_t i, t, r
    cdef double max_sb, floor, ratio, stat
    cdef bint degenerate = 0

    with nogil:
        # observed difference of the once-resampled group means
        for t in range(ns):
            acc1[t] = 0.0
            acc2[t] = 0.0
        for i in range(n1):
            r = oidx1[i]
            for t in range(ns):
                acc1[t] += y1[r, t]
        for i in range(n2):
            r = oidx2[i]
            for t in range(ns):
                acc2[t] += y2[r, t]
        for t in range(ns):
            xb[t] = acc1[t] / dn1 - acc2[t] / dn2

        _diff_sigma_core(y1, y2, oidx1, oidx2, ncnt1, ncnt2, d, acc1, acc2, m, sb)

        max_sb = 0.0
        for t in range(ns):
            if sb[t] > max_sb:
                max_sb = sb[t]
        stat = 0.0
        if max_sb == 0.0:
            degenerate = 1
        else:
            floor = eps * max_sb
            for t in range(ns):
                if sb[t] >= floor:
                    ratio = fabs(xm[t] - xb[t]) / sb[t]
                    if ratio > stat:
                        stat = ratio
    return stat, bool(degenerate)
