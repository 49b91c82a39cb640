# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled leave-one-out ranking kernel.

Operation-for-operation identical to cocitebench._rank_py (same
accumulation order, same subtraction trick, same near-tie recomputation),
so ranks and target scores are bitwise equal between the implementations.
AA row weights arrive pre-divided in ``data_aa``; the hot loops contain no
division.
"""

from libc.math cimport fabs

import numpy as np

IMPL_NAME = "cython"

cdef double _NEAR_TIE_REL = 1e-9


cdef inline double _aa_direct(long long v, long long t,
                              long long[::1] cases_flat,
                              Py_ssize_t k_lo, Py_ssize_t k_hi,
                              long long[::1] indptr, long long[::1] indices,
                              double[::1] data_aa) nogil:
    """Sum of C[s, v] / w[s] over the context, ascending s, skipping t."""
    cdef double acc = 0.0
    cdef Py_ssize_t j, lo, hi, mid
    cdef long long s
    for j in range(k_lo, k_hi):
        s = cases_flat[j]
        if s == t:
            continue
        lo = <Py_ssize_t> indptr[s]
        hi = <Py_ssize_t> indptr[s + 1]
        while lo < hi:
            mid = (lo + hi) // 2
            if indices[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        if lo < <Py_ssize_t> indptr[s + 1] and indices[lo] == v:
            acc += data_aa[lo]
    return acc


def rank_case_batch(long long[::1] indptr, long long[::1] indices,
                    double[::1] data, double[::1] data_aa, double[::1] dscore,
                    long long[::1] cases_flat, long long[::1] case_ptr,
                    bint do_cn, bint do_aa, bint do_deg):
    cdef Py_ssize_t V = dscore.shape[0]
    cdef Py_ssize_t n_cases = case_ptr.shape[0] - 1
    cdef Py_ssize_t n_out = <Py_ssize_t> case_ptr[n_cases]

    rk_cn_arr = np.empty(n_out, dtype=np.float64) if do_cn else None
    ts_cn_arr = np.empty(n_out, dtype=np.float64) if do_cn else None
    rk_aa_arr = np.empty(n_out, dtype=np.float64) if do_aa else None
    ts_aa_arr = np.empty(n_out, dtype=np.float64) if do_aa else None
    rk_dg_arr = np.empty(n_out, dtype=np.float64) if do_deg else None
    ts_dg_arr = np.empty(n_out, dtype=np.float64) if do_deg else None

    cdef double[::1] rk_cn = rk_cn_arr if do_cn else None
    cdef double[::1] ts_cn = ts_cn_arr if do_cn else None
    cdef double[::1] rk_aa = rk_aa_arr if do_aa else None
    cdef double[::1] ts_aa = ts_aa_arr if do_aa else None
    cdef double[::1] rk_dg = rk_dg_arr if do_deg else None
    cdef double[::1] ts_dg = ts_dg_arr if do_deg else None

    cdef double[::1] F_cn = np.zeros(V, dtype=np.float64)
    cdef double[::1] F_aa = np.zeros(V, dtype=np.float64)
    cdef double[::1] R = np.zeros(V, dtype=np.float64)
    cdef double[::1] R_aa = np.zeros(V, dtype=np.float64)
    cdef unsigned char[::1] in_ctx = np.zeros(V, dtype=np.uint8)

    cdef Py_ssize_t c, j, p, pos, k_lo, k_hi
    cdef long long s, t, v
    cdef double tsc, tsa, tsd, g, r, exact
    cdef long long gt_c, eq_c, gt_a, eq_a, gt_d, eq_d, c_near
    cdef bint aa_only = do_aa and not do_cn and not do_deg

    for c in range(n_cases):
        k_lo = <Py_ssize_t> case_ptr[c]
        k_hi = <Py_ssize_t> case_ptr[c + 1]

        for j in range(k_lo, k_hi):
            s = cases_flat[j]
            if do_cn:
                for p in range(<Py_ssize_t> indptr[s], <Py_ssize_t> indptr[s + 1]):
                    F_cn[indices[p]] += data[p]
            if do_aa:
                for p in range(<Py_ssize_t> indptr[s], <Py_ssize_t> indptr[s + 1]):
                    F_aa[indices[p]] += data_aa[p]
            in_ctx[s] = 1

        for j in range(k_lo, k_hi):
            t = cases_flat[j]
            pos = j
            if do_aa:
                for p in range(<Py_ssize_t> indptr[t], <Py_ssize_t> indptr[t + 1]):
                    R_aa[indices[p]] = data_aa[p]
            if do_cn:
                for p in range(<Py_ssize_t> indptr[t], <Py_ssize_t> indptr[t + 1]):
                    R[indices[p]] = data[p]
            tsa = F_aa[t]
            gt_a = eq_a = 0

            if aa_only:
                # hot path: branchless counting pass over all of V (the
                # compiler vectorizes it), then subtract the context
                # members' contributions; near-ties divert to the exact
                # scalar loop
                c_near = 0
                for v in range(V):
                    r = R_aa[v]
                    g = F_aa[v] - r
                    gt_a += g > tsa
                    eq_a += g == tsa
                    c_near += (r != 0.0) & (
                        fabs(g - tsa) <= _NEAR_TIE_REL * (F_aa[v] + r + tsa)
                    )
                if c_near == 0:
                    for p in range(k_lo, k_hi):
                        v = cases_flat[p]
                        r = R_aa[v]
                        g = F_aa[v] - r
                        gt_a -= g > tsa
                        eq_a -= g == tsa
                else:
                    gt_a = eq_a = 0
                    for v in range(V):
                        if in_ctx[v]:
                            continue
                        r = R_aa[v]
                        g = F_aa[v] - r
                        if r != 0.0 and fabs(g - tsa) <= _NEAR_TIE_REL * (F_aa[v] + r + tsa):
                            exact = _aa_direct(v, t, cases_flat, k_lo, k_hi,
                                               indptr, indices, data_aa)
                            if exact > tsa:
                                gt_a += 1
                            elif exact == tsa:
                                eq_a += 1
                        elif g > tsa:
                            gt_a += 1
                        elif g == tsa:
                            eq_a += 1
                rk_aa[pos] = 1.0 + gt_a + 0.5 * eq_a
                ts_aa[pos] = tsa
            else:
                tsc = F_cn[t]
                tsd = dscore[t]
                gt_c = eq_c = gt_d = eq_d = 0
                for v in range(V):
                    if in_ctx[v]:
                        continue
                    if do_cn:
                        # integer counts are exact in float64
                        g = F_cn[v] - R[v]
                        if g > tsc:
                            gt_c += 1
                        elif g == tsc:
                            eq_c += 1
                    if do_aa:
                        r = R_aa[v]
                        g = F_aa[v] - r
                        if r != 0.0 and fabs(g - tsa) <= _NEAR_TIE_REL * (F_aa[v] + r + tsa):
                            exact = _aa_direct(v, t, cases_flat, k_lo, k_hi,
                                               indptr, indices, data_aa)
                            if exact > tsa:
                                gt_a += 1
                            elif exact == tsa:
                                eq_a += 1
                        elif g > tsa:
                            gt_a += 1
                        elif g == tsa:
                            eq_a += 1
                    if do_deg:
                        g = dscore[v]
                        if g > tsd:
                            gt_d += 1
                        elif g == tsd:
                            eq_d += 1
                if do_cn:
                    rk_cn[pos] = 1.0 + gt_c + 0.5 * eq_c
                    ts_cn[pos] = tsc
                if do_aa:
                    rk_aa[pos] = 1.0 + gt_a + 0.5 * eq_a
                    ts_aa[pos] = tsa
                if do_deg:
                    rk_dg[pos] = 1.0 + gt_d + 0.5 * eq_d
                    ts_dg[pos] = tsd

            if do_aa:
                for p in range(<Py_ssize_t> indptr[t], <Py_ssize_t> indptr[t + 1]):
                    R_aa[indices[p]] = 0.0
            if do_cn:
                for p in range(<Py_ssize_t> indptr[t], <Py_ssize_t> indptr[t + 1]):
                    R[indices[p]] = 0.0

        # targeted clearing keeps per-case cost proportional to touched rows
        for j in range(k_lo, k_hi):
            s = cases_flat[j]
            if do_cn:
                for p in range(<Py_ssize_t> indptr[s], <Py_ssize_t> indptr[s + 1]):
                    F_cn[indices[p]] = 0.0
            if do_aa:
                for p in range(<Py_ssize_t> indptr[s], <Py_ssize_t> indptr[s + 1]):
                    F_aa[indices[p]] = 0.0
            in_ctx[s] = 0

    cn = (rk_cn_arr, ts_cn_arr) if do_cn else None
    aa = (rk_aa_arr, ts_aa_arr) if do_aa else None
    dg = (rk_dg_arr, ts_dg_arr) if do_deg else None
    return cn, aa, dg
