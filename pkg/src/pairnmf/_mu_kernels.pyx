# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled multiplicative-update sweeps.

Hot path of the whole package: the per-class-pair factorizations run these
sweeps thousands of times. Dense products go straight to BLAS dgemm into
preallocated buffers, so the sweeps avoid both Python dispatch overhead and
per-iteration temporaries. Semantics mirror ``_mu_python.py`` exactly
(update order, stopping rule, recorded objectives, lam == 0 fast paths).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

BACKEND = "cython"

cdef double ONE = 1.0
cdef double ZERO = 0.0


cdef inline bint _converged(double f_prev, double f_cur, double rel_tol) noexcept:
    cdef double denom = fabs(f_prev)
    if denom < 1e-300:
        denom = 1e-300
    return fabs(f_prev - f_cur) < rel_tol * denom


# The dgemm wrappers below operate on C-contiguous (row-major) arrays while
# BLAS is column-major, so each product C = op(A) op(B) is issued as its
# transpose C^T = op(B)^T op(A)^T on the same memory.

cdef void _mm(double[:, ::1] a, double[:, ::1] b,
              double[:, ::1] out) noexcept:
    # out = a @ b, a is (M, K), b is (K, N)
    cdef int m = <int> b.shape[1], n = <int> a.shape[0], k = <int> a.shape[1]
    dgemm("N", "N", &m, &n, &k, &ONE, &b[0, 0], &m, &a[0, 0], &k,
          &ZERO, &out[0, 0], &m)


cdef void _mm_atb(double[:, ::1] a, double[:, ::1] b,
                  double[:, ::1] out) noexcept:
    # out = a.T @ b, a is (K, M), b is (K, N)
    cdef int m = <int> b.shape[1], n = <int> a.shape[1], k = <int> a.shape[0]
    dgemm("N", "T", &m, &n, &k, &ONE, &b[0, 0], &m, &a[0, 0], &n,
          &ZERO, &out[0, 0], &m)


cdef void _mm_abt(double[:, ::1] a, double[:, ::1] b,
                  double[:, ::1] out) noexcept:
    # out = a @ b.T, a is (M, K), b is (N, K)
    cdef int m = <int> b.shape[0], n = <int> a.shape[0], k = <int> a.shape[1]
    dgemm("T", "N", &m, &n, &k, &ONE, &b[0, 0], &k, &a[0, 0], &k,
          &ZERO, &out[0, 0], &m)


cdef double _fidelity(double[:, ::1] x, double[:, ::1] w,
                      double[:, ::1] h, double[:, ::1] wh) noexcept:
    # 0.5 * ||x - w @ h||_F^2; wh is a (d, n) scratch buffer
    cdef Py_ssize_t i, j
    cdef Py_ssize_t d = x.shape[0], n = x.shape[1]
    cdef double diff, total = 0.0
    _mm(w, h, wh)
    for i in range(d):
        for j in range(n):
            diff = x[i, j] - wh[i, j]
            total += diff * diff
    return 0.5 * total


cdef void _update_h_base(double[:, ::1] x, double[:, ::1] w,
                         double[:, ::1] h, double[:, ::1] wtx,
                         double[:, ::1] wtw, double[:, ::1] wtwh,
                         double eps) noexcept:
    cdef Py_ssize_t i, j
    cdef Py_ssize_t r = h.shape[0], n = h.shape[1]
    _mm_atb(w, x, wtx)
    _mm_atb(w, w, wtw)
    _mm(wtw, h, wtwh)
    for i in range(r):
        for j in range(n):
            h[i, j] = h[i, j] * wtx[i, j] / (wtwh[i, j] + eps)


cdef void _update_w_base(double[:, ::1] x, double[:, ::1] w,
                         double[:, ::1] h, double[:, ::1] xht,
                         double[:, ::1] hht, double[:, ::1] whht,
                         double eps) noexcept:
    cdef Py_ssize_t i, j
    cdef Py_ssize_t d = w.shape[0], r = w.shape[1]
    _mm_abt(x, h, xht)
    _mm_abt(h, h, hht)
    _mm(w, hht, whht)
    for i in range(d):
        for j in range(r):
            w[i, j] = w[i, j] * xht[i, j] / (whht[i, j] + eps)


def nmf_sweeps(double[:, ::1] x, double[:, ::1] w, double[:, ::1] h,
               int max_iters, double rel_tol, double eps):
    cdef Py_ssize_t d = x.shape[0], n = x.shape[1], r = w.shape[1]
    cdef double[:, ::1] wtx = np.empty((r, n))
    cdef double[:, ::1] wtw = np.empty((r, r))
    cdef double[:, ::1] wtwh = np.empty((r, n))
    cdef double[:, ::1] xht = np.empty((d, r))
    cdef double[:, ::1] hht = np.empty((r, r))
    cdef double[:, ::1] whht = np.empty((d, r))
    cdef double[:, ::1] wh = np.empty((d, n))
    trace = np.empty(max_iters + 1)
    cdef double[::1] tr = trace
    cdef double f_prev, f
    cdef Py_ssize_t it, count = 1
    f_prev = _fidelity(x, w, h, wh)
    tr[0] = f_prev
    for it in range(max_iters):
        _update_h_base(x, w, h, wtx, wtw, wtwh, eps)
        _update_w_base(x, w, h, xht, hht, whht, eps)
        f = _fidelity(x, w, h, wh)
        tr[count] = f
        count += 1
        if _converged(f_prev, f, rel_tol):
            break
        f_prev = f
    return np.asarray(w), np.asarray(h), trace[:count]


cdef void _sparse_right_mul(const double[:, ::1] h, const long[::1] indptr,
                            const long[::1] indices, const double[::1] sdata,
                            double[:, ::1] out) noexcept:
    # out = h @ s for symmetric sparse s in CSR form; column j of out pulls
    # the nonzeros of row j of s.
    cdef Py_ssize_t i, j, ptr, l
    cdef Py_ssize_t r = h.shape[0], n = h.shape[1]
    cdef double sval
    for i in range(r):
        for j in range(n):
            out[i, j] = 0.0
    for j in range(n):
        for ptr in range(indptr[j], indptr[j + 1]):
            l = indices[ptr]
            sval = sdata[ptr]
            for i in range(r):
                out[i, j] += sval * h[i, l]


cdef double _gnmf_penalty(const double[:, ::1] h, const long[::1] indptr,
                          const long[::1] indices, const double[::1] sdata,
                          const double[::1] deg, double lam,
                          double[:, ::1] hs) noexcept:
    # 0.5 * lam * Tr(H L H^T) with L = diag(deg) - S
    cdef Py_ssize_t i, j
    cdef Py_ssize_t r = h.shape[0], n = h.shape[1]
    cdef double colsq, cross = 0.0, smooth = 0.0
    _sparse_right_mul(h, indptr, indices, sdata, hs)
    for j in range(n):
        colsq = 0.0
        for i in range(r):
            colsq += h[i, j] * h[i, j]
            cross += h[i, j] * hs[i, j]
        smooth += deg[j] * colsq
    return 0.5 * lam * (smooth - cross)


def gnmf_sweeps(double[:, ::1] x, double[:, ::1] w, double[:, ::1] h,
                long[::1] indptr, long[::1] indices, double[::1] sdata,
                double[::1] deg, double lam,
                int max_iters, double rel_tol, double eps):
    cdef Py_ssize_t d = x.shape[0], n = x.shape[1], r = w.shape[1]
    cdef double[:, ::1] wtx = np.empty((r, n))
    cdef double[:, ::1] wtw = np.empty((r, r))
    cdef double[:, ::1] wtwh = np.empty((r, n))
    cdef double[:, ::1] xht = np.empty((d, r))
    cdef double[:, ::1] hht = np.empty((r, r))
    cdef double[:, ::1] whht = np.empty((d, r))
    cdef double[:, ::1] hs = np.empty((r, n))
    cdef double[:, ::1] wh = np.empty((d, n))
    trace = np.empty(max_iters + 1)
    cdef double[::1] tr = trace
    cdef double f_prev, f
    cdef Py_ssize_t it, i, j, count = 1
    f_prev = _fidelity(x, w, h, wh)
    if lam != 0.0:
        f_prev += _gnmf_penalty(h, indptr, indices, sdata, deg, lam, hs)
    tr[0] = f_prev
    for it in range(max_iters):
        if lam == 0.0:
            _update_h_base(x, w, h, wtx, wtw, wtwh, eps)
        else:
            _mm_atb(w, x, wtx)
            _mm_atb(w, w, wtw)
            _mm(wtw, h, wtwh)
            _sparse_right_mul(h, indptr, indices, sdata, hs)
            for i in range(r):
                for j in range(n):
                    h[i, j] = h[i, j] * (wtx[i, j] + lam * hs[i, j]) / (
                        wtwh[i, j] + lam * h[i, j] * deg[j] + eps)
        _update_w_base(x, w, h, xht, hht, whht, eps)
        f = _fidelity(x, w, h, wh)
        if lam != 0.0:
            f += _gnmf_penalty(h, indptr, indices, sdata, deg, lam, hs)
        tr[count] = f
        count += 1
        if _converged(f_prev, f, rel_tol):
            break
        f_prev = f
    return np.asarray(w), np.asarray(h), trace[:count]


cdef double _frnmf_penalty(double[:, ::1] x, double[:, ::1] w,
                           double lam, double[:, ::1] xtw,
                           double[:, ::1] wtw) noexcept:
    # -lam*||X^T W||^2 + 0.5*lam^2*||W^T W||^2, i.e. the scatter penalty
    # 0.5*||XX^T - lam*WW^T||^2 up to the W-independent constant.
    cdef Py_ssize_t i, j
    cdef double g2 = 0.0, c2 = 0.0
    _mm_atb(x, w, xtw)
    _mm_atb(w, w, wtw)
    for i in range(xtw.shape[0]):
        for j in range(xtw.shape[1]):
            g2 += xtw[i, j] * xtw[i, j]
    for i in range(wtw.shape[0]):
        for j in range(wtw.shape[1]):
            c2 += wtw[i, j] * wtw[i, j]
    return -lam * g2 + 0.5 * lam * lam * c2


def frnmf_sweeps(double[:, ::1] x, double[:, ::1] w, double[:, ::1] h,
                 double[:, ::1] e, double lam,
                 int max_iters, double rel_tol, double eps):
    cdef Py_ssize_t d = x.shape[0], n = x.shape[1], r = w.shape[1]
    cdef double[:, ::1] wtx = np.empty((r, n))
    cdef double[:, ::1] wtw = np.empty((r, r))
    cdef double[:, ::1] wtwh = np.empty((r, n))
    cdef double[:, ::1] xht = np.empty((d, r))
    cdef double[:, ::1] hht = np.empty((r, r))
    cdef double[:, ::1] whht = np.empty((d, r))
    cdef double[:, ::1] ew = np.empty((d, r))
    cdef double[:, ::1] wwtw = np.empty((d, r))
    cdef double[:, ::1] xtw = np.empty((n, r))
    cdef double[:, ::1] wh = np.empty((d, n))
    trace = np.empty(max_iters + 1)
    cdef double[::1] tr = trace
    cdef double f_prev, f, half_lam_sq = 0.5 * lam * lam
    cdef Py_ssize_t it, i, j, count = 1
    f_prev = _fidelity(x, w, h, wh)
    if lam != 0.0:
        f_prev += _frnmf_penalty(x, w, lam, xtw, wtw)
    tr[0] = f_prev
    for it in range(max_iters):
        _update_h_base(x, w, h, wtx, wtw, wtwh, eps)
        if lam == 0.0:
            _update_w_base(x, w, h, xht, hht, whht, eps)
        else:
            _mm_abt(x, h, xht)
            _mm_abt(h, h, hht)
            _mm(w, hht, whht)
            _mm(e, w, ew)
            _mm_atb(w, w, wtw)
            _mm(w, wtw, wwtw)
            for i in range(d):
                for j in range(r):
                    w[i, j] = w[i, j] * (xht[i, j] + lam * ew[i, j]) / (
                        whht[i, j] + half_lam_sq * wwtw[i, j] + eps)
        f = _fidelity(x, w, h, wh)
        if lam != 0.0:
            f += _frnmf_penalty(x, w, lam, xtw, wtw)
        tr[count] = f
        count += 1
        if _converged(f_prev, f, rel_tol):
            break
        f_prev = f
    return np.asarray(w), np.asarray(h), trace[:count]
