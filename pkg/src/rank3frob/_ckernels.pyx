# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the counting hot loops (see ``_pykernels``)."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free
from libc.stdint cimport int64_t

BACKEND = "compiled"

ctypedef int64_t i64


cdef inline i64 lmul(i64 a, i64 b, i64 order) nogil:
    if a < 0 or b < 0:
        return -1
    cdef i64 s = a + b
    if s >= order:
        s -= order
    return s


cdef inline i64 ladd(i64 a, i64 b, const i64* zech, i64 order) nogil:
    if a < 0:
        return b
    if b < 0:
        return a
    cdef i64 d = b - a
    if d < 0:
        d += order
    cdef i64 z = zech[d]
    if z < 0:
        return -1
    cdef i64 s = a + z
    if s >= order:
        s -= order
    return s


def build_exp_table(spec):
    cdef i64 p = spec.p, k = spec.k, q = spec.q
    cdef i64 order = q - 1
    cdef cnp.ndarray[i64, ndim=2] m = np.ascontiguousarray(
        spec.mul_matrix(spec.primitive), dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] out = np.empty(order, dtype=np.int64)
    cdef i64 v[8]
    cdef i64 w[8]
    cdef i64 n, i, j, acc, enc
    for i in range(k):
        v[i] = 0
    v[0] = 1
    for n in range(order):
        enc = 0
        for i in range(k - 1, -1, -1):
            enc = enc * p + v[i]
        out[n] = enc
        for i in range(k):
            acc = 0
            for j in range(k):
                acc += m[i, j] * v[j]
            w[i] = acc % p
        for i in range(k):
            v[i] = w[i]
    return out


cdef class _Rows:
    """Row polynomials flattened for nogil access."""
    cdef int n
    cdef int* off
    cdef i64* deg_i
    cdef i64* logs

    def __cinit__(self, list rows):
        self.n = len(rows)
        cdef int total = sum(len(r) for r in rows)
        self.off = <int*> malloc(sizeof(int) * (self.n + 1))
        self.deg_i = <i64*> malloc(sizeof(i64) * (total + 1))
        self.logs = <i64*> malloc(sizeof(i64) * (total + 1))
        cdef int idx = 0, j
        for j in range(self.n):
            self.off[j] = idx
            for i, la in rows[j]:
                self.deg_i[idx] = i
                self.logs[idx] = la
                idx += 1
        self.off[self.n] = idx

    def __dealloc__(self):
        free(self.off)
        free(self.deg_i)
        free(self.logs)


cdef inline void eval_rows(_Rows r, i64 x, i64* out, const i64* zech, i64 order) nogil:
    cdef int j, m
    cdef i64 v, t, i, la
    for j in range(r.n):
        v = -1
        for m in range(r.off[j], r.off[j + 1]):
            i = r.deg_i[m]
            la = r.logs[m]
            if i == 0:
                t = la
            elif x < 0 or la < 0:
                t = -1
            else:
                t = (i * x + la) % order
            v = ladd(v, t, zech, order)
        out[j] = v


def char_sum(zech_arr, i64 q, list rows_a, list rows_b, i64 x_lo, i64 x_hi):
    cdef cnp.ndarray[i64, ndim=1] zarr = np.ascontiguousarray(zech_arr, dtype=np.int64)
    cdef const i64* zech = <const i64*> zarr.data
    cdef i64 order = q - 1
    cdef _Rows ra = _Rows(rows_a)
    cdef _Rows rb = _Rows(rows_b)
    cdef int JA = ra.n, JB = rb.n
    cdef i64* ca = <i64*> malloc(sizeof(i64) * (JA + 1))
    cdef i64* cb = <i64*> malloc(sizeof(i64) * (JB + 1))
    cdef i64 x, y, v, total = 0, bad = 0
    cdef int j
    try:
        with nogil:
            for x in range(x_lo, x_hi):
                eval_rows(ra, x, ca, zech, order)
                if JB > 0:
                    eval_rows(rb, x, cb, zech, order)
                for y in range(-1, order):
                    v = ca[JA - 1]
                    for j in range(JA - 2, -1, -1):
                        v = ladd(lmul(v, y, order), ca[j], zech, order)
                    if v >= 0:
                        total += 1 - 2 * (v & 1)
                    if JB > 0:
                        v = cb[JB - 1]
                        for j in range(JB - 2, -1, -1):
                            v = ladd(lmul(v, y, order), cb[j], zech, order)
                        if v >= 0:
                            bad += 1
    finally:
        free(ca)
        free(cb)
    return total, bad
