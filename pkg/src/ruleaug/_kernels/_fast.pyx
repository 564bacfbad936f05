# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels: clause masks over encoded rows and
mixed numeric/categorical nearest-neighbor distances.

Accumulation order matches ruleaug._kernels.pure exactly so both backends
return bit-identical floats.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

BACKEND = "compiled"

cdef enum:
    OP_EQ = 0
    OP_NE = 1
    OP_LT = 2
    OP_LE = 3
    OP_GT = 4
    OP_GE = 5


def clause_mask(double[:, ::1] num, int[:, ::1] cat,
                double[:, ::1] num_pred, int[:, ::1] cat_pred):
    cdef Py_ssize_t n = num.shape[0]
    cdef Py_ssize_t mn = num_pred.shape[0]
    cdef Py_ssize_t mc = cat_pred.shape[0]
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] out = np.ones(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] mask = out
    cdef Py_ssize_t i, p
    cdef int col, op, code
    cdef double val, c
    cdef bint ok
    for i in range(n):
        ok = True
        for p in range(mn):
            col = <int>num_pred[p, 0]
            op = <int>num_pred[p, 1]
            val = num_pred[p, 2]
            c = num[i, col]
            if op == OP_EQ:
                ok = c == val
            elif op == OP_NE:
                ok = c != val
            elif op == OP_LT:
                ok = c < val
            elif op == OP_LE:
                ok = c <= val
            elif op == OP_GT:
                ok = c > val
            else:
                ok = c >= val
            if not ok:
                break
        if ok:
            for p in range(mc):
                col = cat_pred[p, 0]
                op = cat_pred[p, 1]
                code = cat_pred[p, 2]
                if op == OP_EQ:
                    ok = cat[i, col] == code
                else:
                    ok = cat[i, col] != code
                if not ok:
                    break
        mask[i] = 1 if ok else 0
    return out.view(np.bool_)


cdef inline double _sq_dist(double[:, ::1] num, int[:, ::1] cat,
                            double[::1] inv_range,
                            Py_ssize_t a, Py_ssize_t b) nogil:
    cdef double d2 = 0.0
    cdef double diff
    cdef Py_ssize_t j
    for j in range(num.shape[1]):
        diff = (num[a, j] - num[b, j]) * inv_range[j]
        d2 += diff * diff
    for j in range(cat.shape[1]):
        if cat[a, j] != cat[b, j]:
            d2 += 1.0
    return d2


def point_distances(double[:, ::1] num, int[:, ::1] cat, double[::1] inv_range,
                    member_idx, Py_ssize_t base_idx):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] members = np.asarray(member_idx, dtype=np.int64)
    cdef Py_ssize_t m = members.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef Py_ssize_t i
    for i in range(m):
        out[i] = sqrt(_sq_dist(num, cat, inv_range, members[i], base_idx))
    return out


def knn_indices(double[:, ::1] num, int[:, ::1] cat, double[::1] inv_range, Py_ssize_t k):
    cdef Py_ssize_t n = num.shape[0]
    if k > n - 1:
        raise ValueError(f"k={k} exceeds available neighbors ({n - 1})")
    cdef cnp.ndarray[cnp.int64_t, ndim=2] out = np.empty((n, k), dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dbuf = np.empty(n, dtype=np.float64)
    cdef double[::1] d2 = dbuf
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order
    cdef Py_ssize_t i, j, taken
    for i in range(n):
        for j in range(n):
            d2[j] = _sq_dist(num, cat, inv_range, j, i)
        # stable argsort keeps the lower-index tie rule identical to the fallback
        order = np.argsort(dbuf, kind="stable")
        taken = 0
        for j in range(n):
            if order[j] != i:
                out[i, taken] = order[j]
                taken += 1
                if taken == k:
                    break
    return out
