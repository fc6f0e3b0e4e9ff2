# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: batched chaos evaluation.

Must agree with chaosflow._kernels_py to floating-point roundoff; the test
suite exercises both backends against each other.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def eval_plan(double[:, :, ::1] herm,
              long long[::1] offsets,
              long long[::1] cells,
              long long[::1] counts,
              double[::1] weights):
    cdef Py_ssize_t n = herm.shape[0]
    cdef Py_ssize_t nterm = weights.shape[0]
    cdef cnp.ndarray[double, ndim=1] out_arr = np.zeros(n)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, s, r, lo, hi
    cdef double term
    for i in range(nterm):
        lo = offsets[i]
        hi = offsets[i + 1]
        for s in range(n):
            term = weights[i]
            for r in range(lo, hi):
                term = term * herm[s, cells[r], counts[r]]
            out[s] += term
    return out_arr
