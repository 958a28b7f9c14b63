# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled contraction kernel: mode-n vector product on C-contiguous data."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def contract_axis(arr, Py_ssize_t axis, v):
    """Contract `arr` with vector `v` along `axis`, dropping that axis."""
    cdef cnp.ndarray a = np.ascontiguousarray(arr, dtype=np.float64)
    cdef cnp.ndarray w = np.ascontiguousarray(v, dtype=np.float64)
    cdef Py_ssize_t ndim = a.ndim
    if axis < 0 or axis >= ndim:
        raise ValueError("axis out of range")
    if w.ndim != 1 or w.shape[0] != a.shape[axis]:
        raise ValueError("vector length does not match contracted axis")

    cdef Py_ssize_t outer = 1, inner = 1, n = a.shape[axis], i
    for i in range(axis):
        outer *= a.shape[i]
    for i in range(axis + 1, ndim):
        inner *= a.shape[i]

    out_shape = tuple(a.shape[i] for i in range(ndim) if i != axis)
    cdef cnp.ndarray out = np.zeros(out_shape, dtype=np.float64)

    cdef double[::1] src = a.ravel()
    cdef double[::1] dst = out.ravel()
    cdef double[::1] vec = w
    cdef Py_ssize_t o, j, k
    cdef double vj
    cdef Py_ssize_t src_base, dst_base

    for o in range(outer):
        dst_base = o * inner
        for j in range(n):
            vj = vec[j]
            if vj == 0.0:
                continue
            src_base = (o * n + j) * inner
            for k in range(inner):
                dst[dst_base + k] += vj * src[src_base + k]
    return out
