# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled bounded-axis derivative kernel.

Same operator as ``_stencils_py.diff_bounded``: fourth-order interior
stencil with summation-by-parts closure rows, applied along either axis of
a 2D nodal array in a single fused pass.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef double C1 = 1.0 / 12.0
cdef double C2 = 2.0 / 3.0

cdef double[4][6] CLOSE = [
    [-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0, 0.0, 0.0],
    [-1.0 / 2.0, 0.0, 1.0 / 2.0, 0.0, 0.0, 0.0],
    [4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0, 0.0],
    [3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0],
]


def diff_bounded(double[:, ::1] f, int axis, double h):
    cdef Py_ssize_t nx = f.shape[0]
    cdef Py_ssize_t ny = f.shape[1]
    cdef Py_ssize_t n = nx if axis == 0 else ny
    if n < 8:
        raise ValueError("bounded axis needs at least 8 nodes")
    if axis not in (0, 1):
        raise ValueError("axis must be 0 or 1")

    out_arr = np.empty((nx, ny), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double inv_h = 1.0 / h
    cdef Py_ssize_t i, j, r, k
    cdef double acc

    if axis == 0:
        for i in range(4, nx - 4):
            for j in range(ny):
                out[i, j] = (
                    C1 * (f[i - 2, j] - f[i + 2, j])
                    + C2 * (f[i + 1, j] - f[i - 1, j])
                ) * inv_h
        for r in range(4):
            for j in range(ny):
                acc = 0.0
                for k in range(6):
                    acc += CLOSE[r][k] * f[k, j]
                out[r, j] = acc * inv_h
                acc = 0.0
                for k in range(6):
                    acc += CLOSE[r][k] * f[nx - 1 - k, j]
                out[nx - 1 - r, j] = -acc * inv_h
    else:
        for i in range(nx):
            for j in range(4, ny - 4):
                out[i, j] = (
                    C1 * (f[i, j - 2] - f[i, j + 2])
                    + C2 * (f[i, j + 1] - f[i, j - 1])
                ) * inv_h
            for r in range(4):
                acc = 0.0
                for k in range(6):
                    acc += CLOSE[r][k] * f[i, k]
                out[i, r] = acc * inv_h
                acc = 0.0
                for k in range(6):
                    acc += CLOSE[r][k] * f[i, ny - 1 - k]
                out[i, ny - 1 - r] = -acc * inv_h
    return out_arr
