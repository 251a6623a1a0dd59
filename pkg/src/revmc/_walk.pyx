# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inverse-CDF walker for finite-state chains.

Must stay step-for-step identical to revmc._walk_py.walk: both consume the
same uniforms and use the same tie rule (count of cumulative entries <= u,
clamped to the last state).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def walk(double[:, ::1] cum, cnp.int64_t[::1] starts, double[:, ::1] uniforms):
    """Walk ``R`` chains for ``T`` transitions from given start states.

    Parameters
    ----------
    cum : (n, n) float64, C-contiguous
        Row-wise cumulative transition probabilities.
    starts : (R,) int64
    uniforms : (R, T) float64
        One uniform variate per chain per transition.

    Returns
    -------
    (R, T+1) int64 array of states, column 0 being the starts.
    """
    cdef Py_ssize_t R = starts.shape[0]
    cdef Py_ssize_t T = uniforms.shape[1]
    cdef Py_ssize_t n = cum.shape[0]
    out_arr = np.empty((R, T + 1), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] out = out_arr
    cdef Py_ssize_t r, t, j
    cdef cnp.int64_t s
    cdef double u

    with nogil:
        for r in range(R):
            s = starts[r]
            out[r, 0] = s
            for t in range(T):
                u = uniforms[r, t]
                j = 0
                while j < n - 1 and u >= cum[s, j]:
                    j += 1
                s = j
                out[r, t + 1] = s
    return out_arr
