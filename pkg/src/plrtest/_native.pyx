# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for ray marching and Hough voting.

Must stay bit-identical to plrtest._reference; the test suite checks parity.
"""

from libc.math cimport cos, sin, llround
from libc.string cimport memset

import numpy as np

cimport numpy as cnp

cnp.import_array()

NATIVE = True


def ray_profiles(const cnp.uint8_t[:, ::1] img, double cx, double cy,
                 const double[::1] angles, double step, int max_steps):
    cdef Py_ssize_t h = img.shape[0]
    cdef Py_ssize_t w = img.shape[1]
    cdef Py_ssize_t n = angles.shape[0]
    diffs_arr = np.zeros((n, max_steps), dtype=np.int16)
    counts_arr = np.zeros(n, dtype=np.int32)
    cdef cnp.int16_t[:, ::1] diffs = diffs_arr
    cdef cnp.int32_t[::1] counts = counts_arr
    cdef Py_ssize_t r, k, ix, iy
    cdef double dx, dy
    cdef int prev, cur

    for r in range(n):
        dx = cos(angles[r]) * step
        dy = sin(angles[r]) * step
        ix = llround(cx)
        iy = llround(cy)
        if ix < 0 or ix > w - 1 or iy < 0 or iy > h - 1:
            continue
        prev = img[iy, ix]
        for k in range(1, max_steps + 1):
            ix = llround(cx + k * dx)
            iy = llround(cy + k * dy)
            if ix < 0 or ix > w - 1 or iy < 0 or iy > h - 1:
                break
            cur = img[iy, ix]
            diffs[r, k - 1] = <cnp.int16_t> (cur - prev)
            counts[r] = <cnp.int32_t> k
            prev = cur
    return diffs_arr, counts_arr


def cht_votes(const cnp.int32_t[::1] ys, const cnp.int32_t[::1] xs, int h, int w,
              const cnp.int32_t[::1] off_dx, const cnp.int32_t[::1] off_dy,
              const cnp.int32_t[::1] off_starts, int cell):
    # votes land in a frame padded by the largest radius: no per-vote bounds
    # checks; out-of-frame votes are discarded when the padding is sliced off
    cdef int hc = (h + cell - 1) // cell
    cdef int wc = (w + cell - 1) // cell
    cdef Py_ssize_t n_r = off_starts.shape[0] - 1
    cdef Py_ssize_t m = ys.shape[0]
    cdef Py_ssize_t n_off = off_dx.shape[0]
    cdef int pad = 1
    cdef Py_ssize_t i
    for i in range(n_off):
        if off_dx[i] > pad:
            pad = off_dx[i]
        if -off_dx[i] > pad:
            pad = -off_dx[i]
        if off_dy[i] > pad:
            pad = off_dy[i]
        if -off_dy[i] > pad:
            pad = -off_dy[i]
    cdef Py_ssize_t w2 = w + 2 * pad
    cdef Py_ssize_t h2 = h + 2 * pad

    acc_arr = np.zeros((n_r, hc, wc), dtype=np.int32)
    cdef cnp.int32_t[:, :, ::1] acc = acc_arr
    padded_arr = np.zeros(h2 * w2, dtype=np.int32)
    cdef cnp.int32_t[::1] padded = padded_arr
    doff_arr = np.zeros(n_off, dtype=np.int64)
    cdef cnp.int64_t[::1] doff = doff_arr
    for i in range(n_off):
        doff[i] = off_dy[i] * w2 + off_dx[i]

    cdef Py_ssize_t ri, ei, oi, lo, hi, y, x
    cdef cnp.int64_t base
    for ri in range(n_r):
        lo = off_starts[ri]
        hi = off_starts[ri + 1]
        memset(&padded[0], 0, h2 * w2 * sizeof(cnp.int32_t))
        for ei in range(m):
            base = (<cnp.int64_t> (ys[ei] + pad)) * w2 + xs[ei] + pad
            for oi in range(lo, hi):
                padded[base + doff[oi]] += 1
        if cell == 1:
            for y in range(h):
                base = (<cnp.int64_t> (y + pad)) * w2 + pad
                for x in range(w):
                    acc[ri, y, x] = padded[base + x]
        else:
            for y in range(h):
                base = (<cnp.int64_t> (y + pad)) * w2 + pad
                for x in range(w):
                    acc[ri, y // cell, x // cell] += padded[base + x]
    return acc_arr
