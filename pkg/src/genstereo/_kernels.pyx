# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; mirrors ``genstereo._fallback`` function by function."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def build_volume(const unsigned char[:, ::1] ref, const unsigned char[:, ::1] tgt,
                 const double[:, ::1] table, Py_ssize_t d_max):
    cdef Py_ssize_t h = ref.shape[0], w = ref.shape[1], nd = d_max + 1
    cdef Py_ssize_t r, c, d
    out = np.zeros((h, w, nd), dtype=np.float64)
    cdef double[:, :, ::1] vol = out
    with nogil:
        for r in range(h):
            for c in range(w):
                for d in range(nd):
                    if c + d >= w:
                        break
                    vol[r, c, d] = table[ref[r, c], tgt[r, c + d]]
    return out


def cell_possibility(const double[:, :, ::1] vol, const int[:, ::1] chrom):
    cdef Py_ssize_t h = chrom.shape[0], w = chrom.shape[1], r, c
    out = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] p = out
    with nogil:
        for r in range(h):
            for c in range(w):
                p[r, c] = vol[r, c, chrom[r, c]]
    return out


def fitness(const double[:, :, ::1] vol, const double[:, ::1] ref_grad,
            const double[:, ::1] tgt_grad, const int[:, ::1] chrom, Py_ssize_t radius):
    cdef Py_ssize_t h = chrom.shape[0], w = chrom.shape[1]
    cdef Py_ssize_t r, c, d, r0, r1, c0, c1
    integral = np.zeros((h + 1, w + 1), dtype=np.float64)
    cdef double[:, ::1] ii = integral
    cdef double row_acc, total = 0.0, s, box
    with nogil:
        # integral image of the per-cell possibility plane
        for r in range(h):
            row_acc = 0.0
            for c in range(w):
                row_acc = row_acc + vol[r, c, chrom[r, c]]
                ii[r + 1, c + 1] = ii[r, c + 1] + row_acc
        for r in range(h):
            r0 = r - radius if r >= radius else 0
            r1 = r + radius + 1 if r + radius + 1 <= h else h
            row_acc = 0.0
            for c in range(w):
                d = chrom[r, c]
                if c + d >= w:
                    continue
                s = ref_grad[r, c] * tgt_grad[r, c + d]
                if s == 0.0:
                    continue
                c0 = c - radius if c >= radius else 0
                c1 = c + radius + 1 if c + radius + 1 <= w else w
                box = ii[r1, c1] - ii[r0, c1] - ii[r1, c0] + ii[r0, c0]
                row_acc = row_acc + s * box
            total = total + row_acc
    return total
