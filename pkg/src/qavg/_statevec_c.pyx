# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector kernels; mirrors ``_statevec_py`` exactly."""

import numpy as np

cimport numpy as cnp

BACKEND = "compiled"


def apply_1q(cnp.complex128_t[::1] psi, cnp.complex128_t[:, ::1] m, int q, int n):
    cdef Py_ssize_t size = psi.shape[0]
    cdef Py_ssize_t step = 1 << q
    cdef Py_ssize_t block = step << 1
    cdef Py_ssize_t base, k, i0, i1
    cdef double complex a0, a1
    cdef double complex m00 = m[0, 0], m01 = m[0, 1], m10 = m[1, 0], m11 = m[1, 1]
    for base in range(0, size, block):
        for k in range(step):
            i0 = base + k
            i1 = i0 + step
            a0 = psi[i0]
            a1 = psi[i1]
            psi[i0] = m00 * a0 + m01 * a1
            psi[i1] = m10 * a0 + m11 * a1


def apply_2q(cnp.complex128_t[::1] psi, cnp.complex128_t[:, ::1] m,
             int q_hi, int q_lo, int n):
    cdef Py_ssize_t size = psi.shape[0]
    cdef Py_ssize_t hi = 1 << q_hi
    cdef Py_ssize_t lo = 1 << q_lo
    cdef Py_ssize_t i, j
    cdef double complex a0, a1, a2, a3
    cdef double complex m00 = m[0, 0], m01 = m[0, 1], m02 = m[0, 2], m03 = m[0, 3]
    cdef double complex m10 = m[1, 0], m11 = m[1, 1], m12 = m[1, 2], m13 = m[1, 3]
    cdef double complex m20 = m[2, 0], m21 = m[2, 1], m22 = m[2, 2], m23 = m[2, 3]
    cdef double complex m30 = m[3, 0], m31 = m[3, 1], m32 = m[3, 2], m33 = m[3, 3]
    for i in range(size):
        if (i & hi) or (i & lo):
            continue
        a0 = psi[i]
        a1 = psi[i + lo]
        a2 = psi[i + hi]
        a3 = psi[i + hi + lo]
        psi[i] = m00 * a0 + m01 * a1 + m02 * a2 + m03 * a3
        psi[i + lo] = m10 * a0 + m11 * a1 + m12 * a2 + m13 * a3
        psi[i + hi] = m20 * a0 + m21 * a1 + m22 * a2 + m23 * a3
        psi[i + hi + lo] = m30 * a0 + m31 * a1 + m32 * a2 + m33 * a3


def prob_one(cnp.complex128_t[::1] psi, int q, int n):
    cdef Py_ssize_t size = psi.shape[0]
    cdef Py_ssize_t step = 1 << q
    cdef Py_ssize_t block = step << 1
    cdef Py_ssize_t base, k, i1
    cdef double acc = 0.0
    cdef double complex a
    for base in range(0, size, block):
        for k in range(step):
            i1 = base + k + step
            a = psi[i1]
            acc += a.real * a.real + a.imag * a.imag
    return acc


def project(cnp.complex128_t[::1] psi, int q, int outcome, double scale, int n):
    cdef Py_ssize_t size = psi.shape[0]
    cdef Py_ssize_t step = 1 << q
    cdef Py_ssize_t block = step << 1
    cdef Py_ssize_t base, k, idx
    cdef Py_ssize_t kill = step if outcome == 0 else 0
    for base in range(0, size, block):
        for k in range(step):
            idx = base + k + kill
            psi[idx] = 0.0
    for idx in range(size):
        psi[idx] = psi[idx] * scale
