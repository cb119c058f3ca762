# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled parity sampling kernels.

Same counter-based streams as ``_rng_py``; results are bit-identical.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, log, sqrt
from libc.stdint cimport uint64_t

cnp.import_array()

cdef double _TWO_PI = 6.283185307179586
cdef double _INV53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _splitmix64(uint64_t x) nogil:
    cdef uint64_t z = x + 0x9E3779B97F4A7C15ULL
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _uniform(uint64_t key, uint64_t ctr) nogil:
    return <double>(_splitmix64(key + ctr) >> 11) * _INV53


def count_below(uint64_t key, Py_ssize_t n, double p):
    cdef Py_ssize_t i
    cdef Py_ssize_t total = 0
    with nogil:
        for i in range(n):
            if _uniform(key, <uint64_t>i) < p:
                total += 1
    return total


def outcomes_below(uint64_t key, Py_ssize_t n, double p):
    out = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            o[i] = 1 if _uniform(key, <uint64_t>i) < p else 0
    return out


cdef inline double _noisy_prob(uint64_t noise_key, Py_ssize_t shot, double phase_total,
                               const double[::1] coeffs) nogil:
    cdef Py_ssize_t j, m = coeffs.shape[0]
    cdef uint64_t base = <uint64_t>(2 * m * shot)
    cdef double u1, u2, z, phi = phase_total
    for j in range(m):
        u1 = _uniform(noise_key, base + 2 * j)
        u2 = _uniform(noise_key, base + 2 * j + 1)
        z = sqrt(-2.0 * log(1.0 - u1)) * cos(_TWO_PI * u2)
        phi = phi + z * coeffs[j]
    return 0.5 * (1.0 + sin(phi))


def noisy_count(uint64_t key, uint64_t noise_key, Py_ssize_t n, double phase_total, coeffs):
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef Py_ssize_t i
    cdef Py_ssize_t total = 0
    with nogil:
        for i in range(n):
            if _uniform(key, <uint64_t>i) < _noisy_prob(noise_key, i, phase_total, c):
                total += 1
    return total


def noisy_outcomes(uint64_t key, uint64_t noise_key, Py_ssize_t n, double phase_total, coeffs):
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    out = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            o[i] = 1 if _uniform(key, <uint64_t>i) < _noisy_prob(noise_key, i, phase_total, c) else 0
    return out
