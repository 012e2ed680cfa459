# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled frequency-sweep kernels (see ``_ref`` for the reference)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

cdef double TWO_PI = 6.283185307179586476925287


def waveguide_grid(offsets_ghz, double gamma, double fsr_equivalent_ghz):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] f = np.ascontiguousarray(offsets_ghz, dtype=np.float64)
    cdef Py_ssize_t n = f.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef double ang
    cdef double k = TWO_PI / fsr_equivalent_ghz
    cdef Py_ssize_t i
    for i in range(n):
        ang = k * f[i]
        out[i] = gamma * (cos(ang) - 1j * sin(ang))
    return out


def ring_allpass_grid(offsets_ghz, double self_coupling,
                      double round_trip_amplitude, double fsr_ghz,
                      double detune_ghz):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] f = np.ascontiguousarray(offsets_ghz, dtype=np.float64)
    cdef Py_ssize_t n = f.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef double ang
    cdef double k = TWO_PI / fsr_ghz
    cdef double c = self_coupling
    cdef double complex p
    cdef Py_ssize_t i
    for i in range(n):
        ang = k * (f[i] - detune_ghz)
        p = round_trip_amplitude * (cos(ang) - 1j * sin(ang))
        out[i] = (c - p) / (1.0 - c * p)
    return out


def ring_adddrop_grid(offsets_ghz, double self_coupling_in,
                      double self_coupling_drop, double round_trip_amplitude,
                      double fsr_ghz, double detune_ghz):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] f = np.ascontiguousarray(offsets_ghz, dtype=np.float64)
    cdef Py_ssize_t n = f.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] through_in = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] drop = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] through_add = np.empty(n, dtype=np.complex128)
    cdef double c1 = self_coupling_in
    cdef double c2 = self_coupling_drop
    cdef double s1s2 = sqrt((1.0 - c1 * c1) * (1.0 - c2 * c2))
    cdef double g = round_trip_amplitude
    cdef double sg = sqrt(g)
    cdef double k = TWO_PI / fsr_ghz
    cdef double ang, hang
    cdef double complex p, ph, den
    cdef Py_ssize_t i
    for i in range(n):
        ang = k * (f[i] - detune_ghz)
        hang = 0.5 * ang
        p = g * (cos(ang) - 1j * sin(ang))
        ph = sg * (cos(hang) - 1j * sin(hang))
        den = 1.0 - c1 * c2 * p
        through_in[i] = (c1 - c2 * p) / den
        drop[i] = (-s1s2 * ph) / den
        through_add[i] = (c2 - c1 * p) / den
    return through_in, drop, through_add


def beat_phasor_grid(double complex h_zero, h_minus, h_plus,
                     double complex e_minus, double complex e_carrier,
                     double complex e_plus, double responsivity):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] hm = np.ascontiguousarray(h_minus, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] hp = np.ascontiguousarray(h_plus, dtype=np.complex128)
    cdef Py_ssize_t n = hm.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(n, dtype=np.complex128)
    cdef double complex ec = h_zero * e_carrier
    cdef double complex ec_conj = ec.conjugate()
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = responsivity * (ec * (hm[i] * e_minus).conjugate()
                                 + ec_conj * (hp[i] * e_plus))
    return out
