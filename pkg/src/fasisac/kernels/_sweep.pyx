# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled port-candidate kernel.

Per candidate only row ``pos`` of the response changes, so W @ G is updated
with a rank-1 correction instead of being recomputed.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt, cos, sin, NAN

cnp.import_array()

cdef double LN2 = 0.6931471805599453


cdef double _chol_logdet(double complex[:, ::1] A, Py_ssize_t n) noexcept nogil:
    # in-place lower Cholesky of a Hermitian PD matrix; NaN if not PD
    cdef Py_ssize_t i, j, p
    cdef double complex acc
    cdef double d, out = 0.0
    for j in range(n):
        d = A[j, j].real
        for p in range(j):
            d -= A[j, p].real * A[j, p].real + A[j, p].imag * A[j, p].imag
        if d <= 0.0:
            return NAN
        d = sqrt(d)
        A[j, j] = d
        out += log(d)
        for i in range(j + 1, n):
            acc = A[i, j]
            for p in range(j):
                acc -= A[i, p] * A[j, p].conjugate()
            A[i, j] = acc / d
    return 2.0 * out


def candidate_metrics(const double complex[:, ::1] G_full,
                      const double complex[:, ::1] W,
                      const cnp.int64_t[::1] sel,
                      Py_ssize_t pos,
                      const cnp.int64_t[::1] cands,
                      double psi,
                      double sigma2):
    cdef Py_ssize_t m0 = sel.shape[0]
    cdef Py_ssize_t N = G_full.shape[1]
    cdef Py_ssize_t C = cands.shape[0]
    cdef Py_ssize_t c, i, j, n, l, row, port
    cdef double complex acc, delta, ai, aj
    cdef double inv_s2 = 1.0 / sigma2
    cdef double ph

    rates_arr = np.empty(C, dtype=np.float64)
    gains_arr = np.empty(C, dtype=np.float64)
    cdef double[::1] rates = rates_arr
    cdef double[::1] gains = gains_arr
    cdef double complex[:, ::1] WG0 = np.zeros((m0, N), dtype=np.complex128)
    cdef double complex[:, ::1] WG = np.empty((m0, N), dtype=np.complex128)
    cdef double complex[:, ::1] A = np.empty((N, N), dtype=np.complex128)
    cdef double complex[::1] a = np.empty(m0, dtype=np.complex128)
    cdef double complex[::1] Wa = np.empty(m0, dtype=np.complex128)
    cdef cnp.int64_t[::1] ports = np.empty(m0, dtype=np.int64)

    with nogil:
        # W @ G for the incumbent selection
        for i in range(m0):
            for j in range(m0):
                row = sel[j] - 1
                for n in range(N):
                    WG0[i, n] += W[i, j] * G_full[row, n]

        for c in range(C):
            port = cands[c] - 1
            row = sel[pos] - 1
            for i in range(m0):
                for n in range(N):
                    delta = G_full[port, n] - G_full[row, n]
                    WG[i, n] = WG0[i, n] + W[i, pos] * delta
            # A = I + Gc^H W Gc / sigma2, lower triangle only
            for n in range(N):
                for l in range(n + 1):
                    acc = 0.0
                    for j in range(m0):
                        if j == pos:
                            acc += G_full[port, n].conjugate() * WG[j, l]
                        else:
                            acc += G_full[sel[j] - 1, n].conjugate() * WG[j, l]
                    A[n, l] = acc * inv_s2
                A[n, n] = 1.0 + A[n, n].real
            rates[c] = _chol_logdet(A, N) / LN2

            for j in range(m0):
                ports[j] = sel[j]
            ports[pos] = cands[c]
            for j in range(m0):
                ph = psi * <double>(ports[j] - ports[0])
                a[j] = cos(ph) + 1j * sin(ph)
            a[0] = 1.0
            acc = 0.0
            for i in range(m0):
                aj = 0.0
                for j in range(m0):
                    aj += W[i, j] * a[j]
                acc += a[i].conjugate() * aj
            gains[c] = acc.real
    return rates_arr, gains_arr
