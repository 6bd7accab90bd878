# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of _minors_py: per-sample invariant minor sums.

Same contracts as the numpy backend; selected automatically at import when
the extension has been built.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def invariants_2d(double[:, ::1] A, double[:, ::1] Ap, double[::1] y,
                  double[:, :, ::1] dv, double[:, ::1] grho):
    cdef Py_ssize_t m = A.shape[1]
    cdef Py_ssize_t NP = dv.shape[0]
    cdef Py_ssize_t i, j, s
    cdef double p, pd, q, g, acc_det, acc_ddet, acc_h

    det = np.empty(NP)
    ddet = np.empty(NP)
    h = np.empty(NP)
    cdef double[::1] det_v = det
    cdef double[::1] ddet_v = ddet
    cdef double[::1] h_v = h

    with nogil:
        for s in range(NP):
            acc_det = 0.0
            acc_ddet = 0.0
            acc_h = 0.0
            for i in range(m):
                for j in range(i + 1, m):
                    p = A[0, i] * A[1, j] - A[0, j] * A[1, i]
                    pd = (Ap[0, i] * A[1, j] + A[0, i] * Ap[1, j]
                          - Ap[0, j] * A[1, i] - A[0, j] * Ap[1, i])
                    q = (Ap[0, i] * A[0, j] + Ap[1, i] * A[1, j]
                         - Ap[0, j] * A[0, i] - Ap[1, j] * A[1, i])
                    g = dv[s, i, 0] * dv[s, j, 1] - dv[s, j, 0] * dv[s, i, 1]
                    acc_det += p * g
                    acc_ddet += pd * g
                    acc_h += q * g
                acc_h += y[i] * (grho[s, 0] * dv[s, i, 1] - grho[s, 1] * dv[s, i, 0])
            det_v[s] = acc_det
            ddet_v[s] = acc_ddet
            h_v[s] = acc_h
    return det, ddet, h


cdef inline double _det3(double a0, double a1, double a2,
                         double b0, double b1, double b2,
                         double c0, double c1, double c2) nogil:
    return (a0 * (b1 * c2 - b2 * c1)
            - b0 * (a1 * c2 - a2 * c1)
            + c0 * (a1 * b2 - a2 * b1))


def invariants_3d(double[:, ::1] A, double[:, ::1] Ap, double[::1] y,
                  double[:, :, ::1] dv, double[:, ::1] grho):
    cdef Py_ssize_t m = A.shape[1]
    cdef Py_ssize_t NP = dv.shape[0]
    cdef Py_ssize_t i, j, k, s
    cdef double p, pd, q, g
    cdef double g0, g1, g2, c0, c1, c2
    cdef double acc_det, acc_ddet, h0, h1, h2

    det = np.empty(NP)
    ddet = np.empty(NP)
    h = np.empty((NP, 3))
    cdef double[::1] det_v = det
    cdef double[::1] ddet_v = ddet
    cdef double[:, ::1] h_v = h

    with nogil:
        for s in range(NP):
            acc_det = 0.0
            acc_ddet = 0.0
            h0 = 0.0
            h1 = 0.0
            h2 = 0.0
            for i in range(m):
                for j in range(i + 1, m):
                    # pair terms: Q_ij * (grad v_i x grad v_j)
                    q = (Ap[0, i] * A[0, j] + Ap[1, i] * A[1, j] + Ap[2, i] * A[2, j]
                         - Ap[0, j] * A[0, i] - Ap[1, j] * A[1, i] - Ap[2, j] * A[2, i])
                    c0 = dv[s, i, 1] * dv[s, j, 2] - dv[s, i, 2] * dv[s, j, 1]
                    c1 = dv[s, i, 2] * dv[s, j, 0] - dv[s, i, 0] * dv[s, j, 2]
                    c2 = dv[s, i, 0] * dv[s, j, 1] - dv[s, i, 1] * dv[s, j, 0]
                    h0 += q * c0
                    h1 += q * c1
                    h2 += q * c2
                    for k in range(j + 1, m):
                        p = _det3(A[0, i], A[1, i], A[2, i],
                                  A[0, j], A[1, j], A[2, j],
                                  A[0, k], A[1, k], A[2, k])
                        pd = (_det3(Ap[0, i], Ap[1, i], Ap[2, i],
                                    A[0, j], A[1, j], A[2, j],
                                    A[0, k], A[1, k], A[2, k])
                              + _det3(A[0, i], A[1, i], A[2, i],
                                      Ap[0, j], Ap[1, j], Ap[2, j],
                                      A[0, k], A[1, k], A[2, k])
                              + _det3(A[0, i], A[1, i], A[2, i],
                                      A[0, j], A[1, j], A[2, j],
                                      Ap[0, k], Ap[1, k], Ap[2, k]))
                        g = _det3(dv[s, i, 0], dv[s, i, 1], dv[s, i, 2],
                                  dv[s, j, 0], dv[s, j, 1], dv[s, j, 2],
                                  dv[s, k, 0], dv[s, k, 1], dv[s, k, 2])
                        acc_det += p * g
                        acc_ddet += pd * g
                # density term: y_i * (grad rho x grad v_i)
                g0 = grho[s, 1] * dv[s, i, 2] - grho[s, 2] * dv[s, i, 1]
                g1 = grho[s, 2] * dv[s, i, 0] - grho[s, 0] * dv[s, i, 2]
                g2 = grho[s, 0] * dv[s, i, 1] - grho[s, 1] * dv[s, i, 0]
                h0 += y[i] * g0
                h1 += y[i] * g1
                h2 += y[i] * g2
            det_v[s] = acc_det
            ddet_v[s] = acc_ddet
            h_v[s, 0] = h0
            h_v[s, 1] = h1
            h_v[s, 2] = h2
    return det, ddet, h
