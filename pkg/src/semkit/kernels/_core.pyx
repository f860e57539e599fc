# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled tensor-product kernels.

Same contracts and array layouts as semkit.kernels._fallback; plain nested
loops over (element, node) indices, which beat the batched-BLAS fallback at
the small per-element matrix sizes this solver runs at.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def grad_ref_2d(const double[:, ::1] d, const double[:, :, ::1] u):
    cdef Py_ssize_t ne = u.shape[0], n = u.shape[1]
    ur_arr = np.empty((ne, n, n))
    us_arr = np.empty((ne, n, n))
    cdef double[:, :, ::1] ur = ur_arr
    cdef double[:, :, ::1] us = us_arr
    cdef Py_ssize_t e, i, j, p
    cdef double accr, accs
    for e in range(ne):
        for j in range(n):
            for i in range(n):
                accr = 0.0
                accs = 0.0
                for p in range(n):
                    accr += d[i, p] * u[e, j, p]
                    accs += d[j, p] * u[e, p, i]
                ur[e, j, i] = accr
                us[e, j, i] = accs
    return ur_arr, us_arr


def grad_ref_3d(const double[:, ::1] d, const double[:, :, :, ::1] u):
    cdef Py_ssize_t ne = u.shape[0], n = u.shape[1]
    ur_arr = np.empty((ne, n, n, n))
    us_arr = np.empty((ne, n, n, n))
    ut_arr = np.empty((ne, n, n, n))
    cdef double[:, :, :, ::1] ur = ur_arr
    cdef double[:, :, :, ::1] us = us_arr
    cdef double[:, :, :, ::1] ut = ut_arr
    cdef Py_ssize_t e, i, j, k, p
    cdef double accr, accs, acct
    for e in range(ne):
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    accr = 0.0
                    accs = 0.0
                    acct = 0.0
                    for p in range(n):
                        accr += d[i, p] * u[e, k, j, p]
                        accs += d[j, p] * u[e, k, p, i]
                        acct += d[k, p] * u[e, p, j, i]
                    ur[e, k, j, i] = accr
                    us[e, k, j, i] = accs
                    ut[e, k, j, i] = acct
    return ur_arr, us_arr, ut_arr


def stiffness_2d(const double[:, ::1] d, const double[:, :, :, ::1] g, const double[:, :, ::1] u):
    cdef Py_ssize_t ne = u.shape[0], n = u.shape[1]
    out_arr = np.empty((ne, n, n))
    fr_arr = np.empty((n, n))
    fs_arr = np.empty((n, n))
    cdef double[:, :, ::1] out = out_arr
    cdef double[:, ::1] fr = fr_arr
    cdef double[:, ::1] fs = fs_arr
    cdef Py_ssize_t e, i, j, p
    cdef double accr, accs, acc
    for e in range(ne):
        for j in range(n):
            for i in range(n):
                accr = 0.0
                accs = 0.0
                for p in range(n):
                    accr += d[i, p] * u[e, j, p]
                    accs += d[j, p] * u[e, p, i]
                fr[j, i] = g[e, 0, j, i] * accr + g[e, 1, j, i] * accs
                fs[j, i] = g[e, 1, j, i] * accr + g[e, 2, j, i] * accs
        for j in range(n):
            for i in range(n):
                acc = 0.0
                for p in range(n):
                    acc += d[p, i] * fr[j, p] + d[p, j] * fs[p, i]
                out[e, j, i] = acc
    return out_arr


def stiffness_3d(const double[:, ::1] d, const double[:, :, :, :, ::1] g,
                 const double[:, :, :, ::1] u):
    cdef Py_ssize_t ne = u.shape[0], n = u.shape[1]
    out_arr = np.empty((ne, n, n, n))
    fr_arr = np.empty((n, n, n))
    fs_arr = np.empty((n, n, n))
    ft_arr = np.empty((n, n, n))
    cdef double[:, :, :, ::1] out = out_arr
    cdef double[:, :, ::1] fr = fr_arr
    cdef double[:, :, ::1] fs = fs_arr
    cdef double[:, :, ::1] ft = ft_arr
    cdef Py_ssize_t e, i, j, k, p
    cdef double accr, accs, acct, acc
    for e in range(ne):
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    accr = 0.0
                    accs = 0.0
                    acct = 0.0
                    for p in range(n):
                        accr += d[i, p] * u[e, k, j, p]
                        accs += d[j, p] * u[e, k, p, i]
                        acct += d[k, p] * u[e, p, j, i]
                    fr[k, j, i] = (g[e, 0, k, j, i] * accr
                                   + g[e, 1, k, j, i] * accs
                                   + g[e, 2, k, j, i] * acct)
                    fs[k, j, i] = (g[e, 1, k, j, i] * accr
                                   + g[e, 3, k, j, i] * accs
                                   + g[e, 4, k, j, i] * acct)
                    ft[k, j, i] = (g[e, 2, k, j, i] * accr
                                   + g[e, 4, k, j, i] * accs
                                   + g[e, 5, k, j, i] * acct)
        for k in range(n):
            for j in range(n):
                for i in range(n):
                    acc = 0.0
                    for p in range(n):
                        acc += (d[p, i] * fr[k, j, p]
                                + d[p, j] * fs[k, p, i]
                                + d[p, k] * ft[p, j, i])
                    out[e, k, j, i] = acc
    return out_arr


def tensor2(const double[:, ::1] ax, const double[:, ::1] ay, const double[:, :, ::1] u):
    cdef Py_ssize_t ne = u.shape[0], n = u.shape[1]
    cdef Py_ssize_t mx = ax.shape[0], my = ay.shape[0]
    out_arr = np.empty((ne, my, mx))
    tmp_arr = np.empty((my, n))
    cdef double[:, :, ::1] out = out_arr
    cdef double[:, ::1] tmp = tmp_arr
    cdef Py_ssize_t e, i, j, p
    cdef double acc
    for e in range(ne):
        for j in range(my):
            for i in range(n):
                acc = 0.0
                for p in range(n):
                    acc += ay[j, p] * u[e, p, i]
                tmp[j, i] = acc
        for j in range(my):
            for i in range(mx):
                acc = 0.0
                for p in range(n):
                    acc += tmp[j, p] * ax[i, p]
                out[e, j, i] = acc
    return out_arr


def tensor3(const double[:, ::1] ax, const double[:, ::1] ay, const double[:, ::1] az,
            const double[:, :, :, ::1] u):
    cdef Py_ssize_t ne = u.shape[0], n = u.shape[1]
    cdef Py_ssize_t mx = ax.shape[0], my = ay.shape[0], mz = az.shape[0]
    out_arr = np.empty((ne, mz, my, mx))
    t1_arr = np.empty((mz, n, n))
    t2_arr = np.empty((mz, my, n))
    cdef double[:, :, :, ::1] out = out_arr
    cdef double[:, :, ::1] t1 = t1_arr
    cdef double[:, :, ::1] t2 = t2_arr
    cdef Py_ssize_t e, i, j, k, p
    cdef double acc
    for e in range(ne):
        for k in range(mz):
            for j in range(n):
                for i in range(n):
                    acc = 0.0
                    for p in range(n):
                        acc += az[k, p] * u[e, p, j, i]
                    t1[k, j, i] = acc
        for k in range(mz):
            for j in range(my):
                for i in range(n):
                    acc = 0.0
                    for p in range(n):
                        acc += ay[j, p] * t1[k, p, i]
                    t2[k, j, i] = acc
        for k in range(mz):
            for j in range(my):
                for i in range(mx):
                    acc = 0.0
                    for p in range(n):
                        acc += t2[k, j, p] * ax[i, p]
                    out[e, k, j, i] = acc
    return out_arr
