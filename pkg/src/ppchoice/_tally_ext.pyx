# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled component-pair tallies; same contract as ppchoice._tally_py."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def tally(levels, bint broader=True):
    cdef const unsigned char[:, :, ::1] L = np.ascontiguousarray(levels, dtype=np.uint8)
    cdef Py_ssize_t N = L.shape[0], m = L.shape[1], n = L.shape[2]
    cdef Py_ssize_t p, i, j, x, y, h, k, l, nd, z, o
    cdef unsigned char ah, zk, ok, ez, eo

    e1p_arr = np.zeros((n, n), dtype=np.int64)
    e1m_arr = np.zeros((n, n), dtype=np.int64)
    cdef long long[:, ::1] e1p = e1p_arr
    cdef long long[:, ::1] e1m = e1m_arr
    cdef Py_ssize_t nb = n if broader else 0
    shape2 = (nb, nb)
    shape3 = (nb, nb, nb)
    e2p_arr = np.zeros(shape2, dtype=np.int64)
    e2m_arr = np.zeros(shape2, dtype=np.int64)
    e3p_arr = np.zeros(shape3, dtype=np.int64)
    e3m_arr = np.zeros(shape3, dtype=np.int64)
    cdef long long[:, ::1] e2p = e2p_arr
    cdef long long[:, ::1] e2m = e2m_arr
    cdef long long[:, :, ::1] e3p = e3p_arr
    cdef long long[:, :, ::1] e3m = e3m_arr
    diff_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] diff = diff_arr

    for p in range(N):
        for i in range(m):
            for j in range(i + 1, m):
                nd = 0
                for h in range(n):
                    if L[p, i, h] != L[p, j, h]:
                        diff[nd] = h
                        nd += 1
                for x in range(nd):
                    h = diff[x]
                    ah = L[p, i, h]
                    for y in range(x + 1, nd):
                        k = diff[y]
                        if ah == L[p, i, k]:
                            e1p[h, k] += 1
                        else:
                            e1m[h, k] += 1
                    if not broader:
                        continue
                    if ah == 0:
                        z = i
                        o = j
                    else:
                        z = j
                        o = i
                    for k in range(n):
                        if L[p, i, k] == L[p, j, k]:
                            if L[p, i, k]:
                                e2p[h, k] += 1
                            else:
                                e2m[h, k] += 1
                    for k in range(n):
                        if k == h:
                            continue
                        zk = L[p, z, k]
                        ok = L[p, o, k]
                        for l in range(k + 1, n):
                            if l == h:
                                continue
                            ez = zk != L[p, z, l]
                            eo = ok != L[p, o, l]
                            if ez and not eo:
                                e3p[h, k, l] += 1
                            elif eo and not ez:
                                e3m[h, k, l] += 1

    e1p_arr += e1p_arr.T
    e1m_arr += e1m_arr.T
    out = {"eta1_plus": e1p_arr, "eta1_minus": e1m_arr}
    if broader:
        e3p_arr += e3p_arr.transpose(0, 2, 1)
        e3m_arr += e3m_arr.transpose(0, 2, 1)
        out.update(eta2_plus=e2p_arr, eta2_minus=e2m_arr, eta3_plus=e3p_arr, eta3_minus=e3m_arr)
    return out
