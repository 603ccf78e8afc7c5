# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for clustering local moves and layout energy/gradients.

``local_move`` is an operation-for-operation transliteration of the pure
Python fallback so both backends yield bit-identical assignments; keep the
two in sync when changing either.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt

ctypedef cnp.int64_t i64


def local_move(cnp.ndarray[i64, ndim=1] indptr_arr,
               cnp.ndarray[i64, ndim=1] indices_arr,
               cnp.ndarray[double, ndim=1] weights_arr,
               cnp.ndarray[i64, ndim=1] node_size_arr,
               cnp.ndarray[i64, ndim=1] assign_arr,
               cnp.ndarray[i64, ndim=1] csize_arr,
               cnp.ndarray[i64, ndim=1] order_arr,
               double gamma,
               cnp.ndarray[i64, ndim=1] parent_arr):
    cdef i64[::1] ip = indptr_arr
    cdef i64[::1] idx = indices_arr
    cdef double[::1] wgt = weights_arr
    cdef i64[::1] nsz = node_size_arr
    cdef i64[::1] asg = assign_arr
    cdef i64[::1] csz = csize_arr
    cdef i64[::1] order = order_arr
    cdef i64[::1] par = parent_arr

    cdef Py_ssize_t n = asg.shape[0]
    cdef Py_ssize_t cap = n + 1

    queue_np = np.zeros(cap, dtype=np.int64)
    in_queue_np = np.zeros(n, dtype=np.uint8)
    nbr_w_np = np.zeros(n, dtype=np.float64)
    seen_np = np.zeros(n, dtype=np.uint8)
    touched_np = np.zeros(n, dtype=np.int64)
    cdef i64[::1] queue = queue_np
    cdef cnp.uint8_t[::1] in_queue = in_queue_np
    cdef double[::1] nbr_w = nbr_w_np
    cdef cnp.uint8_t[::1] seen = seen_np
    cdef i64[::1] touched = touched_np

    cdef Py_ssize_t head = 0, tail, pos, ntouch, t
    cdef i64 v, u, a, c, pv, sv, e_id, best_c, free_hint = 0, moves = 0
    cdef i64 e
    cdef double w_a, best_gain, g

    for pos in range(n):
        queue[pos] = order[pos]
        in_queue[order[pos]] = 1
    tail = n % cap

    while head != tail:
        v = queue[head]
        head = (head + 1) % cap
        in_queue[v] = 0

        a = asg[v]
        pv = par[v]
        sv = nsz[v]

        ntouch = 0
        for e in range(ip[v], ip[v + 1]):
            u = idx[e]
            if par[u] != pv:
                continue
            c = asg[u]
            if not seen[c]:
                seen[c] = 1
                nbr_w[c] = 0.0
                touched[ntouch] = c
                ntouch += 1
            nbr_w[c] += wgt[e]

        csz[a] -= sv
        w_a = nbr_w[a] if seen[a] else 0.0
        best_c = a
        best_gain = w_a - gamma * <double>(sv * csz[a])

        if csz[a] > 0:
            # all ids below free_hint are occupied
            while csz[free_hint] != 0:
                free_hint += 1
            e_id = free_hint
            if 0.0 > best_gain or (best_gain == 0.0 and e_id < best_c):
                best_c = e_id
                best_gain = 0.0

        for t in range(ntouch):
            c = touched[t]
            if c == a:
                continue
            g = nbr_w[c] - gamma * <double>(sv * csz[c])
            if g > best_gain or (g == best_gain and c < best_c):
                best_gain = g
                best_c = c

        for t in range(ntouch):
            seen[touched[t]] = 0

        csz[best_c] += sv
        if best_c != a:
            asg[v] = best_c
            moves += 1
            if csz[a] == 0 and a < free_hint:
                free_hint = a
            for e in range(ip[v], ip[v + 1]):
                u = idx[e]
                if par[u] == pv and asg[u] != best_c and not in_queue[u]:
                    queue[tail] = u
                    tail = (tail + 1) % cap
                    in_queue[u] = 1

    return int(moves)


def vos_energy(cnp.ndarray[double, ndim=2] X_arr,
               cnp.ndarray[i64, ndim=1] indptr_arr,
               cnp.ndarray[i64, ndim=1] indices_arr,
               cnp.ndarray[double, ndim=1] weights_arr):
    cdef double[:, ::1] X = X_arr
    cdef i64[::1] ip = indptr_arr
    cdef i64[::1] idx = indices_arr
    cdef double[::1] wgt = weights_arr
    cdef Py_ssize_t n = X.shape[0]
    cdef Py_ssize_t i, j
    cdef i64 e
    cdef double dx, dy, v = 0.0, d = 0.0

    for i in range(n):
        for e in range(ip[i], ip[i + 1]):
            j = idx[e]
            dx = X[i, 0] - X[j, 0]
            dy = X[i, 1] - X[j, 1]
            v += wgt[e] * (dx * dx + dy * dy)
        for j in range(i + 1, n):
            dx = X[i, 0] - X[j, 0]
            dy = X[i, 1] - X[j, 1]
            d += sqrt(dx * dx + dy * dy)
    return 0.5 * v, d


def vos_grad(cnp.ndarray[double, ndim=2] X_arr,
             cnp.ndarray[i64, ndim=1] indptr_arr,
             cnp.ndarray[i64, ndim=1] indices_arr,
             cnp.ndarray[double, ndim=1] weights_arr,
             double V, double D):
    cdef double[:, ::1] X = X_arr
    cdef i64[::1] ip = indptr_arr
    cdef i64[::1] idx = indices_arr
    cdef double[::1] wgt = weights_arr
    cdef Py_ssize_t n = X.shape[0]

    out_np = np.zeros((n, 2), dtype=np.float64)
    cdef double[:, ::1] out = out_np
    cdef Py_ssize_t i, j
    cdef i64 e
    cdef double dx, dy, dist, gvx, gvy, gdx, gdy
    cdef double inv_d2 = 1.0 / (D * D)
    cdef double coef_d = 2.0 * V / (D * D * D)

    for i in range(n):
        gvx = 0.0
        gvy = 0.0
        for e in range(ip[i], ip[i + 1]):
            j = idx[e]
            dx = X[i, 0] - X[j, 0]
            dy = X[i, 1] - X[j, 1]
            gvx += 2.0 * wgt[e] * dx
            gvy += 2.0 * wgt[e] * dy
        gdx = 0.0
        gdy = 0.0
        for j in range(n):
            if j == i:
                continue
            dx = X[i, 0] - X[j, 0]
            dy = X[i, 1] - X[j, 1]
            dist = sqrt(dx * dx + dy * dy)
            if dist > 0.0:
                gdx += dx / dist
                gdy += dy / dist
        out[i, 0] = gvx * inv_d2 - coef_d * gdx
        out[i, 1] = gvy * inv_d2 - coef_d * gdy
    return out_np
