# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled table kernels; see ``_kernels_py`` for the reference versions."""

import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t idx_t


def associativity_violation(const idx_t[:, ::1] mul):
    cdef Py_ssize_t n = mul.shape[0], a, b, c
    cdef idx_t ab
    for a in range(n):
        for b in range(n):
            ab = mul[a, b]
            for c in range(n):
                if mul[ab, c] != mul[a, mul[b, c]]:
                    return (a, b, c)
    return None


def homomorphism_violation(const idx_t[:, ::1] mul_src, const idx_t[:, ::1] mul_dst, const idx_t[::1] phi):
    cdef Py_ssize_t n = mul_src.shape[0], a, b
    for a in range(n):
        for b in range(n):
            if phi[mul_src[a, b]] != mul_dst[phi[a], phi[b]]:
                return (a, b)
    return None


def subgroup_closure(const idx_t[:, ::1] mul, mask):
    cdef Py_ssize_t n = mul.shape[0], i, j, count, new_count
    out = np.array(mask, dtype=np.uint8, copy=True)
    cdef cnp.uint8_t[::1] inside = out
    cdef idx_t[::1] members = np.empty(n, dtype=np.int64)
    count = 0
    for i in range(n):
        if inside[i]:
            members[count] = i
            count += 1
    new_count = count
    cdef Py_ssize_t done = 0
    cdef idx_t c
    while done < new_count:
        count = new_count
        for i in range(done, count):
            for j in range(count):
                c = mul[members[i], members[j]]
                if not inside[c]:
                    inside[c] = 1
                    members[new_count] = c
                    new_count += 1
                c = mul[members[j], members[i]]
                if not inside[c]:
                    inside[c] = 1
                    members[new_count] = c
                    new_count += 1
        done = count
    return out


def orbit_labels(const idx_t[:, ::1] action):
    cdef Py_ssize_t m = action.shape[0], n = action.shape[1]
    cdef Py_ssize_t start, g, top
    cdef idx_t x, y
    labels_arr = np.full(n, -1, dtype=np.int64)
    cdef idx_t[::1] labels = labels_arr
    cdef idx_t[::1] stack = np.empty(n if n > 0 else 1, dtype=np.int64)
    for start in range(n):
        if labels[start] >= 0:
            continue
        labels[start] = start
        stack[0] = start
        top = 1
        while top > 0:
            top -= 1
            x = stack[top]
            for g in range(m):
                y = action[g, x]
                if labels[y] < 0:
                    labels[y] = start
                    stack[top] = y
                    top += 1
    return labels_arr


def equivariance_violation(const idx_t[:, ::1] act_x, const idx_t[:, ::1] act_y, table):
    cdef const idx_t[::1] f = np.ascontiguousarray(table, dtype=np.int64).reshape(-1)
    cdef Py_ssize_t m = act_x.shape[0], nx = f.shape[0], g, x
    for g in range(m):
        for x in range(nx):
            if f[act_x[g, x]] != act_y[g, f[x]]:
                return (g, x)
    return None


def brute_force_equivariant(const idx_t[:, ::1] act_x, const idx_t[:, ::1] act_y):
    """Every set map X -> Y that commutes with the action, by odometer."""
    cdef Py_ssize_t m = act_x.shape[0], nx = act_x.shape[1], ny = act_y.shape[1]
    cdef Py_ssize_t g, x, k
    cdef bint ok
    if nx == 0:
        return [()]
    if ny == 0:
        return []
    f_arr = np.zeros(nx, dtype=np.int64)
    cdef idx_t[::1] f = f_arr
    found = []
    while True:
        ok = True
        for g in range(m):
            for x in range(nx):
                if f[act_x[g, x]] != act_y[g, f[x]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            found.append(tuple(f_arr.tolist()))
        k = nx - 1
        while k >= 0:
            f[k] += 1
            if f[k] < ny:
                break
            f[k] = 0
            k -= 1
        if k < 0:
            return found
