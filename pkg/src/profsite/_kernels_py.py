"""Pure-Python versions of the table kernels.

Every function here has a twin in ``_kernels.pyx`` with the same signature
and the same return values; ``profsite.kernels`` picks one at import.
Tables are 2-D ``int64`` arrays indexed ``[group element, point]``.
"""

import numpy as np


def associativity_violation(mul):
    n = len(mul)
    m = mul.tolist()
    for a in range(n):
        row_a = m[a]
        for b in range(n):
            ab = row_a[b]
            row_ab = m[ab]
            row_b = m[b]
            for c in range(n):
                if row_ab[c] != row_a[row_b[c]]:
                    return (a, b, c)
    return None


def homomorphism_violation(mul_src, mul_dst, phi):
    src = mul_src.tolist()
    dst = mul_dst.tolist()
    ph = phi.tolist()
    n = len(src)
    for a in range(n):
        for b in range(n):
            if ph[src[a][b]] != dst[ph[a]][ph[b]]:
                return (a, b)
    return None


def subgroup_closure(mul, mask):
    m = mul.tolist()
    members = [i for i, v in enumerate(mask.tolist()) if v]
    inside = set(members)
    frontier = list(members)
    while frontier:
        new = []
        for a in frontier:
            for b in members:
                for c in (m[a][b], m[b][a]):
                    if c not in inside:
                        inside.add(c)
                        new.append(c)
        members.extend(new)
        frontier = new
    out = np.zeros(len(mask), dtype=np.uint8)
    out[sorted(inside)] = 1
    return out


def orbit_labels(action):
    rows = action.tolist()
    n = action.shape[1]
    labels = [-1] * n
    for start in range(n):
        if labels[start] >= 0:
            continue
        labels[start] = start
        stack = [start]
        while stack:
            x = stack.pop()
            for row in rows:
                y = row[x]
                if labels[y] < 0:
                    labels[y] = start
                    stack.append(y)
    return np.array(labels, dtype=np.int64)


def equivariance_violation(act_x, act_y, table):
    ax = act_x.tolist()
    ay = act_y.tolist()
    f = list(table)
    for g in range(len(ax)):
        rx = ax[g]
        ry = ay[g]
        for x in range(len(f)):
            if f[rx[x]] != ry[f[x]]:
                return (g, x)
    return None


def brute_force_equivariant(act_x, act_y):
    """Every set map X -> Y that commutes with the action, by odometer."""
    nx = act_x.shape[1]
    ny = act_y.shape[1]
    if nx == 0:
        return [()]
    if ny == 0:
        return []
    ax = act_x.tolist()
    ay = act_y.tolist()
    m = len(ax)
    f = [0] * nx
    found = []
    while True:
        ok = True
        for g in range(m):
            rx = ax[g]
            ry = ay[g]
            for x in range(nx):
                if f[rx[x]] != ry[f[x]]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            found.append(tuple(f))
        k = nx - 1
        while k >= 0:
            f[k] += 1
            if f[k] < ny:
                break
            f[k] = 0
            k -= 1
        if k < 0:
            return found
