"""Pure-Python kernels.

Drop-in fallback for the compiled extension. ``local_move`` mirrors the
native loop operation for operation so both backends produce bit-identical
cluster assignments; the layout energy/gradient helpers are vectorized
with numpy and agree with the native ones to floating-point roundoff.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist


def local_move(indptr, indices, weights, node_size, assign, csize, order, gamma, parent):
    """One queue-driven local moving phase over an undirected CSR graph.

    Mutates ``assign`` (cluster per node) and ``csize`` (total original-node
    size per cluster id) in place and returns the number of moves. Nodes are
    processed in ``order``; a node may only join clusters whose members share
    its ``parent`` value (pass all zeros for unconstrained moving), or the
    lowest-id empty cluster. Ties in gain go to the lowest candidate id.
    """
    n = len(assign)
    ip = indptr.tolist()
    idx = indices.tolist()
    wgt = weights.tolist()
    nsz = node_size.tolist()
    asg = assign.tolist()
    csz = csize.tolist()
    par = parent.tolist()
    gamma = float(gamma)

    cap = n + 1
    queue = [0] * cap
    in_queue = [False] * n
    for pos, v in enumerate(order.tolist()):
        queue[pos] = v
        in_queue[v] = True
    head, tail = 0, n % cap

    nbr_w = [0.0] * n
    seen = [False] * n
    touched = [0] * n
    free_hint = 0
    moves = 0

    while head != tail:
        v = queue[head]
        head = (head + 1) % cap
        in_queue[v] = False

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
                seen[c] = True
                nbr_w[c] = 0.0
                touched[ntouch] = c
                ntouch += 1
            nbr_w[c] += wgt[e]

        csz[a] -= sv
        w_a = nbr_w[a] if seen[a] else 0.0
        best_c = a
        best_gain = w_a - gamma * (sv * csz[a])

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
            g = nbr_w[c] - gamma * (sv * csz[c])
            if g > best_gain or (g == best_gain and c < best_c):
                best_gain = g
                best_c = c

        for t in range(ntouch):
            seen[touched[t]] = False

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
                    in_queue[u] = True

    assign[:] = asg
    csize[:] = csz
    return moves


def _csr(indptr, indices, weights, n):
    from scipy import sparse

    return sparse.csr_matrix((weights, indices, indptr), shape=(n, n))


def vos_energy(X, indptr, indices, weights):
    """Return (V, D): the similarity-weighted sum of squared distances over
    stored edges and the sum of distances over all point pairs."""
    n = len(X)
    w = _csr(indptr, indices, weights, n)
    wx = w @ X
    strength = np.asarray(w.sum(axis=1)).ravel()
    v = float((strength[:, None] * X * X).sum() - (X * wx).sum())
    d = float(pdist(X).sum()) if n > 1 else 0.0
    return v, d


def vos_grad(X, indptr, indices, weights, V, D, chunk=512):
    """Gradient of V/D**2 at X."""
    n = len(X)
    w = _csr(indptr, indices, weights, n)
    strength = np.asarray(w.sum(axis=1)).ravel()
    grad_v = 2.0 * (strength[:, None] * X - w @ X)

    grad_d = np.zeros_like(X)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        dx = X[lo:hi, 0:1] - X[None, :, 0]
        dy = X[lo:hi, 1:2] - X[None, :, 1]
        dist = np.sqrt(dx * dx + dy * dy)
        np.divide(dx, dist, out=dx, where=dist > 0.0)
        np.divide(dy, dist, out=dy, where=dist > 0.0)
        grad_d[lo:hi, 0] = dx.sum(axis=1)
        grad_d[lo:hi, 1] = dy.sum(axis=1)

    return grad_v / (D * D) - (2.0 * V / (D * D * D)) * grad_d
