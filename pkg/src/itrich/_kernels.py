"""Hot loops, each with a numba version and a plain numpy/python fallback.

The backend is picked once at import time.  Set ``ITRICH_BACKEND=numpy`` (or
``ITRICH_DISABLE_NUMBA=1``) to force the fallback; numba is used otherwise
when it can be imported.  Both variants of every kernel are importable under
explicit ``*_numba`` / ``*_numpy`` names so they can be compared directly.

Both backends consume identical pre-drawn random streams, so a seeded run
gives the same answer whichever backend is active.
"""
from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    HAVE_NUMBA = False


def _wants_numpy() -> bool:
    if os.environ.get("ITRICH_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes"):
        return True
    return os.environ.get("ITRICH_BACKEND", "").strip().lower() == "numpy"


BACKEND = "numpy" if (_wants_numpy() or not HAVE_NUMBA) else "numba"


# ---------------------------------------------------------------------------
# common neighbours of the endpoints of every edge
# ---------------------------------------------------------------------------

def common_neighbors_numpy(n, edges, indptr, indices):
    if len(edges) == 0:
        return np.zeros(0, dtype=np.int64)
    data = np.ones(len(indices), dtype=np.int64)
    adj = sp.csr_matrix((data, indices, indptr), shape=(n, n))
    two_paths = adj @ adj
    return np.asarray(two_paths[edges[:, 0], edges[:, 1]]).ravel().astype(np.int64)


def _common_neighbors_loop(n, edges, indptr, indices):
    m = edges.shape[0]
    out = np.zeros(m, dtype=np.int64)
    for e in range(m):
        a = edges[e, 0]
        b = edges[e, 1]
        p = indptr[a]
        pe = indptr[a + 1]
        q = indptr[b]
        qe = indptr[b + 1]
        c = 0
        while p < pe and q < qe:
            x = indices[p]
            y = indices[q]
            if x == y:
                c += 1
                p += 1
                q += 1
            elif x < y:
                p += 1
            else:
                q += 1
        out[e] = c
    return out


# ---------------------------------------------------------------------------
# degree-preserving double edge swaps
# ---------------------------------------------------------------------------

def _adjacent(indptr, nbr, u, v):
    # scan the shorter neighbour list; degrees never change under swaps
    if indptr[u + 1] - indptr[u] > indptr[v + 1] - indptr[v]:
        u, v = v, u
    for p in range(indptr[u], indptr[u + 1]):
        if nbr[p] == v:
            return True
    return False


def _replace(indptr, nbr, u, old, new):
    for p in range(indptr[u], indptr[u + 1]):
        if nbr[p] == old:
            nbr[p] = new
            return


DENSE_SWAP_LIMIT = 6000


def _swap_loop(n, edges, picks, flips):
    """Attempt one swap per row of ``picks``; returns the number accepted.

    ``edges`` is modified in place.  Adjacency lives in fixed-size per-node
    slots since every node keeps its degree; graphs up to
    ``DENSE_SWAP_LIMIT`` nodes also get an n x n membership matrix.
    """
    m = edges.shape[0]
    dense = n <= DENSE_SWAP_LIMIT
    mat = np.zeros((n, n) if dense else (1, 1), dtype=np.bool_)
    if dense:
        for e in range(m):
            mat[edges[e, 0], edges[e, 1]] = True
            mat[edges[e, 1], edges[e, 0]] = True
    indptr = np.zeros(n + 1, dtype=np.int64)
    for e in range(m):
        indptr[edges[e, 0] + 1] += 1
        indptr[edges[e, 1] + 1] += 1
    for v in range(n):
        indptr[v + 1] += indptr[v]
    fill = indptr[:-1].copy()
    nbr = np.empty(2 * m, dtype=np.int64)
    for e in range(m):
        a = edges[e, 0]
        b = edges[e, 1]
        nbr[fill[a]] = b
        fill[a] += 1
        nbr[fill[b]] = a
        fill[b] += 1
    accepted = 0
    for t in range(picks.shape[0]):
        e1 = picks[t, 0]
        e2 = picks[t, 1]
        if e1 == e2:
            continue
        a = edges[e1, 0]
        b = edges[e1, 1]
        if flips[t]:
            c = edges[e2, 1]
            d = edges[e2, 0]
        else:
            c = edges[e2, 0]
            d = edges[e2, 1]
        # (a, b), (c, d) -> (a, d), (c, b)
        if a == d or c == b or a == c or b == d:
            continue
        if dense:
            if mat[a, d] or mat[c, b]:
                continue
            mat[a, b] = False
            mat[b, a] = False
            mat[c, d] = False
            mat[d, c] = False
            mat[a, d] = True
            mat[d, a] = True
            mat[c, b] = True
            mat[b, c] = True
        else:
            if _adjacent(indptr, nbr, a, d) or _adjacent(indptr, nbr, c, b):
                continue
            _replace(indptr, nbr, a, b, d)
            _replace(indptr, nbr, b, a, c)
            _replace(indptr, nbr, c, d, b)
            _replace(indptr, nbr, d, c, a)
        edges[e1, 0] = min(a, d)
        edges[e1, 1] = max(a, d)
        edges[e2, 0] = min(c, b)
        edges[e2, 1] = max(c, b)
        accepted += 1
    return accepted


def double_edge_swap_numpy(n, edges, picks, flips):
    # same algorithm on python ints; the hash set is the bottleneck either way
    work = edges.tolist()
    present = {a * n + b for a, b in work}
    accepted = 0
    for (e1, e2), flip in zip(picks.tolist(), flips.tolist()):
        if e1 == e2:
            continue
        a, b = work[e1]
        c, d = (work[e2][1], work[e2][0]) if flip else work[e2]
        if a == d or c == b or a == c or b == d:
            continue
        u1, v1 = (a, d) if a < d else (d, a)
        u2, v2 = (c, b) if c < b else (b, c)
        k1 = u1 * n + v1
        k2 = u2 * n + v2
        if k1 in present or k2 in present:
            continue
        present.discard(work[e1][0] * n + work[e1][1])
        present.discard(work[e2][0] * n + work[e2][1])
        present.add(k1)
        present.add(k2)
        work[e1] = [u1, v1]
        work[e2] = [u2, v2]
        accepted += 1
    edges[:] = np.asarray(work, dtype=edges.dtype).reshape(edges.shape)
    return accepted


# ---------------------------------------------------------------------------
# core numbers (Batagelj-Zaversnik bucket peeling)
# ---------------------------------------------------------------------------

def _core_loop(n, indptr, indices):
    deg = np.empty(n, dtype=np.int64)
    maxdeg = 0
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
        if deg[v] > maxdeg:
            maxdeg = deg[v]
    bin_start = np.zeros(maxdeg + 2, dtype=np.int64)
    for v in range(n):
        bin_start[deg[v]] += 1
    start = 0
    for d in range(maxdeg + 1):
        num = bin_start[d]
        bin_start[d] = start
        start += num
    pos = np.empty(n, dtype=np.int64)
    vert = np.empty(n, dtype=np.int64)
    for v in range(n):
        pos[v] = bin_start[deg[v]]
        vert[pos[v]] = v
        bin_start[deg[v]] += 1
    for d in range(maxdeg, 0, -1):
        bin_start[d] = bin_start[d - 1]
    bin_start[0] = 0
    for i in range(n):
        v = vert[i]
        for p in range(indptr[v], indptr[v + 1]):
            u = indices[p]
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    pos[u] = pw
                    vert[pu] = w
                    pos[w] = pu
                    vert[pw] = u
                bin_start[du] += 1
                deg[u] -= 1
    return deg


def core_numbers_numpy(n, indptr, indices):
    # simple level-by-level peeling with vectorised degree updates
    deg = np.diff(indptr).astype(np.int64)
    core = np.zeros(n, dtype=np.int64)
    alive = np.ones(n, dtype=bool)
    src = np.repeat(np.arange(n), np.diff(indptr))
    k = 0
    while alive.any():
        k = max(k, int(deg[alive].min()))
        while True:
            peel = alive & (deg <= k)
            if not peel.any():
                break
            core[peel] = k
            alive[peel] = False
            hit = peel[src]
            np.subtract.at(deg, indices[hit], 1)
    return core


if HAVE_NUMBA:
    common_neighbors_numba = njit(cache=True)(_common_neighbors_loop)
    _adjacent = njit(cache=True)(_adjacent)
    _replace = njit(cache=True)(_replace)
    double_edge_swap_numba = njit(cache=True)(_swap_loop)
    core_numbers_numba = njit(cache=True)(_core_loop)
else:  # pragma: no cover
    common_neighbors_numba = None
    double_edge_swap_numba = None
    core_numbers_numba = None


if BACKEND == "numba":
    common_neighbors = common_neighbors_numba
    double_edge_swap = double_edge_swap_numba
    core_numbers = core_numbers_numba
else:
    common_neighbors = common_neighbors_numpy
    double_edge_swap = double_edge_swap_numpy
    core_numbers = core_numbers_numpy
