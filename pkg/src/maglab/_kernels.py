"""Compiled sampling loops.

Draw layout of one replication stream: attribute ``l`` of node ``u`` uses
draw ``u * L + l``; the pair ``u < v`` uses draw
``n * L + u * (2n - u - 1) / 2 + (v - u - 1)`` (row-major over pairs).
All kernels address draws by index, so the full-graph sampler, the
streaming census and the early-exit isolation test see identical edges.
"""

import numpy as np
from numba import config, njit, prange

config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_ONE = np.uint64(1)
_TWO_POW_M53 = 1.0 / 9007199254740992.0


@njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(inline="always")
def _uniform(key, index):
    z = _mix64(key + (np.uint64(index) + _ONE) * _GAMMA)
    return (np.float64(z >> np.uint64(11)) + 0.5) * _TWO_POW_M53


@njit(inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def draw_attributes(n, L, mu1, key):
    """Packed attribute words ``(n, ceil(L/64))`` and the count of ones per node."""
    words = (L + 63) // 64
    packed = np.zeros((n, words), np.uint64)
    s = np.zeros(n, np.int64)
    for u in range(n):
        for l in range(L):
            if _uniform(key, u * L + l) < mu1:
                packed[u, l // 64] |= _ONE << np.uint64(l % 64)
                s[u] += 1
    return packed, s


@njit(inline="always")
def _pair_index(n, L, u, v):
    return n * L + u * (2 * n - u - 1) // 2 + (v - u - 1)


@njit(inline="always")
def _is_edge(n, L, packed, s, qtab, key, u, v):
    j11 = 0
    for w in range(packed.shape[1]):
        j11 += _popcount(packed[u, w] & packed[v, w])
    return _uniform(key, _pair_index(n, L, u, v)) <= qtab[j11, s[u] + s[v] - 2 * j11]


@njit(cache=True)
def sample_edges(n, L, mu1, qtab, key):
    packed, s = draw_attributes(n, L, mu1, key)
    cap = 64
    edges = np.empty((cap, 2), np.int64)
    m = 0
    for u in range(n):
        for v in range(u + 1, n):
            if _is_edge(n, L, packed, s, qtab, key, u, v):
                if m == cap:
                    cap *= 2
                    grown = np.empty((cap, 2), np.int64)
                    grown[:m] = edges[:m]
                    edges = grown
                edges[m, 0] = u
                edges[m, 1] = v
                m += 1
    return packed, s, edges[:m].copy()


@njit(cache=True)
def census(n, L, mu1, qtab, key):
    """Isolated-node counts per level without storing the adjacency.

    A pair is skipped only when both endpoints already have a neighbour,
    which cannot change any node's isolation status.
    """
    packed, s = draw_attributes(n, L, mu1, key)
    has = np.zeros(n, np.bool_)
    cand = np.arange(n)
    m = n
    for u in range(n):
        if not has[u]:
            for v in range(u + 1, n):
                if _is_edge(n, L, packed, s, qtab, key, u, v):
                    has[u] = True
                    has[v] = True
        else:
            k = 0
            for i in range(m):
                v = cand[i]
                if v > u and not has[v]:
                    cand[k] = v
                    k += 1
            m = k
            for i in range(m):
                v = cand[i]
                if _is_edge(n, L, packed, s, qtab, key, u, v):
                    has[v] = True
    by_level = np.zeros(L + 1, np.int64)
    for u in range(n):
        if not has[u]:
            by_level[s[u]] += 1
    return by_level


@njit(cache=True)
def has_isolated(n, L, mu1, qtab, key):
    """Whether the realization has an isolated node, stopping at the first proof.

    Nodes are examined in increasing order of their count of ones, the least
    connected ones first when ``Gamma(0) < Gamma(1)``; partners are tried in
    the opposite order.
    """
    packed, s = draw_attributes(n, L, mu1, key)
    has = np.zeros(n, np.bool_)
    order = np.argsort(s, kind="mergesort")
    for i in range(n):
        u = order[i]
        if has[u]:
            continue
        for j in range(n - 1, -1, -1):
            v = order[j]
            if v == u:
                continue
            a, b = (u, v) if u < v else (v, u)
            if _is_edge(n, L, packed, s, qtab, key, a, b):
                has[u] = True
                has[v] = True
                break
        if not has[u]:
            return True
    return False


@njit(cache=True, parallel=True)
def census_batch(n, L, mu1, qtab, keys):
    out = np.zeros((keys.shape[0], L + 1), np.int64)
    for r in prange(keys.shape[0]):
        out[r] = census(n, L, mu1, qtab, keys[r])
    return out


@njit(cache=True, parallel=True)
def has_isolated_batch(n, L, mu1, qtab, keys):
    out = np.zeros(keys.shape[0], np.bool_)
    for r in prange(keys.shape[0]):
        out[r] = has_isolated(n, L, mu1, qtab, keys[r])
    return out


@njit(cache=True, parallel=True)
def edge_count_batch(n, L, mu1, qtab, keys):
    out = np.zeros(keys.shape[0], np.int64)
    for r in prange(keys.shape[0]):
        packed, s = draw_attributes(n, L, mu1, keys[r])
        c = 0
        for u in range(n):
            for v in range(u + 1, n):
                if _is_edge(n, L, packed, s, qtab, keys[r], u, v):
                    c += 1
        out[r] = c
    return out
