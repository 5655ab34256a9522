"""numba kernels for the all-pairs scoring and betweenness hot loops.

Every kernel computes each output row in a fixed sequential order, so the
results do not depend on the number of threads.
"""

import math

import numba
import numpy as np
from numba import prange


@numba.njit(parallel=True, cache=True)
def community_side(p_ptr, p_idx, q_ptr, q_idx, deg_p, cn, lcl, aa, ra, caa, cra,
                   transposed, with_lcl, adjacent_only):
    """Accumulate one partition's common-neighbour terms for every pair.

    Rows ``u`` run over partition P; for each ``u`` the P-side common
    neighbours ``a`` of every pair ``(u, t)`` are found through the
    two-hop counts ``w[a] = |N(a) & N(u)|``. With the seed-exclusion rule
    the local community degree of ``a`` is ``w[a] - 1`` when ``t`` is
    adjacent to ``u`` and ``w[a]`` otherwise, and ``a == u`` never counts.

    Output arrays are indexed ``[u, t]``, or ``[t, u]`` when ``transposed``.
    """
    n_p = len(p_ptr) - 1
    n_q = len(q_ptr) - 1
    for u in prange(n_p):
        uu = np.int64(u)
        w = np.zeros(n_p, np.int64)
        touched = np.empty(n_p, np.int64)
        n_touched = 0
        mark = np.zeros(n_q, np.bool_)
        for k in range(p_ptr[u], p_ptr[u + 1]):
            t = p_idx[k]
            mark[t] = True
            for kk in range(q_ptr[t], q_ptr[t + 1]):
                a = q_idx[kk]
                if w[a] == 0:
                    touched[n_touched] = a
                    n_touched += 1
                w[a] += 1
        for i in range(n_touched):
            a = touched[i]
            if a == u:
                continue
            wa = w[a]
            da = deg_p[a]
            inv = 1.0 / da
            invlog = 1.0 / math.log2(da) if da >= 2 else np.nan
            for kk in range(p_ptr[a], p_ptr[a + 1]):
                t = p_idx[kk]
                if adjacent_only and not mark[t]:
                    continue
                g = wa - 1 if mark[t] else wa
                if g <= 0:
                    continue
                if transposed:
                    r = t
                    c = uu
                else:
                    r = uu
                    c = t
                cn[r, c] += 1
                if with_lcl:
                    lcl[r, c] += g
                aa[r, c] += invlog
                ra[r, c] += inv
                caa[r, c] += g * invlog
                cra[r, c] += g * inv


@numba.njit(parallel=True, cache=True)
def nbi_rows(l_ptr, l_idx, r_ptr, r_idx, deg_l, deg_r, out):
    """Two-step resource spreading from every left node to all right nodes."""
    n_l = len(l_ptr) - 1
    for x in prange(n_l):
        res = np.zeros(n_l, np.float64)
        touched = np.empty(n_l, np.int64)
        n_touched = 0
        seen = np.zeros(n_l, np.bool_)
        for k in range(l_ptr[x], l_ptr[x + 1]):
            b = l_idx[k]
            share = 1.0 / deg_r[b]
            for kk in range(r_ptr[b], r_ptr[b + 1]):
                a = r_idx[kk]
                if not seen[a]:
                    seen[a] = True
                    touched[n_touched] = a
                    n_touched += 1
                res[a] += share
        for i in range(n_touched):
            a = touched[i]
            share = res[a] / deg_l[a]
            for kk in range(l_ptr[a], l_ptr[a + 1]):
                out[x, l_idx[kk]] += share


@numba.njit(cache=True)
def _pair_similarity(kind, inter, du, dv, dim):
    if kind == 0:  # jaccard
        union = du + dv - inter
        return inter / union if union > 0 else 0.0
    if kind == 1:  # cosine
        if du == 0 or dv == 0:
            return 0.0
        return inter / math.sqrt(du * dv)
    if kind == 2:  # euclidean -> 1 / (1 + d)
        return 1.0 / (1.0 + math.sqrt(du + dv - 2 * inter))
    # pearson on binary vectors
    if du == 0 or dv == 0 or du == dim or dv == dim:
        return 0.0
    num = dim * inter - du * dv
    den = math.sqrt(du * (dim - du) * 1.0 * dv * (dim - dv))
    return num / den


@numba.njit(parallel=True, cache=True)
def similarity_rows(l_ptr, l_idx, r_ptr, r_idx, deg_l, dim, kind, out):
    """Sum of profile similarities between ``x`` and each left neighbour of ``y``."""
    n_l = len(l_ptr) - 1
    for x in prange(n_l):
        inter = np.zeros(n_l, np.int64)
        for k in range(l_ptr[x], l_ptr[x + 1]):
            b = l_idx[k]
            for kk in range(r_ptr[b], r_ptr[b + 1]):
                inter[r_idx[kk]] += 1
        dx = deg_l[x]
        for a in range(n_l):
            s = _pair_similarity(kind, inter[a], dx, deg_l[a], dim)
            if s == 0.0:
                continue
            for kk in range(l_ptr[a], l_ptr[a + 1]):
                out[x, l_idx[kk]] += s


@numba.njit(cache=True)
def _brandes_source(s, ptr, idx, delta, sigma, dist, stack, queue, acc):
    n = len(ptr) - 1
    for v in range(n):
        sigma[v] = 0.0
        dist[v] = -1
        delta[v] = 0.0
    sigma[s] = 1.0
    dist[s] = 0
    head = 0
    tail = 0
    queue[tail] = s
    tail += 1
    n_stack = 0
    while head < tail:
        v = queue[head]
        head += 1
        stack[n_stack] = v
        n_stack += 1
        for k in range(ptr[v], ptr[v + 1]):
            w = idx[k]
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue[tail] = w
                tail += 1
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
    while n_stack > 0:
        n_stack -= 1
        w = stack[n_stack]
        for k in range(ptr[w], ptr[w + 1]):
            v = idx[k]
            if dist[v] == dist[w] - 1:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
        if w != s:
            acc[w] += delta[w]


@numba.njit(parallel=True, cache=True)
def brandes_blocks(ptr, idx, block):
    """Unnormalised betweenness, summed over sources in fixed-size blocks.

    Each block of sources is accumulated sequentially into its own buffer and
    the buffers are reduced in block order.
    """
    n = len(ptr) - 1
    n_blocks = (n + block - 1) // block
    partial = np.zeros((n_blocks, n), np.float64)
    for bi in prange(n_blocks):
        delta = np.empty(n, np.float64)
        sigma = np.empty(n, np.float64)
        dist = np.empty(n, np.int64)
        stack = np.empty(n, np.int64)
        queue = np.empty(n, np.int64)
        acc = partial[bi]
        for s in range(bi * block, min(n, (bi + 1) * block)):
            _brandes_source(s, ptr, idx, delta, sigma, dist, stack, queue, acc)
    total = np.zeros(n, np.float64)
    for bi in range(n_blocks):
        for v in range(n):
            total[v] += partial[bi, v]
    return total
