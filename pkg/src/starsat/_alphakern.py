"""JIT-compiled search kernel behind alpha_k_exact.

The solver in independence.py is a suffix branch-and-bound over bitset
candidate sets; this module holds its hot loop, compiled with numba so
that dense instances at n of a few hundred stay tractable.  Everything
here works in "position space": vertices renamed 0..n-1 by the caller's
chosen order, adjacency packed into rows of 64-bit words.

Kernel contract (mirrors the pure definitions exactly):
  c[i]   = alpha_k of the subgraph induced on positions i..n-1,
  best   = a witness attaining c[0] (positions),
  aux[j] = caller-supplied upper bound on alpha_k of positions j..n-1,
           from cheaper runs at smaller k (any max-degree-k set keeps an
           independent third and a max-degree-1 half, so alpha_k is at
           most (k+1)*alpha_0 and, for k=2, at most 2*alpha_1).

Pruning at a node with chosen set S and candidates P:
  - |S| + popcount(P) < target,
  - |S| + min(c[j], aux[j]) < target for j = lowest position in P,
  - |S| + (residual of s) + |P minus N(s)| < target for any s in S,
  - |S| + capped clique cover of P < target, where a clique may send
    a vertices only if its a-th largest residual k - cnt[v] is >= a-1.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U0 = np.uint64(0)
U1 = np.uint64(1)


@njit(cache=True, inline="always")
def _pc(w):
    w = w - ((w >> np.uint64(1)) & np.uint64(0x5555555555555555))
    w = (w & np.uint64(0x3333333333333333)) + (
        (w >> np.uint64(2)) & np.uint64(0x3333333333333333)
    )
    w = (w + (w >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return int((w * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True)
def alpha_kernel(adj, k, budget, start_nodes, aux, c, best_out):
    """Returns (alpha_or_incumbent, nodes_used, exhausted, best_len, last_i)."""
    n = adj.shape[0]
    W = adj.shape[1]
    maxd = n + 2
    P = np.zeros((maxd, W), dtype=np.uint64)
    smask = np.zeros(W, dtype=np.uint64)
    cnt = np.zeros(n, dtype=np.int32)
    s_stack = np.zeros(maxd, dtype=np.int32)
    tlist = np.zeros((maxd, n), dtype=np.int32)  # cnt-undo log per depth
    tlen = np.zeros(maxd, dtype=np.int32)
    csc = np.zeros(W, dtype=np.uint64)
    ccm = np.zeros(W, dtype=np.uint64)
    rs = np.zeros(n, dtype=np.int32)
    nodes = start_nodes
    c[n] = 0
    c[n - 1] = 1
    best_out[0] = n - 1
    best_len = 1
    exhausted = False
    last_i = n - 1
    k1 = k + 1
    for i in range(n - 2, -1, -1):
        target = c[i + 1] + 1
        last_i = i
        for w in range(W):
            P[0, w] = U0
            smask[w] = U0
        for pos in range(i + 1, n):
            P[0, pos >> 6] |= U1 << np.uint64(pos & 63)
        smask[i >> 6] = U1 << np.uint64(i & 63)
        if k == 0:
            for w in range(W):
                P[0, w] &= ~adj[i, w]
        else:
            for q in range(n):
                cnt[q] = 0
            for w in range(W):
                m = adj[i, w] & P[0, w]
                base = w << 6
                while m:
                    b = m & (U0 - m)
                    m ^= b
                    cnt[base + _pc(b - U1)] = 1
        s_stack[0] = i
        depth = 0
        found = target == 1
        while depth >= 0 and not found:
            size_s = depth + 1
            pc_total = 0
            lowest = -1
            for w in range(W):
                pw = P[depth, w]
                if pw != U0:
                    if lowest < 0:
                        b = pw & (U0 - pw)
                        lowest = (w << 6) + _pc(b - U1)
                    pc_total += _pc(pw)
            room = target - size_s
            prune = (
                pc_total < room
                or c[lowest] < room
                or aux[lowest] < room
            )
            if not prune and k > 0:
                # a chosen vertex s with residual r admits at most r more
                # neighbors; everything else must avoid N(s)
                for t in range(size_s):
                    s_v = s_stack[t]
                    r = k - cnt[s_v]
                    if r < room:
                        nonnb = 0
                        for w in range(W):
                            nonnb += _pc(P[depth, w] & ~adj[s_v, w])
                        if r + nonnb < room:
                            prune = True
                            break
            if not prune:
                for w in range(W):
                    csc[w] = P[depth, w]
                bound = 0
                while True:
                    vf = -1
                    for w in range(W):
                        if csc[w] != U0:
                            b = csc[w] & (U0 - csc[w])
                            vf = (w << 6) + _pc(b - U1)
                            csc[w] ^= b
                            break
                    if vf < 0:
                        break
                    csz = 1
                    rs[0] = k - cnt[vf] if k > 0 else 0
                    for w in range(W):
                        ccm[w] = csc[w] & adj[vf, w]
                    while True:
                        uf = -1
                        for w in range(W):
                            if ccm[w] != U0:
                                b = ccm[w] & (U0 - ccm[w])
                                uf = (w << 6) + _pc(b - U1)
                                break
                        if uf < 0:
                            break
                        bb = U1 << np.uint64(uf & 63)
                        csc[uf >> 6] ^= bb
                        ccm[uf >> 6] ^= bb
                        for w in range(W):
                            ccm[w] &= adj[uf, w]
                        r = k - cnt[uf] if k > 0 else 0
                        q = csz
                        while q > 0 and rs[q - 1] < r:
                            rs[q] = rs[q - 1]
                            q -= 1
                        rs[q] = r
                        csz += 1
                    cap = 0
                    lim = csz if csz < k1 else k1
                    for a in range(1, lim + 1):
                        if rs[a - 1] >= a - 1:
                            cap = a
                    bound += cap
                    if bound >= room:
                        break
                prune = bound < room
            if prune:
                if k > 0 and depth > 0:
                    for t in range(tlen[depth]):
                        cnt[tlist[depth, t]] -= 1
                if depth > 0:
                    u = s_stack[depth]
                    smask[u >> 6] ^= U1 << np.uint64(u & 63)
                depth -= 1
                continue
            j = lowest
            P[depth, j >> 6] ^= U1 << np.uint64(j & 63)
            nodes += 1
            if nodes > budget:
                exhausted = True
                break
            if k == 0:
                for w in range(W):
                    P[depth + 1, w] = P[depth, w] & ~adj[j, w]
            else:
                for w in range(W):
                    P[depth + 1, w] = P[depth, w]
                nt = 0
                for w in range(W):
                    m = adj[j, w] & (P[depth, w] | smask[w])
                    base = w << 6
                    while m:
                        b = m & (U0 - m)
                        m ^= b
                        u = base + _pc(b - U1)
                        cnt[u] += 1
                        tlist[depth + 1, nt] = u
                        nt += 1
                        if cnt[u] > k:
                            P[depth + 1, w] &= ~b
                        elif cnt[u] == k and (smask[w] & b) != U0:
                            for w2 in range(W):
                                P[depth + 1, w2] &= ~adj[u, w2]
                tlen[depth + 1] = nt
                if cnt[j] == k:
                    for w2 in range(W):
                        P[depth + 1, w2] &= ~adj[j, w2]
            depth += 1
            s_stack[depth] = j
            smask[j >> 6] |= U1 << np.uint64(j & 63)
            if depth + 1 == target:
                found = True
                break
        if exhausted:
            break
        if found:
            c[i] = target
            for t in range(target):
                best_out[t] = s_stack[t]
            best_len = target
        else:
            c[i] = c[i + 1]
    alpha = c[0] if not exhausted else best_len
    return alpha, nodes, exhausted, best_len, last_i
