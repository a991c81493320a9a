"""Maximum matching and d-regular spanning subgraphs (d-factors).

The saturation construction needs a decisive answer to "does G[V - S]
contain a (r-1)-regular spanning subgraph?", so this module implements
an exact route: the classical gadget reduction from d-factor to perfect
matching, on top of a blossom-shrinking maximum-matching solver.

Dense hosts are handled by staging: a d-factor of any subgraph is a
d-factor of the host, so the search first tries sparse candidate
subgraphs (each vertex keeping its few lowest-numbered neighbors) and
widens until the full graph is reached.  Only a "not found" on the full
graph is negative evidence; sparse stages merely keep the common case
(random graphs, where a few neighbors per vertex suffice) fast.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .graph import Graph, bits
from .params import ProbParams


@dataclass(frozen=True)
class FactorResult:
    """Outcome of a d-factor search: edges is present iff found."""

    found: bool
    d: int
    edges: Optional[tuple[tuple[int, int], ...]] = None

    def __post_init__(self) -> None:
        if self.found != (self.edges is not None):
            raise ValueError("edges must be present exactly when found")


# ---------------------------------------------------------------------------
# maximum matching (blossom shrinking), over plain adjacency lists so the
# factor gadgets never pay for bitmask rows


def _lca(match: list, base: list, parent: list, a: int, b: int) -> int:
    seen = set()
    while True:
        a = base[a]
        seen.add(a)
        if match[a] == -1:
            break
        a = base[parent[match[a]]]
    while True:
        b = base[b]
        if b in seen:
            return b
        b = base[parent[match[b]]]


def _mark_path(match, base, parent, in_blossom, v: int, b: int, child: int) -> None:
    while base[v] != b:
        in_blossom[base[v]] = True
        in_blossom[base[match[v]]] = True
        parent[v] = child
        child = match[v]
        v = parent[match[v]]


def _find_augmenting(adj: list, match: list, parent: list, root: int) -> int:
    """BFS an alternating tree from an exposed root; returns an exposed
    vertex closing an augmenting path, or -1.  parent is left holding the
    path (odd vertices point toward the root) for the caller to flip."""
    n = len(adj)
    base = list(range(n))
    used = [False] * n
    for i in range(n):
        parent[i] = -1
    used[root] = True
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for to in adj[v]:
            if base[v] == base[to] or match[v] == to:
                continue
            if to == root or (match[to] != -1 and parent[match[to]] != -1):
                # v and to are both outer: their tree paths close a blossom
                cur = _lca(match, base, parent, v, to)
                in_blossom = [False] * n
                _mark_path(match, base, parent, in_blossom, v, cur, to)
                _mark_path(match, base, parent, in_blossom, to, cur, v)
                for i in range(n):
                    if in_blossom[base[i]]:
                        base[i] = cur
                        if not used[i]:
                            used[i] = True
                            queue.append(i)
            elif parent[to] == -1:
                parent[to] = v
                if match[to] == -1:
                    return to
                used[match[to]] = True
                queue.append(match[to])
    return -1


def _augment_along(match: list, parent: list, v: int) -> None:
    while v != -1:
        pv = parent[v]
        next_v = match[pv]
        match[v] = pv
        match[pv] = v
        v = next_v


def _maximum_matching(adj: list, match: Optional[list] = None) -> list:
    """Maximum matching of the adjacency-list graph; match may carry a
    valid initial matching (-1 for exposed), used as a warm start."""
    n = len(adj)
    if match is None:
        match = [-1] * n
    # greedy pass: cheap, and leaves few exposed vertices on random inputs
    for v in range(n):
        if match[v] == -1:
            for u in adj[v]:
                if match[u] == -1:
                    match[v] = u
                    match[u] = v
                    break
    parent = [-1] * n
    for v in range(n):
        if match[v] == -1:
            exposed = _find_augmenting(adj, match, parent, v)
            if exposed != -1:
                _augment_along(match, parent, exposed)
    return match


def _perfect_matching(adj: list, match: Optional[list] = None):
    """Like _maximum_matching but demands perfection: returns None as soon
    as any exposed vertex fails to augment (a vertex with no augmenting
    path stays exposed in every larger matching, so perfection is already
    ruled out)."""
    n = len(adj)
    if match is None:
        match = [-1] * n
    for v in range(n):
        if match[v] == -1:
            for u in adj[v]:
                if match[u] == -1:
                    match[v] = u
                    match[u] = v
                    break
    parent = [-1] * n
    for v in range(n):
        if match[v] == -1:
            exposed = _find_augmenting(adj, match, parent, v)
            if exposed == -1:
                return None
            _augment_along(match, parent, exposed)
    return match


def max_matching(g: Graph) -> tuple[tuple[int, int], ...]:
    """A maximum-cardinality matching of g, as sorted (u, v) pairs.

    General graphs: augmenting paths with blossom shrinking, warm-started
    greedily.  Deterministic for a given graph.
    """
    adj = [g.neighbors(v) for v in range(g.n)]
    match = _maximum_matching(adj)
    return tuple(
        sorted((v, match[v]) for v in range(g.n) if match[v] > v)
    )


# ---------------------------------------------------------------------------
# d-factors


def _cyclic_neighbors(g: Graph, v: int, c: int) -> list[int]:
    """The first c neighbors of v in cyclic id order starting at v+1.

    Spread selection matters: taking everyone's *lowest* neighbors piles
    the whole budget onto a few small ids and the union graph has no
    factor until c is huge, whereas cyclic picks behave like a random
    c-out graph on random hosts.
    """
    row = g.adj[v]
    picked = []
    for u in bits(row >> (v + 1)):
        if len(picked) == c:
            return picked
        picked.append(v + 1 + u)
    for u in bits(row & ((1 << v) - 1)):
        if len(picked) == c:
            break
        picked.append(u)
    return picked


def _stage_subgraphs(g: Graph, d: int):
    """Yield (edges, decisive) stages: sparse subgraphs first (every vertex
    keeps c cyclically chosen neighbors, c doubling), the full graph last."""
    degs = g.degrees()
    max_deg = max(degs, default=0)
    c = d + 2
    while c < max_deg:
        kept = set()
        for v in range(g.n):
            for u in _cyclic_neighbors(g, v, c):
                kept.add((v, u) if v < u else (u, v))
        yield sorted(kept), False
        c *= 2
    yield g.edges(), True


def _gadget_matching(n: int, edges: Sequence[tuple[int, int]], d: int):
    """Decide whether the n-vertex graph given by edges has a d-factor.

    Classical reduction: vertex v of degree deg(v) becomes deg(v) stub
    nodes (one per incident edge) plus deg(v) - d core nodes, cores
    joined to all of v's stubs; each graph edge joins its two stubs.  A
    perfect matching leaves exactly d stubs per vertex matched through
    graph edges — those edges are the factor.  Returns the factor's
    edges, or None.
    """
    incident: list[list[int]] = [[] for _ in range(n)]  # edge ids, ascending
    for idx, (u, v) in enumerate(edges):
        incident[u].append(idx)
        incident[v].append(idx)
    stub = {}  # (vertex, edge id) -> gadget node
    core_range = [None] * n
    nid = 0
    for v in range(n):
        if len(incident[v]) < d:
            return None  # can't even reach degree d inside this stage
        for e in incident[v]:
            stub[(v, e)] = nid
            nid += 1
        core_range[v] = (nid, nid + len(incident[v]) - d)
        nid += len(incident[v]) - d
    adj: list[list[int]] = [[] for _ in range(nid)]
    for v in range(n):
        lo, hi = core_range[v]
        for e in incident[v]:
            s = stub[(v, e)]
            for core in range(lo, hi):
                adj[s].append(core)
                adj[core].append(s)
    for idx, (u, v) in enumerate(edges):
        adj[stub[(u, idx)]].append(stub[(v, idx)])
        adj[stub[(v, idx)]].append(stub[(u, idx)])

    # warm start from a greedy max-degree-d subgraph: match its stub pairs,
    # then feed each core a leftover stub
    match = [-1] * nid
    used_deg = [0] * n
    for idx, (u, v) in enumerate(edges):
        if used_deg[u] < d and used_deg[v] < d:
            used_deg[u] += 1
            used_deg[v] += 1
            match[stub[(u, idx)]] = stub[(v, idx)]
            match[stub[(v, idx)]] = stub[(u, idx)]
    for v in range(n):
        lo, hi = core_range[v]
        core = lo
        for e in incident[v]:
            if core == hi:
                break
            s = stub[(v, e)]
            if match[s] == -1:
                match[s] = core
                match[core] = s
                core += 1

    match = _perfect_matching(adj, match)
    if match is None:
        return None
    factor = []
    for idx, (u, v) in enumerate(edges):
        if match[stub[(u, idx)]] == stub[(v, idx)]:
            factor.append((u, v))
    return factor


def d_factor(g: Graph, d: int) -> FactorResult:
    """Search g for a d-regular spanning subgraph.

    found=False is definitive: the last stage hands the full graph to the
    gadget reduction, and the matching solver underneath is exact.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if g.n == 0:
        return FactorResult(True, d, ())
    if (g.n * d) % 2 == 1 or min(g.degrees()) < d:
        return FactorResult(False, d)
    for edges, decisive in _stage_subgraphs(g, d):
        if d == 1:
            adj: list[list[int]] = [[] for _ in range(g.n)]
            for u, v in edges:
                adj[u].append(v)
                adj[v].append(u)
            match = _perfect_matching(adj)
            if match is not None:
                factor = [(v, match[v]) for v in range(g.n) if match[v] > v]
            else:
                factor = None
        else:
            factor = _gadget_matching(g.n, edges, d)
        if factor is not None:
            result = tuple(sorted(factor))
            assert _degrees_exactly(g, result, d)
            return FactorResult(True, d, result)
        if decisive:
            return FactorResult(False, d)
    raise AssertionError("stage generator must end with a decisive stage")


def _degrees_exactly(g: Graph, edges, d: int) -> bool:
    deg = [0] * g.n
    for u, v in edges:
        if not g.has_edge(u, v):
            return False
        deg[u] += 1
        deg[v] += 1
    return all(x == d for x in deg)


def d_factor_bruteforce(g: Graph, d: int) -> FactorResult:
    """Ground-truth d-factor by exhaustive search over edge subsets.

    Branches on each edge in turn, pruning on remaining degree needs, so
    it visits every viable subset; capped at 24 edges.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if g.m > 24:
        raise ValueError(f"bruteforce is capped at 24 edges, got {g.m}")
    edges = g.edges()
    need = [d] * g.n
    avail = g.degrees()
    chosen: list[tuple[int, int]] = []

    def search(i: int) -> bool:
        if i == len(edges):
            return all(x == 0 for x in need)
        u, v = edges[i]
        # include
        if need[u] > 0 and need[v] > 0:
            need[u] -= 1
            need[v] -= 1
            avail[u] -= 1
            avail[v] -= 1
            chosen.append((u, v))
            if need[u] <= avail[u] and need[v] <= avail[v] and search(i + 1):
                return True
            chosen.pop()
            need[u] += 1
            need[v] += 1
            avail[u] += 1
            avail[v] += 1
        # exclude
        avail[u] -= 1
        avail[v] -= 1
        ok = need[u] <= avail[u] and need[v] <= avail[v] and search(i + 1)
        avail[u] += 1
        avail[v] += 1
        return ok

    if g.n * d % 2 == 0 and search(0):
        return FactorResult(True, d, tuple(chosen))
    return FactorResult(False, d)


def af_embedding_condition(n: int, delta: int, params: ProbParams) -> bool:
    """Sufficient condition for embedding any spanning graph of maximum
    degree delta into G(n, p): (delta^2+1)^2 < n and p^delta exceeds
    10 ln(floor(n/(delta^2+1))) / floor(n/(delta^2+1)).

    Diagnostic only — the saturation construction verifies embeddability
    directly and never consults this predicate.
    """
    if delta < 1:
        raise ValueError(f"delta must be >= 1, got {delta}")
    block = delta * delta + 1
    if block * block >= n:
        return False
    groups = n // block
    return params.p**delta > 10.0 * math.log(groups) / groups


__all__ = [
    "FactorResult",
    "af_embedding_condition",
    "d_factor",
    "d_factor_bruteforce",
    "max_matching",
]
