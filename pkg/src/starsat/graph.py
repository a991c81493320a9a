"""Simple undirected graphs with bitmask adjacency.

Vertices are 0..n-1.  Each vertex's neighborhood is stored as a Python
integer bitmask (bit j set means j is a neighbor), which makes the set
operations the solvers lean on — intersection, difference, popcount —
single big-int operations instead of per-element loops.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .params import ProbParams
from .rng import RngSeed, float_block, fnv1a64, stream_base


def popcount(x: int) -> int:
    """Number of set bits (int.bit_count needs 3.11; this runs on 3.10)."""
    return bin(x).count("1")


def bits(x: int) -> Iterator[int]:
    """Indices of set bits, ascending."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class ParseError(ValueError):
    """Malformed edge-list text; carries the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph.

    Build via from_edges / the generators below rather than directly: the
    constructor trusts its adjacency tuple.
    """

    n: int
    adj: tuple[int, ...] = field(repr=False)
    m: int = field(default=0)

    @staticmethod
    def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Validating constructor: rejects loops, range errors, duplicates."""
        if n < 0:
            raise ValueError(f"vertex count must be nonnegative, got {n}")
        masks = [0] * n
        m = 0
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if masks[u] >> v & 1:
                raise ValueError(f"duplicate edge ({min(u, v)}, {max(u, v)})")
            masks[u] |= 1 << v
            masks[v] |= 1 << u
            m += 1
        return Graph(n, tuple(masks), m)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def degree(self, v: int) -> int:
        return popcount(self.adj[v])

    def degrees(self) -> list[int]:
        return [popcount(a) for a in self.adj]

    def max_degree(self) -> int:
        return max((popcount(a) for a in self.adj), default=0)

    def neighbors(self, v: int) -> list[int]:
        return list(bits(self.adj[v]))

    def edges(self) -> list[tuple[int, int]]:
        """All edges as (u, v) with u < v, lexicographically sorted."""
        out = []
        for u in range(self.n):
            rest = self.adj[u] >> (u + 1)
            for off in bits(rest):
                out.append((u, u + 1 + off))
        return out

    def full_mask(self) -> int:
        return (1 << self.n) - 1


def empty_graph(n: int) -> Graph:
    return Graph.from_edges(n, [])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError(f"a cycle needs at least 3 vertices, got {n}")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def sample_gnp(n: int, p: float | ProbParams, seed: RngSeed | int) -> Graph:
    """Erdos-Renyi G(n, p): each of the C(n, 2) pairs is an edge with prob p.

    Pairs are visited in lexicographic order (0,1), (0,2), ..., (n-2,n-1),
    one uniform draw per pair, so the sampled graph is a pure function of
    (n, p, seed).  p may be a bare float in [0, 1]; the degenerate values
    0 and 1 short-circuit to the empty/complete graph without consuming
    any randomness.
    """
    if isinstance(p, ProbParams):
        p = p.p
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if n < 0:
        raise ValueError(f"vertex count must be nonnegative, got {n}")
    if p == 0.0 or n < 2:
        return empty_graph(n)
    if p == 1.0:
        return complete_graph(n)
    if isinstance(seed, int):
        seed = RngSeed(seed)
    base = stream_base(seed)
    npairs = n * (n - 1) // 2
    draws = float_block(base, 0, npairs)
    dense = np.zeros((n, n), dtype=bool)
    iu, ju = np.triu_indices(n, k=1)  # lexicographic: row-major, i < j
    dense[iu, ju] = draws < p
    dense |= dense.T
    masks = []
    for row in dense:
        packed = np.packbits(row, bitorder="little").tobytes()
        masks.append(int.from_bytes(packed, "little"))
    m = int(np.count_nonzero(dense)) // 2
    return Graph(n, tuple(masks), m)


def regular_circulant(m: int, d: int) -> Graph:
    """The canonical d-regular circulant on vertices 0..m-1.

    Vertex i is joined to i +- 1, ..., i +- floor(d/2) (mod m), plus the
    antipode i + m/2 when d is odd.  Raises ValueError when no d-regular
    graph on m vertices exists (d >= m, or m*d odd).
    """
    if m < 0 or d < 0:
        raise ValueError(f"need m, d >= 0, got m={m}, d={d}")
    if d >= m and not (m == 0 and d == 0):
        raise ValueError(f"degree {d} impossible on {m} vertices")
    if m * d % 2 == 1:
        raise ValueError(f"no {d}-regular graph on {m} vertices: m*d is odd")
    offsets = list(range(1, d // 2 + 1))
    if d % 2 == 1:
        offsets.append(m // 2)
    edges = set()
    for i in range(m):
        for off in offsets:
            j = (i + off) % m
            edges.add((min(i, j), max(i, j)))
    g = Graph.from_edges(m, sorted(edges))
    assert all(deg == d for deg in g.degrees())
    return g


def induced_subgraph(g: Graph, vertices: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """Subgraph induced on the given vertices, plus the new->old id map.

    The map is sorted ascending, so new vertex i is map[i] in g.
    """
    keep = sorted(set(vertices))
    if keep and not (0 <= keep[0] and keep[-1] < g.n):
        bad = keep[0] if keep[0] < 0 else keep[-1]
        raise ValueError(f"vertex {bad} out of range for n={g.n}")
    pos = {old: new for new, old in enumerate(keep)}
    sel_mask = 0
    for old in keep:
        sel_mask |= 1 << old
    masks = [0] * len(keep)
    m = 0
    for new, old in enumerate(keep):
        row = 0
        for nb in bits(g.adj[old] & sel_mask):
            row |= 1 << pos[nb]
        masks[new] = row
        m += popcount(row)
    return Graph(len(keep), tuple(masks), m // 2), tuple(keep)


def format_edge_list(g: Graph) -> str:
    """Canonical text form: header "n m", then one "u v" line per edge."""
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    """Inverse of format_edge_list, validating as it goes.

    Requires u < v on every edge line and exactly the advertised number of
    edges; raises ParseError naming the first offending line.
    """
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError(1, "missing 'n m' header")
    head = lines[0].split()
    if len(head) != 2:
        raise ParseError(1, f"header must be 'n m', got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise ParseError(1, f"header must be two integers, got {lines[0]!r}") from None
    if n < 0 or m < 0:
        raise ParseError(1, f"header counts must be nonnegative, got {lines[0]!r}")
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for idx, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue  # tolerate blank lines (e.g. trailing newline)
        parts = raw.split()
        if len(parts) != 2:
            raise ParseError(idx, f"edge line must be 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(idx, f"edge endpoints must be integers, got {raw!r}") from None
        if not u < v:
            raise ParseError(idx, f"edges must satisfy u < v, got {u} {v}")
        if v >= n:
            raise ParseError(idx, f"vertex {v} out of range for n={n}")
        if (u, v) in seen:
            raise ParseError(idx, f"duplicate edge ({u}, {v})")
        seen.add((u, v))
        edges.append((u, v))
    if len(edges) != m:
        raise ParseError(1, f"header promises {m} edges, found {len(edges)}")
    return Graph.from_edges(n, edges)


def load_edge_list(path: str) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def save_edge_list(g: Graph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g))


def graph_hash(g: Graph) -> str:
    """16-hex-digit content hash of the canonical edge-list text."""
    return f"{fnv1a64(format_edge_list(g).encode('ascii')):016x}"


__all__ = [
    "Graph",
    "ParseError",
    "bits",
    "complete_graph",
    "cycle_graph",
    "empty_graph",
    "format_edge_list",
    "graph_hash",
    "induced_subgraph",
    "load_edge_list",
    "parse_edge_list",
    "path_graph",
    "petersen_graph",
    "popcount",
    "regular_circulant",
    "sample_gnp",
    "save_edge_list",
]
