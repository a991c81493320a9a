"""k-independent sets, the k-independence number, and first-moment bounds.

A vertex set S is k-independent when the subgraph it induces has maximum
degree at most k; alpha_k(G) is the largest size of such a set (alpha_0
is the usual independence number).  This module provides a greedy
constructor, an exact branch-and-bound solver, the predicted
concentration band for G(n,p), and the binomial tail machinery that the
band's proof rests on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .graph import Graph, bits, popcount
from .params import ProbParams

DEFAULT_BUDGET = 10**8


@dataclass(frozen=True)
class KIndependentWitness:
    """A concrete k-independent set (vertices sorted ascending)."""

    k: int
    vertices: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class AlphaResult:
    """Outcome of an exact alpha_k search.

    When optimal is False the search ran out of budget: witness.size is
    then only a lower bound on alpha_k, and upper_bound the best proven
    upper bound (the two coincide when optimal).
    """

    witness: KIndependentWitness
    optimal: bool
    nodes: int
    upper_bound: int

    @property
    def size(self) -> int:
        return self.witness.size


def _vertex_set_mask(g: Graph, vertices) -> int:
    mask = 0
    for v in vertices:
        if not 0 <= v < g.n:
            raise ValueError(f"vertex {v} out of range for n={g.n}")
        mask |= 1 << v
    return mask


def is_k_independent(g: Graph, vertices, k: int) -> bool:
    """True iff every vertex of G[vertices] has at most k neighbors inside."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    mask = _vertex_set_mask(g, vertices)
    for v in bits(mask):
        if popcount(g.adj[v] & mask) > k:
            return False
    return True


def greedy_k_independent(
    g: Graph, k: int, order: Optional[Sequence[int]] = None
) -> KIndependentWitness:
    """Single greedy sweep: add v whenever S + v stays k-independent.

    order is the scan order (a permutation of the vertices); when omitted,
    vertices are scanned by ascending degree, ties by id — the heuristic
    that tends to land largest.  The result is maximal: constraints only
    tighten as S grows, so a vertex rejected once can never become addable.
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if order is None:
        degs = g.degrees()
        order = sorted(range(g.n), key=lambda v: (degs[v], v))
    else:
        order = list(order)
        if sorted(order) != list(range(g.n)):
            raise ValueError("order must be a permutation of the vertex ids")
    chosen_mask = 0
    saturated_nbrs = 0  # union of N(u) over chosen u with k chosen neighbors
    cnt = [0] * g.n  # chosen-neighbor counts
    chosen = []
    for v in order:
        if cnt[v] > k or (saturated_nbrs >> v) & 1:
            continue
        chosen.append(v)
        chosen_mask |= 1 << v
        if cnt[v] == k:
            saturated_nbrs |= g.adj[v]
        for u in bits(g.adj[v]):
            cnt[u] += 1
            if (chosen_mask >> u) & 1 and cnt[u] == k:
                saturated_nbrs |= g.adj[u]
    return KIndependentWitness(k, tuple(sorted(chosen)))


def clique_cover_bound(g: Graph, k: int) -> int:
    """A proven upper bound on alpha_k via a greedy clique partition.

    Any k-independent set meets a clique Q in at most min(|Q|, k+1)
    vertices (inside a clique every vertex sees all others), so summing
    that over a partition into cliques bounds alpha_k from above.
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    degs = g.degrees()
    order = sorted(range(g.n), key=lambda v: (-degs[v], v))
    covered = 0
    bound = 0
    for v in order:
        if (covered >> v) & 1:
            continue
        clique_mask = 1 << v
        size = 1
        for u in bits(g.adj[v] & ~covered):
            if clique_mask & ~g.adj[u] == 0:  # u adjacent to every member
                clique_mask |= 1 << u
                size += 1
        covered |= clique_mask
        bound += min(size, k + 1)
    return bound


def _position_adjacency(g: Graph, order: Sequence[int]) -> "np.ndarray":
    """Adjacency of g with vertices renamed to positions in order, packed
    into rows of 64-bit words for the compiled kernel."""
    n = g.n
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    words = (n + 63) // 64
    adj = np.zeros((n, words), dtype=np.uint64)
    for i, v in enumerate(order):
        for u in bits(g.adj[v]):
            j = pos[u]
            adj[i, j >> 6] |= np.uint64(1) << np.uint64(j & 63)
    return adj


def alpha_k_exact(g: Graph, k: int, budget: int = DEFAULT_BUDGET) -> AlphaResult:
    """Exact alpha_k by branch and bound, or a flagged incumbent on timeout.

    Vertices are ordered by ascending degree and processed as nested
    suffix subproblems: c[i] is alpha_k of the graph induced on positions
    i..n-1, computed for i = n-1 down to 0, so c[0] = alpha_k(G).  Each
    subproblem asks only whether some k-independent set of size c[i+1]+1
    through position i exists (c can rise by at most 1 per vertex), and
    the table doubles as a pruning bound: candidates confined to
    positions >= j can add at most c[j] more vertices.

    For k > 0 the run is staged: the same search first solves the smaller
    degree bounds, whose suffix tables convert into extra pruning tables
    for the main run (a set inducing max degree k contains an independent
    subset of at least a (k+1)-th of its size, and a max-degree-1 subset
    of at least half, so alpha_k(suffix) <= (k+1) * alpha_0(suffix) and
    alpha_2(suffix) <= 2 * alpha_1(suffix)).  The hot loop is the numba
    kernel in _alphakern.

    The budget counts node expansions, summed across stages.  On
    exhaustion the best incumbent (at least as large as a greedy sweep)
    is returned with optimal=False.
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if budget < 1:
        raise ValueError(f"budget must be positive, got {budget}")
    n = g.n
    greedy = greedy_k_independent(g, k)
    if n == 0 or greedy.size == n:
        return AlphaResult(greedy, True, 0, greedy.size)

    # imported lazily so plain `import starsat` stays numba-free
    from ._alphakern import alpha_kernel

    degs = g.degrees()
    order = sorted(range(n), key=lambda v: (degs[v], v))
    adj = _position_adjacency(g, order)
    no_aux = np.full(n + 1, n + 1, dtype=np.int32)

    nodes = 0
    exhausted = False
    best_len = 0
    best_positions = np.zeros(n, dtype=np.int32)
    last_i = n - 1
    c = np.zeros(n + 1, dtype=np.int32)
    tables: dict[int, np.ndarray] = {}  # finished suffix tables by stage
    for stage in range(k + 1) if 1 <= k <= 2 else (k,):
        if stage == 1:
            aux = np.minimum(no_aux, 2 * tables[0])
        elif stage == 2:
            aux = np.minimum(3 * tables[0], 2 * tables[1])
        else:
            aux = no_aux
        c = np.zeros(n + 1, dtype=np.int32)
        best_out = np.zeros(n, dtype=np.int32)
        _, nodes, stage_exhausted, stage_best, stage_last = alpha_kernel(
            adj, stage, budget, nodes, aux, c, best_out
        )
        if stage == k or stage_exhausted:
            exhausted = stage_exhausted
            if stage == k:
                best_len, best_positions, last_i = stage_best, best_out, stage_last
            break
        tables[stage] = c

    if exhausted and best_len == 0:
        # budget died in a preparatory stage; fall back to the greedy set
        best = list(greedy.vertices)
        c_valid = n  # nothing of the main run is solved
    else:
        best = [order[int(q)] for q in best_positions[:best_len]]
        c_valid = last_i + 1

    if len(best) < greedy.size:
        best = list(greedy.vertices)
    witness = KIndependentWitness(k, tuple(sorted(best)))
    assert is_k_independent(g, witness.vertices, k)
    if not exhausted:
        upper = witness.size
    else:
        # solved suffix plus one per unprocessed position, or a cover bound
        upper = min(int(c[c_valid]) + c_valid, clique_cover_bound(g, k))
        upper = max(upper, witness.size)
    return AlphaResult(witness, not exhausted, nodes, upper)


def alpha_k_predicted_band(n: int, params: ProbParams, k: int) -> tuple[float, float]:
    """Predicted concentration band for alpha_k(G(n,p)).

    hi = 2 log_b n + 2k log_b log_b n - 1 is the proof-backed whp upper
    edge (b = 1/(1-p)).  lo = 2 log_b n - 2 log_b log_b n - 2 is a desk
    calibration mirroring two-point concentration, not a proven bound.
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if n < 3:
        raise ValueError(f"band needs n >= 3, got {n}")
    log_n = params.log_b(n)
    if log_n <= 1.0:
        raise ValueError(f"band needs log_b n > 1 (n={n}, b={params.b:g})")
    loglog_n = params.log_b(log_n)
    hi = 2.0 * log_n + 2.0 * k * loglog_n - 1.0
    lo = 2.0 * log_n - 2.0 * loglog_n - 2.0
    return (lo, hi)


def exact_binomial_cdf(trials: int, s: int, p: float | Fraction) -> Fraction:
    """P(Bin(trials, p) <= s) in exact rational arithmetic.

    A float p is taken at its exact binary value, so comparisons against
    bounds computed from the same float are exact.
    """
    if trials < 0:
        raise ValueError(f"trials must be nonnegative, got {trials}")
    pf = Fraction(p)
    if not 0 <= pf <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if s < 0:
        return Fraction(0)
    s = min(s, trials)
    q = 1 - pf
    total = Fraction(0)
    term = q**trials  # P(X = 0)
    for i in range(s + 1):
        total += term
        if i < s:
            if q == 0:
                term = Fraction(0) if i + 1 < trials else pf**trials
                continue
            term = term * (trials - i) * pf / ((i + 1) * q)
    return total


def binomial_tail_upper(trials: int, s: int, p: float) -> float:
    """The tail bound C(trials, s) * (1-p)^(trials-s) >= P(Bin <= s).

    Evaluated in log space so it survives trials up to ~10^5 without
    overflow (the value itself may still be astronomically large — the
    bound is only informative when it drops below 1).
    """
    if not 0 <= s <= trials:
        raise ValueError(f"need 0 <= s <= trials, got s={s}, trials={trials}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    log_comb = (
        math.lgamma(trials + 1) - math.lgamma(s + 1) - math.lgamma(trials - s + 1)
    )
    return math.exp(log_comb + (trials - s) * math.log1p(-p))


def binomial_tail_upper_exact(trials: int, s: int, p: float | Fraction) -> Fraction:
    """Rational-arithmetic twin of binomial_tail_upper, for airtight tests."""
    if not 0 <= s <= trials:
        raise ValueError(f"need 0 <= s <= trials, got s={s}, trials={trials}")
    pf = Fraction(p)
    if not 0 < pf < 1:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    return math.comb(trials, s) * (1 - pf) ** (trials - s)


@dataclass(frozen=True)
class FirstMomentInput:
    """Arguments of the expected count of sparse s-subsets in G(n,p)."""

    n: int
    params: ProbParams
    k: int
    s: int

    def __post_init__(self) -> None:
        if not 1 <= self.s <= self.n:
            raise ValueError(f"need 1 <= s <= n, got s={self.s}, n={self.n}")
        if self.k < 0:
            raise ValueError(f"k must be nonnegative, got {self.k}")


def first_moment_Xs_exact(inp: FirstMomentInput) -> Fraction:
    """E[X_s] as an exact rational, X_s = number of s-subsets inducing
    at most floor(k*s/2) edges (the densest an s-set can be while staying
    k-independent)."""
    pairs = inp.s * (inp.s - 1) // 2
    threshold = inp.k * inp.s // 2
    return math.comb(inp.n, inp.s) * exact_binomial_cdf(pairs, threshold, inp.params.p)


def first_moment_Xs(inp: FirstMomentInput) -> float:
    """Float view of first_moment_Xs_exact (exact internally)."""
    return float(first_moment_Xs_exact(inp))


__all__ = [
    "AlphaResult",
    "DEFAULT_BUDGET",
    "FirstMomentInput",
    "KIndependentWitness",
    "alpha_k_exact",
    "alpha_k_predicted_band",
    "binomial_tail_upper",
    "binomial_tail_upper_exact",
    "clique_cover_bound",
    "exact_binomial_cdf",
    "first_moment_Xs",
    "first_moment_Xs_exact",
    "greedy_k_independent",
    "is_k_independent",
]
