"""Seeded Monte Carlo grids over (n, p, r) and small-n cross-checks.

A grid is a list of cells (one per combination of the configured n, p,
and r values) run for a fixed number of trials.  Every trial derives its
own 64-bit seed from the master seed and the cell coordinates, so the
set of records is a pure function of the config — independent of worker
count and execution order — and any single trial can be reproduced in
isolation.  Records serialize to CSV with p carried both as decimal and
as its exact bit pattern (float hex), so parsing the CSV back recovers
the cell exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import statistics
import struct
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .graph import Graph, complete_graph, sample_gnp
from .independence import (
    DEFAULT_BUDGET,
    FirstMomentInput,
    alpha_k_exact,
    alpha_k_predicted_band,
    first_moment_Xs,
)
from .params import ProbParams
from .rng import RNG_ID, RngSeed, fnv1a64
from .saturation import (
    SAT_EXACT_BUDGET,
    VALID,
    check_certificate,
    construct_upper,
    greedy_saturated,
    reference_bands,
    sat_exact,
    sat_lower_bound,
)

#: Canonical method order; record sorting and summaries follow it.
METHODS = (
    "lower",
    "upper-greedy",
    "upper-exact-alpha",
    "exact",
    "alpha_k",
    "first-moment",
)
_METHOD_RANK = {m: i for i, m in enumerate(METHODS)}

GRAPH_FAMILIES = ("gnp", "complete")

CSV_COLUMNS = (
    "n",
    "p_hex",
    "p_decimal",
    "r",
    "trial",
    "method",
    "value",
    "ell_used",
    "certified",
    "elapsed_ms",
    "rng_id",
    "seed",
)

SUMMARY_COLUMNS = (
    "n",
    "p_decimal",
    "r",
    "method",
    "count",
    "mean",
    "stdev",
    "min",
    "max",
    "band_lo",
    "band_hi",
    "band_hit_frac",
)


@dataclass(frozen=True)
class ExperimentConfig:
    """One grid: cell axes, trial count, methods, and reproducibility keys.

    ``graph`` selects the per-trial host: "gnp" samples G(n, p) from the
    trial seed, "complete" substitutes K_n (p then only labels the cell).
    ``budgets`` caps search effort per method name; missing entries fall
    back to the library defaults.  ``epsilon`` parameterizes the bands
    used when summarizing.
    """

    n_values: tuple[int, ...]
    p_values: tuple[float, ...]
    r_values: tuple[int, ...]
    trials: int
    master_seed: RngSeed
    methods: tuple[str, ...]
    budgets: Mapping[str, int] = field(default_factory=dict)
    epsilon: float = 0.5
    graph: str = "gnp"

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_values", tuple(self.n_values))
        object.__setattr__(self, "p_values", tuple(self.p_values))
        object.__setattr__(self, "r_values", tuple(self.r_values))
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "budgets", dict(self.budgets))
        if not (self.n_values and self.p_values and self.r_values):
            raise ValueError("n_values, p_values, r_values must be nonempty")
        for n in self.n_values:
            if n < 2:
                raise ValueError(f"all n must be >= 2, got {n}")
        for p in self.p_values:
            if not 0.0 < p < 1.0:
                raise ValueError(f"all p must lie in (0, 1), got {p}")
        for r in self.r_values:
            if r < 2:
                raise ValueError(f"all r must be >= 2, got {r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        for m in self.methods:
            if m not in _METHOD_RANK:
                raise ValueError(f"unknown method {m!r}; choose from {METHODS}")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("methods must not repeat")
        for m in self.budgets:
            if m not in _METHOD_RANK:
                raise ValueError(f"budget for unknown method {m!r}")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in [0, 1), got {self.epsilon}")
        if self.graph not in GRAPH_FAMILIES:
            raise ValueError(
                f"graph must be one of {GRAPH_FAMILIES}, got {self.graph!r}"
            )


@dataclass(frozen=True)
class TrialRecord:
    """One (cell, trial, method) measurement.

    ``certified`` is False exactly when a search budget ran out on the
    way to the value (the value is then still a valid bound, just not a
    proven-optimal one).  ``seed`` is the trial's derived 64-bit seed,
    shared by every method of the trial.
    """

    n: int
    p: float
    r: int
    trial: int
    method: str
    value: float
    ell_used: Optional[int]
    certified: bool
    elapsed_ms: int
    rng_id: str
    seed: int


@dataclass(frozen=True)
class SummaryRow:
    """Aggregate of one (cell, method) group; band fields are None for
    methods without a predicted band (first-moment)."""

    n: int
    p: float
    r: int
    method: str
    count: int
    mean: float
    stdev: float
    min: float
    max: float
    band_lo: Optional[float]
    band_hi: Optional[float]
    band_hit_frac: Optional[float]


def derive_trial_seed(master: RngSeed, n: int, p: float, r: int, trial: int) -> int:
    """The 64-bit seed of one trial: FNV-1a over the little-endian packing
    (master, stream, n, IEEE bits of p, r, trial).

    Carrying p by bit pattern keeps the derivation immune to decimal
    formatting; all methods within the trial share this seed (and hence
    the sampled graph).
    """
    data = struct.pack(
        "<QQqdqq", master.master, master.stream, n, float(p), r, trial
    )
    return fnv1a64(data)


def _sample_host(config: ExperimentConfig, n: int, p: float, seed: int) -> Graph:
    if config.graph == "complete":
        return complete_graph(n)
    return sample_gnp(n, p, RngSeed(seed))


def _first_moment_scale(n: int, p: float, k: int) -> int:
    """The set size probed by the first-moment method: the ceiling of the
    alpha_k upper band (clamped to [1, n]), where the expected count
    transitions from large to o(1)."""
    _, hi = alpha_k_predicted_band(n, ProbParams(p), k)
    return min(n, max(1, math.ceil(hi)))


def _run_method(
    config: ExperimentConfig,
    g: Graph,
    n: int,
    p: float,
    r: int,
    trial: int,
    method: str,
    seed: int,
    record_timing: bool,
) -> TrialRecord:
    budgets = config.budgets
    start = time.perf_counter() if record_timing else 0.0
    ell: Optional[int] = None
    if method == "lower":
        lb = sat_lower_bound(g, r, "exact", budget=budgets.get(method, DEFAULT_BUDGET))
        value, certified = float(lb.value), lb.certified
    elif method == "upper-greedy":
        rep = construct_upper(g, r, "greedy")
        value, certified, ell = float(rep.upper), True, rep.ell_used
    elif method == "upper-exact-alpha":
        rep = construct_upper(g, r, "exact", budget=budgets.get(method, DEFAULT_BUDGET))
        value, certified, ell = float(rep.upper), bool(rep.alpha_optimal), rep.ell_used
    elif method == "exact":
        rep = sat_exact(g, r, budget=budgets.get(method, SAT_EXACT_BUDGET))
        certified = rep.exact is not None
        value = float(rep.exact if certified else rep.upper)
    elif method == "alpha_k":
        res = alpha_k_exact(g, r - 2, budget=budgets.get(method, DEFAULT_BUDGET))
        value, certified = float(res.size), res.optimal
    else:  # first-moment: a pure function of the cell, no graph involved
        k = r - 2
        inp = FirstMomentInput(n, ProbParams(p), k, _first_moment_scale(n, p, k))
        value, certified = first_moment_Xs(inp), True
    elapsed = int(round((time.perf_counter() - start) * 1000)) if record_timing else 0
    return TrialRecord(
        n=n,
        p=p,
        r=r,
        trial=trial,
        method=method,
        value=value,
        ell_used=ell,
        certified=certified,
        elapsed_ms=elapsed,
        rng_id=RNG_ID,
        seed=seed,
    )


def _grid_task(args) -> list[TrialRecord]:
    config, n, p, r, trial, record_timing = args
    seed = derive_trial_seed(config.master_seed, n, p, r, trial)
    g = _sample_host(config, n, p, seed)
    return [
        _run_method(config, g, n, p, r, trial, m, seed, record_timing)
        for m in config.methods
    ]


def _record_key(rec: TrialRecord):
    return (rec.n, rec.p, rec.r, rec.trial, _METHOD_RANK[rec.method])


def run_grid(
    config: ExperimentConfig, jobs: int = 1, record_timing: bool = False
) -> list[TrialRecord]:
    """All records of the grid, sorted by (n, p, r, trial, method).

    One record per (cell, trial, method); methods within a trial share
    the sampled graph.  ``jobs`` > 1 runs trials in a process pool; the
    output is identical regardless (derived seeds + post-sort).  Budget
    exhaustion in a method marks its record certified=False but never
    aborts the grid.  ``record_timing`` fills elapsed_ms with wall-clock
    milliseconds — off by default so reruns are byte-identical.
    """
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    tasks = [
        (config, n, p, r, trial, record_timing)
        for n in config.n_values
        for p in config.p_values
        for r in config.r_values
        for trial in range(config.trials)
    ]
    records: list[TrialRecord] = []
    if jobs == 1 or len(tasks) == 1:
        for task in tasks:
            records.extend(_grid_task(task))
    else:
        chunk = max(1, len(tasks) // (jobs * 4))
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for batch in pool.map(_grid_task, tasks, chunksize=chunk):
                records.extend(batch)
    records.sort(key=_record_key)
    return records


def summarize(records: Sequence[TrialRecord], epsilon: float = 0.5) -> list[SummaryRow]:
    """Per-(cell, method) statistics with band-hit accounting.

    The band is the main saturation band for the sat-flavored methods,
    the alpha_k band (k = r-2) for alpha_k, and absent for first-moment.
    Mixing records from different RNG algorithms is refused — such
    records cannot have come from one config.
    """
    if not records:
        raise ValueError("no records to summarize")
    rng_ids = {rec.rng_id for rec in records}
    if len(rng_ids) > 1:
        raise ValueError(f"records mix rng algorithms: {sorted(rng_ids)}")
    groups: dict[tuple, list[TrialRecord]] = {}
    for rec in records:
        groups.setdefault((rec.n, rec.p, rec.r, rec.method), []).append(rec)
    rows = []
    for (n, p, r, method) in sorted(groups, key=lambda k: (*k[:3], _METHOD_RANK[k[3]])):
        values = [rec.value for rec in groups[(n, p, r, method)]]
        band_lo: Optional[float] = None
        band_hi: Optional[float] = None
        hit: Optional[float] = None
        if method == "alpha_k":
            band_lo, band_hi = alpha_k_predicted_band(n, ProbParams(p), r - 2)
        elif method != "first-moment":
            band_lo, band_hi = reference_bands(n, ProbParams(p), r, epsilon).main
        if band_lo is not None:
            inside = sum(1 for v in values if band_lo <= v <= band_hi)
            hit = inside / len(values)
        rows.append(
            SummaryRow(
                n=n,
                p=p,
                r=r,
                method=method,
                count=len(values),
                mean=statistics.fmean(values),
                stdev=statistics.stdev(values) if len(values) > 1 else 0.0,
                min=min(values),
                max=max(values),
                band_lo=band_lo,
                band_hi=band_hi,
                band_hit_frac=hit,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# small-n cross-check harness


def _min_maximal_matching_size(g: Graph) -> int:
    """Minimum size of a maximal matching, by exhaustive enumeration.

    Independent of the saturation machinery on purpose: branch on every
    edge (skip / take-if-both-free) and score leaves whose matching
    covers at least one endpoint of every edge.
    """
    edges = g.edges()
    best = len(edges) + 1 if edges else 0

    def walk(i: int, used: int, count: int) -> None:
        nonlocal best
        if count >= best:
            return
        if i == len(edges):
            if all(used >> u & 1 or used >> v & 1 for u, v in edges):
                best = count
            return
        u, v = edges[i]
        if not (used >> u & 1 or used >> v & 1):
            walk(i + 1, used | 1 << u | 1 << v, count + 1)
        walk(i + 1, used, count)

    walk(0, 0, 0)
    return best


def verify_small(
    max_n: int, r_values: Iterable[int], count: int, seed: RngSeed | int
) -> list[str]:
    """Cross-check the solver stack on ``count`` small random graphs.

    For each graph and r: ceil(lower) <= exact <= constructive upper,
    both emitted subgraphs pass the certificate checker, and at r=2 the
    exact value equals the minimum maximal matching size from the
    independent enumerator.  Returns human-readable violation strings
    (expected: none).  Graphs cycle through n in 2..max_n and p in
    {0.3, 0.5, 0.7}, sampled from per-index substreams of ``seed``.
    """
    if max_n > 10:
        raise ValueError(f"verify_small is for hosts with n <= 10, got {max_n}")
    if max_n < 2:
        raise ValueError(f"need max_n >= 2, got {max_n}")
    base = seed if isinstance(seed, RngSeed) else RngSeed(seed)
    r_values = tuple(r_values)
    p_cycle = (0.3, 0.5, 0.7)
    violations = []
    for i in range(count):
        n = 2 + i % (max_n - 1)
        p = p_cycle[i % len(p_cycle)]
        g = sample_gnp(n, p, base.with_stream(i))
        tag = f"graph {i} (n={n}, p={p})"
        for r in r_values:
            rep = sat_exact(g, r)
            if rep.exact is None:
                violations.append(f"{tag} r={r}: exact search exhausted budget")
                continue
            upper = construct_upper(g, r)
            if not rep.lower_ceiled <= rep.exact <= upper.upper:
                violations.append(
                    f"{tag} r={r}: sandwich broken "
                    f"{rep.lower_ceiled} <= {rep.exact} <= {upper.upper}"
                )
            for name, cert in (("exact", rep.certificate), ("upper", upper.certificate)):
                verdict = check_certificate(cert.edges, g, r).verdict
                if verdict != VALID:
                    violations.append(f"{tag} r={r}: {name} certificate {verdict}")
            greedy = greedy_saturated(g, r)
            if check_certificate(greedy.edges, g, r).verdict != VALID:
                violations.append(f"{tag} r={r}: greedy certificate invalid")
            if r == 2:
                mmm = _min_maximal_matching_size(g)
                if rep.exact != mmm:
                    violations.append(
                        f"{tag} r=2: exact {rep.exact} != min maximal matching {mmm}"
                    )
    return violations


# ---------------------------------------------------------------------------
# serialization


def config_to_json(config: ExperimentConfig) -> str:
    """JSON mirror of the config (field names match the dataclass)."""
    seed = config.master_seed
    payload = {
        "n_values": list(config.n_values),
        "p_values": list(config.p_values),
        "r_values": list(config.r_values),
        "trials": config.trials,
        "master_seed": seed.master if seed.stream == 0 else [seed.master, seed.stream],
        "methods": list(config.methods),
        "budgets": dict(config.budgets),
        "epsilon": config.epsilon,
        "graph": config.graph,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def config_from_json(text: str) -> ExperimentConfig:
    payload = json.loads(text)
    raw_seed = payload["master_seed"]
    if isinstance(raw_seed, list):
        seed = RngSeed(*raw_seed)
    else:
        seed = RngSeed(raw_seed)
    return ExperimentConfig(
        n_values=payload["n_values"],
        p_values=payload["p_values"],
        r_values=payload["r_values"],
        trials=payload["trials"],
        master_seed=seed,
        methods=payload["methods"],
        budgets=payload.get("budgets", {}),
        epsilon=payload.get("epsilon", 0.5),
        graph=payload.get("graph", "gnp"),
    )


def _atomic_write(path: str, text: str) -> None:
    """Write via a sibling temp file + rename so failures never leave a
    partial file at the destination."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def records_to_csv(records: Sequence[TrialRecord]) -> str:
    """CSV text with the documented column order; p appears both as its
    shortest decimal and as the exact float hex pattern."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(
            [
                rec.n,
                float(rec.p).hex(),
                repr(float(rec.p)),
                rec.r,
                rec.trial,
                rec.method,
                repr(float(rec.value)),
                "" if rec.ell_used is None else rec.ell_used,
                "true" if rec.certified else "false",
                rec.elapsed_ms,
                rec.rng_id,
                rec.seed,
            ]
        )
    return buf.getvalue()


def write_records_csv(records: Sequence[TrialRecord], path: str) -> None:
    _atomic_write(path, records_to_csv(records))


def read_records_csv(path: str) -> list[TrialRecord]:
    """Parse a records CSV back into TrialRecord values (p from its hex
    pattern, so the round trip is exact)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header: {header}")
        records = []
        for row in reader:
            (n, p_hex, _p_dec, r, trial, method, value, ell, cert, ms, rng_id, seed) = row
            records.append(
                TrialRecord(
                    n=int(n),
                    p=float.fromhex(p_hex),
                    r=int(r),
                    trial=int(trial),
                    method=method,
                    value=float(value),
                    ell_used=None if ell == "" else int(ell),
                    certified=cert == "true",
                    elapsed_ms=int(ms),
                    rng_id=rng_id,
                    seed=int(seed),
                )
            )
    return records


def summary_to_csv(rows: Sequence[SummaryRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.n,
                repr(float(row.p)),
                row.r,
                row.method,
                row.count,
                repr(row.mean),
                repr(row.stdev),
                repr(row.min),
                repr(row.max),
                "" if row.band_lo is None else repr(row.band_lo),
                "" if row.band_hi is None else repr(row.band_hi),
                "" if row.band_hit_frac is None else repr(row.band_hit_frac),
            ]
        )
    return buf.getvalue()


def write_summary_csv(rows: Sequence[SummaryRow], path: str) -> None:
    _atomic_write(path, summary_to_csv(rows))
