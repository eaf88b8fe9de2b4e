"""Perfect-simulation checks, minimum-precision search and the experiment drivers."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .graph import Graph, generate_barabasi_albert, generate_erdos_renyi, make_rng
from .mpnn import MpnnConfig, mpnn_run
from .precision import PrecisionContext
from .wl import WLTrace, canonical_form, wl_run

log = logging.getLogger(__name__)


# --- graph collections ------------------------------------------------------------

@dataclass(frozen=True)
class GraphSpec:
    """Recipe for a generated graph; ``param`` is p (ER) or m (BA)."""

    family: str
    n: int
    param: float
    seed: int

    @property
    def graph_id(self) -> str:
        return f"{self.family}-n{self.n}-s{self.seed}"

    def build(self) -> Graph:
        if self.family == "er":
            return generate_erdos_renyi(self.n, self.param, self.seed)
        if self.family == "ba":
            return generate_barabasi_albert(self.n, int(self.param), self.seed)
        raise ValueError(f"unknown graph family {self.family!r}")


def sparse_er_probability(n: int, avg_degree: float = 4.0) -> float:
    return min(1.0, avg_degree / n)


def graph_collection(family: str, count: int, n_min: int, n_max: int, seed: int,
                     m: int = 2, avg_degree: float = 4.0) -> list[GraphSpec]:
    """``count`` graph recipes with sizes uniform in ``[n_min, n_max]``."""
    rng = make_rng(seed)
    specs = []
    for i in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        gseed = seed * 100_003 + i
        param = sparse_er_probability(n, avg_degree) if family == "er" else m
        specs.append(GraphSpec(family, n, param, gseed))
    return specs


def draw_gammas(count: int, seed: int, high: float = 1.0) -> list[float]:
    """``count`` float64 gammas uniform in ``(0, high)``."""
    rng = make_rng(seed)
    out = []
    while len(out) < count:
        g = float(rng.random()) * high
        if 0.0 < g < 1.0:
            out.append(g)
    return out


# --- perfect simulation --------------------------------------------------------

@dataclass(frozen=True)
class SimulationReport:
    graph_id: str
    gamma: float
    bits: int
    perfect: bool
    first_divergence_round: int | None
    convergence_round: int
    wl_classes: int
    mpnn_classes: tuple[int, ...]
    per_round_agreement: tuple[bool, ...]


def perfect_simulation(g: Graph, gamma, ctx: PrecisionContext, cfg: MpnnConfig | None = None,
                       trace: WLTrace | None = None, graph_id: str = "") -> SimulationReport:
    """Does the MPNN partition at the WL convergence round T equal WL's?

    Agreement at every round ``t <= T`` is recorded for diagnostics;
    ``first_divergence_round`` is the first disagreeing round, reported only
    when round T itself disagrees.
    """
    cfg = MpnnConfig(gamma) if cfg is None else cfg
    if cfg.gamma != gamma:
        cfg = MpnnConfig(gamma, cfg.activation, cfg.scheme, cfg.encoding)
    trace = wl_run(g) if trace is None else trace
    T = trace.convergence_round
    if T is None:
        raise ValueError("WL trace did not converge")
    feats = mpnn_run(g, cfg, T, ctx)
    agree = tuple(
        canonical_form(f.values) == canonical_form(lab.colors)
        for f, lab in zip(feats, trace.labelings)
    )
    perfect = agree[T]
    first = None if perfect else agree.index(False)
    return SimulationReport(
        graph_id=graph_id,
        gamma=float(gamma),
        bits=ctx.bits,
        perfect=perfect,
        first_divergence_round=first,
        convergence_round=T,
        wl_classes=trace.labelings[T].num_classes(),
        mpnn_classes=tuple(f.num_classes() for f in feats),
        per_round_agreement=agree,
    )


# --- minimum precision ---------------------------------------------------------

@dataclass(frozen=True)
class MinPrecisionResult:
    bits: int | None
    last_failure: int | None
    evaluated: tuple[tuple[int, bool], ...] = field(default=())

    @property
    def found(self) -> bool:
        return self.bits is not None


def search_min_bits(ok: Callable[[int], bool], p_max: int, start: int = 8) -> MinPrecisionResult:
    """Doubling from ``start`` to the first success, then bisection downward.

    Success is not assumed monotone in p: the answer is the smallest success
    on the search lattice whose lattice predecessor (``last_failure``) failed.
    """
    if p_max < 4:
        raise ValueError("p_max must be at least 4")
    seen: dict[int, bool] = {}

    def probe(p: int) -> bool:
        if p not in seen:
            seen[p] = ok(p)
        return seen[p]

    lo, p = None, start
    hi = None
    while True:
        if p > p_max:
            if lo is None or lo < p_max:
                p = p_max
            else:
                break
        if probe(p):
            hi = p
            break
        lo = p
        if p == p_max:
            break
        p *= 2
    if hi is None:
        return MinPrecisionResult(None, lo, tuple(sorted(seen.items())))
    if lo is not None:
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if probe(mid):
                hi = mid
            else:
                lo = mid
    if not ok(hi):
        raise RuntimeError(f"success at {hi} bits did not reproduce")
    return MinPrecisionResult(hi, lo, tuple(sorted(seen.items())))


def min_precision_bits(g: Graph, gamma, p_max: int, cfg: MpnnConfig | None = None,
                       trace: WLTrace | None = None, start: int = 8) -> MinPrecisionResult:
    trace = wl_run(g) if trace is None else trace
    return search_min_bits(
        lambda p: perfect_simulation(g, gamma, PrecisionContext(p), cfg, trace).perfect,
        p_max, start,
    )


# --- experiments -------------------------------------------------------------

@dataclass(frozen=True)
class LotteryRecord:
    family: str
    graph_id: str
    n: int
    param: float
    seed: int
    gamma: float
    bits: int
    perfect: bool
    first_divergence_round: int | None
    wl_classes: int


@dataclass(frozen=True)
class LotteryResult:
    records: tuple[LotteryRecord, ...]
    gammas: tuple[float, ...]
    counts: tuple[int, ...]
    num_graphs: int

    @property
    def lottery_gammas(self) -> tuple[float, ...]:
        return tuple(g for g, c in zip(self.gammas, self.counts) if c == self.num_graphs)


def _lottery_cell(args):
    gamma, items, bits, cfg = args
    ctx = PrecisionContext(bits)
    rows = []
    for gid, spec, g, trace in items:
        rep = perfect_simulation(g, gamma, ctx, cfg, trace, gid)
        rows.append((gid, spec, rep))
    return rows


def _named_graphs(graphs) -> list[tuple[str, GraphSpec | None, Graph]]:
    out = []
    for i, item in enumerate(graphs):
        if isinstance(item, GraphSpec):
            out.append((item.graph_id, item, item.build()))
        elif isinstance(item, tuple):
            gid, g = item
            out.append((gid, None, g))
        else:
            out.append((f"g{i}", None, item))
    return out


def _pool_map(fn, jobs: list, workers: int):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def lottery_experiment(graphs: Iterable, gammas: Sequence[float], ctx: PrecisionContext,
                       cfg: MpnnConfig | None = None, workers: int = 1) -> LotteryResult:
    """Every (graph, gamma) cell; counts perfect simulations per gamma.

    ``graphs`` may hold :class:`GraphSpec` recipes, ``(graph_id, Graph)``
    pairs, or bare graphs.
    """
    named = _named_graphs(graphs)
    items = [(gid, spec, g, wl_run(g)) for gid, spec, g in named]
    jobs = [(float(gm), items, ctx.bits, cfg) for gm in gammas]
    records, counts = [], []
    for gm, rows in zip(gammas, _pool_map(_lottery_cell, jobs, workers)):
        count = 0
        for gid, spec, rep in rows:
            count += rep.perfect
            records.append(LotteryRecord(
                family=spec.family if spec else "file",
                graph_id=gid,
                n=spec.n if spec else -1,
                param=float(spec.param) if spec else float("nan"),
                seed=spec.seed if spec else -1,
                gamma=float(gm),
                bits=ctx.bits,
                perfect=rep.perfect,
                first_divergence_round=rep.first_divergence_round,
                wl_classes=rep.wl_classes,
            ))
        counts.append(count)
        log.info("gamma=%s perfect on %d/%d graphs", float(gm).hex(), count, len(items))
    return LotteryResult(tuple(records), tuple(float(g) for g in gammas), tuple(counts), len(items))


@dataclass(frozen=True)
class SweepRecord:
    n: int
    edge_probability: float
    graph_seed: int
    gamma: float
    min_bits: int | None
    last_failure: int | None
    wl_classes: int
    convergence_round: int


@dataclass(frozen=True)
class SweepSummary:
    n: int
    mean_bits: float
    sd_bits: float
    num_found: int
    num_gammas: int


def _sweep_cell(args):
    n, p, gseed, gammas, p_max, cfg = args
    g = generate_erdos_renyi(n, p, gseed)
    trace = wl_run(g)
    rows = []
    for gm in gammas:
        res = min_precision_bits(g, gm, p_max, cfg, trace)
        rows.append(SweepRecord(n, p, gseed, float(gm), res.bits, res.last_failure,
                                trace.final.num_classes(), trace.convergence_round))
    return rows


def precision_sweep(sizes: Sequence[int], gammas: Sequence[float], seed: int = 0, p_max: int = 1024,
                    avg_degree: float = 4.0, cfg: MpnnConfig | None = None,
                    workers: int = 1) -> tuple[list[SweepRecord], list[SweepSummary]]:
    """Minimum bits for one sparse ER graph per size (graph seed = seed + n)."""
    jobs = [(n, sparse_er_probability(n, avg_degree), seed + n, [float(x) for x in gammas], p_max, cfg)
            for n in sizes]
    records = [r for rows in _pool_map(_sweep_cell, jobs, workers) for r in rows]
    return records, summarize_sweep(records)


def summarize_sweep(records: Sequence[SweepRecord]) -> list[SweepSummary]:
    out = []
    for n in sorted({r.n for r in records}):
        rows = [r for r in records if r.n == n]
        bits = np.array([r.min_bits for r in rows if r.min_bits is not None], dtype=float)
        mean = float(bits.mean()) if bits.size else math.nan
        sd = float(bits.std()) if bits.size else math.nan
        out.append(SweepSummary(n, mean, sd, int(bits.size), len(rows)))
    return out


@dataclass(frozen=True)
class ClassCountRecord:
    graph_id: str
    gamma: float
    bits: int
    convergence_round: int
    mpnn_classes: int
    wl_classes: int


def class_count_vs_precision(g: Graph, gammas: Sequence[float], bits_list: Sequence[int],
                             cfg: MpnnConfig | None = None, graph_id: str = "",
                             trace: WLTrace | None = None) -> list[ClassCountRecord]:
    """Distinct MPNN feature values at the WL convergence round, per (gamma, bits)."""
    trace = wl_run(g) if trace is None else trace
    T = trace.convergence_round
    wl_classes = trace.labelings[T].num_classes()
    out = []
    for gm in gammas:
        for bits in bits_list:
            c = MpnnConfig(gm) if cfg is None else MpnnConfig(gm, cfg.activation, cfg.scheme, cfg.encoding)
            feats = mpnn_run(g, c, T, PrecisionContext(bits))
            out.append(ClassCountRecord(graph_id, float(gm), bits, T, feats[-1].num_classes(), wl_classes))
    return out
