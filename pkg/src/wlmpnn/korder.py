"""k-order non-folklore WL over V^k and the matching one-dimensional k-order MPNN.

Tuple-indexed data lives in dense arrays of shape ``(n,) * k``; the tuple
``(v1, ..., vk)`` sits at that multi-index (row-major = lexicographic order).
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .graph import Graph
from .mpnn import activation_eval, sqrt_prime_codes
from .precision import PrecisionContext
from .wl import Outcome, canonical_form

DEFAULT_TUPLE_BUDGET = 20_000_000

EQUAL, EDGE, NON_EDGE = 0, 1, 2


class TupleBudgetError(MemoryError):
    pass


def check_budget(n: int, k: int, budget: int = DEFAULT_TUPLE_BUDGET) -> None:
    if k < 2:
        raise ValueError(f"order k must be at least 2, got {k}")
    if n ** k > budget:
        raise TupleBudgetError(f"n^k = {n}^{k} = {n ** k} tuples exceeds the budget of {budget}")


@dataclass(frozen=True)
class TupleLabeling:
    colors: np.ndarray
    k: int
    round: int = 0

    @property
    def n(self) -> int:
        return self.colors.shape[0] if self.colors.ndim else 0

    def num_classes(self) -> int:
        return int(np.unique(self.colors).size)


def iso_type_matrix(g: Graph, v: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """k x k matrix over {EQUAL, EDGE, NON_EDGE} for the tuple ``v``."""
    rows = []
    for a in v:
        row = []
        for b in v:
            if a == b:
                row.append(EQUAL)
            elif (min(a, b), max(a, b)) in g.edges:
                row.append(EDGE)
            else:
                row.append(NON_EDGE)
        rows.append(tuple(row))
    return tuple(rows)


def tuple_neighbors(v: tuple[int, ...], i: int, n: int) -> list[tuple[int, ...]]:
    """Tuples agreeing with ``v`` except possibly at coordinate ``i`` (1-based)."""
    if not 1 <= i <= len(v):
        raise ValueError(f"coordinate {i} out of range for a {len(v)}-tuple")
    return [v[:i - 1] + (u,) + v[i:] for u in range(n)]


def _iso_type_rows(g: Graph, k: int) -> np.ndarray:
    """One row per tuple: the upper-triangle iso-type entries, then node labels."""
    n = g.n
    adj = g.adjacency_matrix()
    idx = np.indices((n,) * k).reshape(k, -1)
    cols = []
    for i, j in itertools.combinations(range(k), 2):
        a, b = idx[i], idx[j]
        cols.append(np.where(a == b, EQUAL, np.where(adj[a, b], EDGE, NON_EDGE)))
    if g.labels is not None:
        lab = np.asarray(g.labels, dtype=np.int64)
        cols.extend(lab[idx[i]] for i in range(k))
    if not cols:
        return np.zeros((n ** k, 1), dtype=np.int64)
    return np.stack(cols, axis=1).astype(np.int64)


def _joint_unique(blocks: list[np.ndarray]) -> list[np.ndarray]:
    """Rank rows of several 2-D arrays jointly in lexicographic order.

    Narrower arrays are right-padded with -1, so rows of different widths
    never collide.
    """
    width = max((b.shape[1] for b in blocks), default=1)
    padded = []
    for b in blocks:
        if b.shape[1] < width:
            wide = np.full((b.shape[0], width), -1, dtype=np.int64)
            wide[:, :b.shape[1]] = b
            b = wide
        padded.append(b)
    stacked = np.concatenate(padded, axis=0) if padded else np.zeros((0, width), dtype=np.int64)
    if stacked.shape[0] == 0:
        return [np.zeros(0, dtype=np.int64) for _ in blocks]
    _, inv = np.unique(stacked, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    out, pos = [], 0
    for b in blocks:
        out.append(inv[pos:pos + b.shape[0]])
        pos += b.shape[0]
    return out


def iso_type_labelings(graphs: list[Graph], k: int, budget: int = DEFAULT_TUPLE_BUDGET) -> list[TupleLabeling]:
    for g in graphs:
        check_budget(g.n, k, budget)
    ids = _joint_unique([_iso_type_rows(g, k) for g in graphs])
    return [TupleLabeling(c.reshape((g.n,) * k), k, 0) for g, c in zip(graphs, ids)]


def iso_type_labeling(g: Graph, k: int, budget: int = DEFAULT_TUPLE_BUDGET) -> TupleLabeling:
    return iso_type_labelings([g], k, budget)[0]


def _line_multisets(colors: np.ndarray, axis: int) -> np.ndarray:
    """Sorted color vectors along ``axis``: one row per line of the hypercube."""
    moved = np.moveaxis(colors, axis, -1)
    return np.sort(moved, axis=-1).reshape(-1, colors.shape[axis])


def _broadcast_line_ids(line_ids: np.ndarray, n: int, k: int, axis: int) -> np.ndarray:
    """Per-tuple id of the line through it along ``axis``."""
    lines = line_ids.reshape((n,) * (k - 1))
    return np.broadcast_to(np.expand_dims(lines, axis), (n,) * k).reshape(-1)


def nwl_refine(graphs: list[Graph], labelings: list[TupleLabeling]) -> list[TupleLabeling]:
    """One joint NWL step; colors are comparable across the given graphs."""
    k = labelings[0].k
    t = labelings[0].round
    keys = [[lab.colors.reshape(-1)] for lab in labelings]
    for axis in range(k):
        line_ids = _joint_unique([_line_multisets(lab.colors, axis) for lab in labelings])
        for key, lab, ids in zip(keys, labelings, line_ids):
            key.append(_broadcast_line_ids(ids, lab.n, k, axis))
    rows = [np.stack(key, axis=1) for key in keys]
    new = _joint_unique(rows)
    return [TupleLabeling(c.reshape(lab.colors.shape), k, t + 1) for lab, c in zip(labelings, new)]


def nwl_step(g: Graph, labeling: TupleLabeling) -> TupleLabeling:
    return nwl_refine([g], [labeling])[0]


@dataclass(frozen=True)
class NWLTrace:
    labelings: tuple[TupleLabeling, ...]
    convergence_round: int

    @property
    def final(self) -> TupleLabeling:
        return self.labelings[-1]


def nwl_run(g: Graph, k: int, budget: int = DEFAULT_TUPLE_BUDGET) -> NWLTrace:
    current = iso_type_labeling(g, k, budget)
    labelings = [current]
    while True:
        nxt = nwl_step(g, current)
        if nxt.num_classes() == current.num_classes():
            return NWLTrace(tuple(labelings), current.round)
        labelings.append(nxt)
        current = nxt


def nwl_distinguish(g1: Graph, g2: Graph, k: int, budget: int = DEFAULT_TUPLE_BUDGET,
                    max_rounds: int | None = None) -> Outcome:
    l1, l2 = iso_type_labelings([g1, g2], k, budget)
    limit = g1.n ** k + g2.n ** k if max_rounds is None else max_rounds
    t = 0
    while True:
        c1 = Counter(l1.colors.reshape(-1).tolist())
        c2 = Counter(l2.colors.reshape(-1).tolist())
        if c1 != c2:
            return Outcome(True, t, t)
        if t >= limit:
            return Outcome(False, None, t)
        n1, n2 = nwl_refine([g1, g2], [l1, l2])
        before = len(set(c1) | set(c2))
        after = len(np.union1d(n1.colors.reshape(-1), n2.colors.reshape(-1)))
        if before == after:
            return Outcome(False, None, t)
        l1, l2 = n1, n2
        t += 1


# --- k-order MPNN -------------------------------------------------------------

@dataclass(frozen=True)
class TupleFeatures:
    """Features over V^k, flat in lexicographic tuple order."""

    values: tuple
    n: int
    k: int
    round: int
    bits: int

    def num_classes(self) -> int:
        return len(set(self.values))


def k_init_features(g: Graph, k: int, ctx: PrecisionContext, budget: int = DEFAULT_TUPLE_BUDGET,
                    labeling: TupleLabeling | None = None) -> TupleFeatures:
    """Iso-type classes -> sqrt of the primes, in ascending class order.

    Pass a ``labeling`` from :func:`iso_type_labelings` to share one class
    numbering between several graphs.
    """
    lab = iso_type_labeling(g, k, budget) if labeling is None else labeling
    flat = lab.colors.reshape(-1)
    codes = sqrt_prime_codes(int(flat.max()) + 1 if flat.size else 0, ctx)
    return TupleFeatures(tuple(codes[c] for c in flat.tolist()), g.n, k, 0, ctx.bits)


def k_mpnn_step(g: Graph, k: int, f: TupleFeatures, gamma, ctx: PrecisionContext,
                activation: str = "sigmoid", base_n: int | None = None,
                budget: int = DEFAULT_TUPLE_BUDGET) -> TupleFeatures:
    """``f'(v) = a(gamma * (f(v) + sum_i (n+1)^i * sum_{u in N_i(v)} f(u)))``.

    ``base_n`` overrides the ``n`` in the ``(n+1)`` radix (e.g. with the
    disjoint-union size when comparing two graphs).
    """
    n = g.n
    check_budget(n, k, budget)
    if len(f.values) != n ** k:
        raise ValueError("tuple features do not cover V^k")
    radix = (n if base_n is None else base_n) + 1
    vals = np.empty(len(f.values), dtype=object)
    vals[:] = f.values
    grid = vals.reshape((n,) * k)
    with ctx.scope():
        g_ = mpfr(gamma)
        weights = [mpfr(radix) ** i for i in range(1, k + 1)]
        per_axis = []
        for axis in range(k):
            lines = np.moveaxis(grid, axis, -1).reshape(-1, n)
            sums = np.empty(lines.shape[0], dtype=object)
            sums[:] = [gmpy2.fsum(list(row)) for row in lines]
            per_axis.append(_broadcast_line_ids(sums, n, k, axis))
        cache: dict = {}
        out = []
        for idx, fv in enumerate(f.values):
            terms = [fv] + [weights[i] * per_axis[i][idx] for i in range(k)]
            x = g_ * gmpy2.fsum(terms)
            r = cache.get(x)
            if r is None:
                r = cache[x] = activation_eval(x, activation, ctx)
            out.append(r)
    return TupleFeatures(tuple(out), n, k, f.round + 1, ctx.bits)


def k_mpnn_run(g: Graph, k: int, gamma, rounds: int, ctx: PrecisionContext,
               activation: str = "sigmoid", base_n: int | None = None,
               budget: int = DEFAULT_TUPLE_BUDGET, labeling: TupleLabeling | None = None) -> list[TupleFeatures]:
    trace = [k_init_features(g, k, ctx, budget, labeling)]
    for _ in range(rounds):
        trace.append(k_mpnn_step(g, k, trace[-1], gamma, ctx, activation, base_n, budget))
    return trace


def k_perfect_simulation(g: Graph, k: int, gamma, ctx: PrecisionContext,
                         activation: str = "arctan", budget: int = DEFAULT_TUPLE_BUDGET) -> bool:
    """Feature partition of V^k equals the NWL partition at every round up to convergence."""
    trace = nwl_run(g, k, budget)
    feats = k_mpnn_run(g, k, gamma, trace.convergence_round, ctx, activation, budget=budget)
    return all(
        canonical_form(fa.values) == canonical_form(lab.colors.reshape(-1).tolist())
        for fa, lab in zip(feats, trace.labelings)
    )


def k_mpnn_distinguish(g1: Graph, g2: Graph, k: int, gamma, rounds: int, ctx: PrecisionContext,
                       activation: str = "sigmoid") -> bool:
    base = g1.n + g2.n
    r = []
    for g, lab in zip((g1, g2), iso_type_labelings([g1, g2], k)):
        f = k_mpnn_run(g, k, gamma, rounds, ctx, activation, base, labeling=lab)[-1]
        with ctx.scope():
            r.append(gmpy2.fsum(list(f.values)))
    return r[0] != r[1]
