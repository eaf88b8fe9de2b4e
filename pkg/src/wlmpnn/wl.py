"""1-WL color refinement with canonical, cross-graph comparable color ids."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Hashable, Sequence

from .graph import Graph


@dataclass(frozen=True)
class Labeling:
    colors: tuple[int, ...]
    round: int = 0

    def __len__(self):
        return len(self.colors)

    def num_classes(self) -> int:
        return len(set(self.colors))

    def partition(self) -> "Partition":
        return Partition.from_colors(self.colors)


@dataclass(frozen=True)
class Partition:
    """Node partition, stored as sorted blocks of sorted node ids."""

    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_colors(cls, colors: Sequence[Hashable]) -> "Partition":
        groups: dict = {}
        for v, c in enumerate(colors):
            groups.setdefault(c, []).append(v)
        return cls(tuple(sorted(tuple(b) for b in groups.values())))

    def __len__(self):
        return len(self.blocks)

    def refines(self, other: "Partition") -> bool:
        """True if every block of ``self`` sits inside one block of ``other``."""
        owner = {}
        for i, block in enumerate(other.blocks):
            for v in block:
                owner[v] = i
        return all(len({owner[v] for v in block}) == 1 for block in self.blocks)


def canonical_form(colors: Sequence[Hashable]) -> tuple[int, ...]:
    """Relabel colors by first occurrence; equal outputs iff equal partitions."""
    seen: dict = {}
    return tuple(seen.setdefault(c, len(seen)) for c in colors)


def partitions_equivalent(l1, l2) -> bool:
    """``l1(u) == l1(v)`` iff ``l2(u) == l2(v)`` for all node pairs.

    Accepts :class:`Labeling` objects or plain color sequences (any hashable
    values, e.g. features).
    """
    c1 = l1.colors if isinstance(l1, Labeling) else l1
    c2 = l2.colors if isinstance(l2, Labeling) else l2
    if len(c1) != len(c2):
        raise ValueError(f"labelings cover different node sets ({len(c1)} vs {len(c2)} nodes)")
    return canonical_form(c1) == canonical_form(c2)


class ColorTable:
    """Compression dictionary: one ``key -> color id`` map per round.

    New keys seen in a single refinement call are numbered in lexicographic
    order, after all ids already handed out for that round.
    """

    def __init__(self):
        self.rounds: list[dict] = []

    def assign(self, round_: int, keys: list) -> list[int]:
        while len(self.rounds) <= round_:
            self.rounds.append({})
        table = self.rounds[round_]
        for key in sorted(set(keys) - table.keys()):
            table[key] = len(table)
        return [table[k] for k in keys]


def _keys(g: Graph, colors: Sequence[int]) -> list[tuple]:
    adj = g.adjacency
    return [(colors[v], tuple(sorted(colors[u] for u in adj[v]))) for v in range(g.n)]


def refine(graphs: Sequence[Graph], labelings: Sequence[Labeling], table: ColorTable | None = None) -> list[Labeling]:
    """One joint WL step over several graphs sharing one color table."""
    table = ColorTable() if table is None else table
    rounds = {l.round for l in labelings}
    if len(rounds) > 1:
        raise ValueError("labelings must come from the same round")
    t = rounds.pop() if rounds else 0
    all_keys = []
    for g, lab in zip(graphs, labelings):
        if len(lab) != g.n:
            raise ValueError("labeling does not cover the graph's nodes")
        all_keys.append(_keys(g, lab.colors))
    ids = table.assign(t + 1, [k for ks in all_keys for k in ks])
    out, pos = [], 0
    for ks in all_keys:
        out.append(Labeling(tuple(ids[pos:pos + len(ks)]), t + 1))
        pos += len(ks)
    return out


def wl_step(g: Graph, labeling: Labeling, table: ColorTable | None = None) -> Labeling:
    return refine([g], [labeling], table)[0]


def initial_labeling(g: Graph, table: ColorTable | None = None) -> Labeling:
    colors = list(g.initial_colors())
    if table is not None:
        colors = table.assign(0, colors)
    return Labeling(tuple(colors), 0)


@dataclass(frozen=True)
class WLTrace:
    labelings: tuple[Labeling, ...]
    convergence_round: int | None

    @property
    def final(self) -> Labeling:
        return self.labelings[-1]

    def num_classes(self, t: int | None = None) -> int:
        lab = self.final if t is None else self.labelings[t]
        return lab.num_classes()


def wl_run(g: Graph, max_rounds: int | None = None) -> WLTrace:
    """Refine until the partition stops changing.

    The trace holds rounds ``0..T`` where ``T`` is the first round whose
    partition equals that of round ``T + 1``. With ``max_rounds`` set and hit
    first, ``convergence_round`` is ``None``.
    """
    table = ColorTable()
    current = initial_labeling(g, table)
    labelings = [current]
    limit = max(g.n, 1) if max_rounds is None else max_rounds
    while True:
        if current.round >= limit:
            return WLTrace(tuple(labelings), None)
        nxt = wl_step(g, current, table)
        # refinement never merges classes, so equal class counts mean a stable partition
        if nxt.num_classes() == current.num_classes():
            return WLTrace(tuple(labelings), current.round)
        labelings.append(nxt)
        current = nxt


@dataclass(frozen=True)
class Outcome:
    distinguished: bool
    round: int | None
    rounds_run: int

    def __bool__(self):
        return self.distinguished


def wl_distinguish(g1: Graph, g2: Graph, max_rounds: int | None = None) -> Outcome:
    """Compare WL color multisets of two graphs under one shared color table.

    Stops at the first round with different multisets, or once the joint
    partition (over both graphs together) is stable with equal multisets.
    """
    limit = g1.n + g2.n if max_rounds is None else max_rounds
    table = ColorTable()
    l1, l2 = initial_labeling(g1, table), initial_labeling(g2, table)
    t = 0
    while True:
        if Counter(l1.colors) != Counter(l2.colors):
            return Outcome(True, t, t)
        if t >= limit:
            return Outcome(False, None, t)
        n1, n2 = refine([g1, g2], [l1, l2], table)
        joint_before = len(set(l1.colors) | set(l2.colors))
        joint_after = len(set(n1.colors) | set(n2.colors))
        if joint_before == joint_after:
            return Outcome(False, None, t)
        l1, l2 = n1, n2
        t += 1
