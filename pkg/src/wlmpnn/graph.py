"""Simple undirected node-labeled graphs, random generators and edge-list I/O."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class IngestionError(ValueError):
    """Raised when a graph file cannot be parsed; carries the offending line."""

    def __init__(self, path, lineno: int, message: str):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


def _normalize_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on nodes ``0..n-1``.

    ``labels`` is ``None`` for unlabeled graphs; otherwise one non-negative
    label id per node.
    """

    n: int
    edges: frozenset = frozenset()
    labels: tuple[int, ...] | None = None
    _adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"node count must be non-negative, got {self.n}")
        norm = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {e} has an endpoint outside 0..{self.n - 1}")
            norm.add(_normalize_edge(u, v))
        object.__setattr__(self, "edges", frozenset(norm))
        if self.labels is not None:
            labels = tuple(int(x) for x in self.labels)
            if len(labels) != self.n:
                raise ValueError("labels must have one entry per node")
            if any(x < 0 for x in labels):
                raise ValueError("label ids must be non-negative")
            object.__setattr__(self, "labels", labels)
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], labels=None) -> "Graph":
        edge_list = [(int(u), int(v)) for u, v in edges]
        seen = set()
        for u, v in edge_list:
            e = _normalize_edge(u, v)
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
        return cls(n, frozenset(edge_list), labels)

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Sorted neighbor lists, indexed by node."""
        return self._adj

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def initial_colors(self) -> tuple[int, ...]:
        return self.labels if self.labels is not None else (0,) * self.n

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            a[u, v] = a[v, u] = True
        return a

    def permute(self, perm: Sequence[int]) -> "Graph":
        """Relabel nodes: old node ``v`` becomes ``perm[v]``."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm must be a permutation of 0..n-1")
        edges = frozenset((perm[u], perm[v]) for u, v in self.edges)
        labels = None
        if self.labels is not None:
            new = [0] * self.n
            for v, lab in enumerate(self.labels):
                new[perm[v]] = lab
            labels = tuple(new)
        return Graph(self.n, edges, labels)


def neighbors(g: Graph, v: int) -> set[int]:
    if not 0 <= v < g.n:
        raise IndexError(f"node {v} out of range for graph with {g.n} nodes")
    return set(g.adjacency[v])


def validate(g: Graph) -> None:
    """Re-check the structural invariants; raises AssertionError on violation."""
    for u, v in g.edges:
        assert u != v, "self-loop"
        assert 0 <= u < g.n and 0 <= v < g.n, "endpoint out of range"
        assert u < v, "edge not normalized"
    for v, nbrs in enumerate(g.adjacency):
        for u in nbrs:
            assert v in g.adjacency[u], "asymmetric adjacency"
    if g.labels is not None:
        assert len(g.labels) == g.n


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    shift = g1.n
    edges = set(g1.edges) | {(u + shift, v + shift) for u, v in g2.edges}
    labels = None
    if g1.labels is not None or g2.labels is not None:
        labels = g1.initial_colors() + g2.initial_colors()
    return Graph(g1.n + g2.n, frozenset(edges), labels)


# --- named graphs ---------------------------------------------------------

def empty_graph(n: int) -> Graph:
    return Graph(n)


def complete_graph(n: int) -> Graph:
    return Graph(n, frozenset((u, v) for u in range(n) for v in range(u + 1, n)))


def path_graph(n: int) -> Graph:
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a simple cycle needs at least 3 nodes")
    return Graph(n, frozenset(_normalize_edge(i, (i + 1) % n) for i in range(n)))


def star_graph(leaves: int) -> Graph:
    return Graph(leaves + 1, frozenset((0, i) for i in range(1, leaves + 1)))


# --- random generators ----------------------------------------------------

def make_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox stream; bit-identical across platforms for a seed."""
    return np.random.Generator(np.random.Philox(seed))


def generate_erdos_renyi(n: int, p: float, seed: int) -> Graph:
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    rng = make_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    # one uniform per pair, in row-major upper-triangle order
    keep = rng.random(iu.size) < p
    return Graph(n, frozenset(zip(iu[keep].tolist(), ju[keep].tolist())))


def generate_barabasi_albert(n: int, m: int, seed: int) -> Graph:
    """Preferential attachment grown from a star on ``m + 1`` nodes.

    Each new node picks ``m`` distinct targets, drawn one at a time with
    probability proportional to current degree (without replacement).
    """
    if not 1 <= m < n:
        raise ValueError(f"need 1 <= m < n, got m={m}, n={n}")
    rng = make_rng(seed)
    edges = {(0, i) for i in range(1, m + 1)}
    # endpoint multiset: node v appears deg(v) times
    endpoints = []
    for u, v in edges:
        endpoints += [u, v]
    for new in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            cand = endpoints[int(rng.integers(len(endpoints)))]
            targets.add(cand)
        for t in sorted(targets):
            edges.add((t, new))
            endpoints += [t, new]
    return Graph(n, frozenset(edges))


# --- file I/O ---------------------------------------------------------------

def load_edge_list(path, labels_path=None) -> Graph:
    """Read ``u v`` lines ('#' comments, optional leading ``n=<count>``)."""
    n_header = None
    edges: list[tuple[int, int]] = []
    seen: dict[tuple[int, int], int] = {}
    max_id = -1
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("n="):
                if edges or n_header is not None:
                    raise IngestionError(path, lineno, "'n=' header must precede all edges")
                try:
                    n_header = int(line[2:])
                except ValueError:
                    raise IngestionError(path, lineno, f"bad node count {line!r}") from None
                continue
            parts = line.split()
            if len(parts) != 2:
                raise IngestionError(path, lineno, f"expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise IngestionError(path, lineno, f"non-integer node id in {line!r}") from None
            if u < 0 or v < 0:
                raise IngestionError(path, lineno, "negative node id")
            if u == v:
                raise IngestionError(path, lineno, f"self-loop at node {u}")
            e = _normalize_edge(u, v)
            if e in seen:
                raise IngestionError(path, lineno, f"duplicate edge {e} (first at line {seen[e]})")
            seen[e] = lineno
            edges.append(e)
            max_id = max(max_id, u, v)
    n = max_id + 1 if n_header is None else n_header
    if max_id >= n:
        raise IngestionError(path, 1, f"node id {max_id} exceeds declared n={n}")
    labels = None
    if labels_path is not None:
        labels = _load_labels(labels_path, n)
    return Graph(n, frozenset(edges), labels)


def _load_labels(path, n: int) -> tuple[int, ...]:
    labels: list[int | None] = [None] * n
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise IngestionError(path, lineno, f"expected 'node label', got {line!r}")
            try:
                v, lab = int(parts[0]), int(parts[1])
            except ValueError:
                raise IngestionError(path, lineno, f"non-integer entry in {line!r}") from None
            if not 0 <= v < n:
                raise IngestionError(path, lineno, f"node {v} out of range")
            if lab < 0:
                raise IngestionError(path, lineno, "label ids must be non-negative")
            if labels[v] is not None:
                raise IngestionError(path, lineno, f"node {v} labeled twice")
            labels[v] = lab
    missing = [v for v, lab in enumerate(labels) if lab is None]
    if missing:
        raise IngestionError(path, 0, f"{len(missing)} nodes without a label, e.g. {missing[0]}")
    return tuple(labels)  # type: ignore[arg-type]


def write_edge_list(g: Graph, path, labels_path=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"n={g.n}\n")
        for u, v in g.sorted_edges():
            fh.write(f"{u} {v}\n")
    if labels_path is not None and g.labels is not None:
        with open(labels_path, "w", encoding="utf-8") as fh:
            for v, lab in enumerate(g.labels):
                fh.write(f"{v} {lab}\n")


def load_cora(path) -> Graph:
    """Topology of the CORA citation graph, symmetrized, features dropped.

    ``path`` is either a ``cora.cites`` file (``cited citing`` publication ids per
    line) or a directory containing one. Publication ids are mapped to ``0..n-1``
    in ascending numeric order; if a ``cora.content`` file sits next to the
    cites file, its publications define the node set (isolated publications included).
    Reciprocal and repeated citations collapse to one undirected edge.
    """
    path = os.fspath(path)
    cites = os.path.join(path, "cora.cites") if os.path.isdir(path) else path
    content = os.path.join(os.path.dirname(cites), "cora.content")
    pairs: list[tuple[str, str]] = []
    with open(cites, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            parts = raw.split()
            if not parts:
                continue
            if len(parts) != 2:
                raise IngestionError(cites, lineno, f"expected 'cited citing', got {raw.strip()!r}")
            pairs.append((parts[0], parts[1]))
    ids: set[str] = {x for p in pairs for x in p}
    if os.path.exists(content):
        with open(content, encoding="utf-8") as fh:
            ids |= {line.split(None, 1)[0] for line in fh if line.strip()}
    order = sorted(ids, key=lambda s: (0, int(s)) if s.isdigit() else (1, s))
    index = {pid: i for i, pid in enumerate(order)}
    edges = {_normalize_edge(index[a], index[b]) for a, b in pairs if a != b}
    return Graph(len(order), frozenset(edges))
