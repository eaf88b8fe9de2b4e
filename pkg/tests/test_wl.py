import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_partition_sizes, naive_wl_multisets, naive_wl_verdict
from wlmpnn.graph import (
    Graph,
    complete_graph,
    cycle_graph,
    disjoint_union,
    generate_erdos_renyi,
    path_graph,
    star_graph,
)
from wlmpnn.wl import (
    ColorTable,
    Labeling,
    Partition,
    initial_labeling,
    partitions_equivalent,
    wl_distinguish,
    wl_run,
    wl_step,
)


def _zero(n):
    return Labeling((0,) * n, 0)


def test_step_examples():
    assert wl_step(complete_graph(3), _zero(3)).num_classes() == 1
    p3 = wl_step(path_graph(3), _zero(3)).colors
    assert p3[0] == p3[2] != p3[1]
    star = wl_step(star_graph(3), _zero(4))
    assert star.partition().blocks == ((0,), (1, 2, 3))


def test_step_ids_follow_key_order():
    # keys (0,(0,)) < (0,(0,0)): endpoints get 0, middle 1
    assert wl_step(path_graph(3), _zero(3)).colors == (0, 1, 0)


def test_run_examples():
    assert wl_run(complete_graph(6)).convergence_round == 0
    tr = wl_run(path_graph(4))
    assert tr.convergence_round == 1
    assert tr.final.partition().blocks == ((0, 3), (1, 2))


@pytest.mark.parametrize("n", range(1, 13))
def test_path_classes(n):
    tr = wl_run(path_graph(n))
    assert tr.num_classes() == math.ceil(n / 2)
    assert tr.num_classes() == naive_partition_sizes(path_graph(n), n)[-1]


def test_distinguish_examples():
    out = wl_distinguish(complete_graph(3), path_graph(3))
    assert out.distinguished and out.round == 1
    assert not wl_distinguish(cycle_graph(6), disjoint_union(complete_graph(3), complete_graph(3)))
    g = generate_erdos_renyi(15, 0.3, 2)
    assert not wl_distinguish(g, g)


def test_distinguish_needs_joint_stability():
    # each side is stable at round 0 on its own, yet round 1 separates them
    k33 = Graph.from_edges(6, [(i, j) for i in range(3) for j in range(3, 6)])
    out = wl_distinguish(k33, cycle_graph(6))
    assert out.distinguished and out.round == 1


def test_distinguish_sizes_differ():
    assert wl_distinguish(path_graph(2), path_graph(3)).round == 0


def test_partitions_equivalent_examples():
    assert partitions_equivalent((0, 0, 1), (5, 5, 9))
    assert not partitions_equivalent((0, 0, 1), (0, 1, 1))
    lab = wl_run(path_graph(5)).final
    assert partitions_equivalent(lab, lab)
    with pytest.raises(ValueError):
        partitions_equivalent((0, 1), (0, 1, 2))


def test_labeled_initial_colors():
    g = Graph(3, frozenset({(0, 1), (1, 2)}), (7, 7, 3))
    assert initial_labeling(g).colors == (7, 7, 3)
    assert wl_run(g).final.num_classes() == 3


graphs = st.builds(
    lambda n, p, seed: generate_erdos_renyi(n, p, seed),
    st.integers(1, 14), st.floats(0.0, 1.0), st.integers(0, 2**32 - 1),
)


def _extra_rounds(g, lab, table, rounds):
    out = [lab]
    for _ in range(rounds):
        out.append(wl_step(g, out[-1], table))
    return out


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_monotone_and_absorbing(g):
    tr = wl_run(g)
    parts = [lab.partition() for lab in tr.labelings]
    for a, b in zip(parts, parts[1:]):
        assert b.refines(a) and len(b) > len(a)
    table = ColorTable()
    # replay with a fresh table to probe three rounds past convergence
    lab = initial_labeling(g, table)
    for _ in range(tr.convergence_round):
        lab = wl_step(g, lab, table)
    for nxt in _extra_rounds(g, lab, table, 3):
        assert nxt.partition() == parts[-1]


@settings(max_examples=60, deadline=None)
@given(graphs, st.randoms(use_true_random=False))
def test_permutation_invariance(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    h = g.permute(perm)
    a, b = wl_run(g), wl_run(h)
    assert a.convergence_round == b.convergence_round
    for la, lb in zip(a.labelings, b.labelings):
        assert sorted(la.colors) == sorted(lb.colors)
    assert not wl_distinguish(g, h)


@settings(max_examples=40, deadline=None)
@given(graphs)
def test_union_coherence(g):
    gg = disjoint_union(g, g)
    table = ColorTable()
    a, b = initial_labeling(g, table), initial_labeling(gg, table)
    for _ in range(g.n + 1):
        assert b.colors[:g.n] == a.colors == b.colors[g.n:]
        a, b = wl_step(g, a, table), wl_step(gg, b, table)


@settings(max_examples=60, deadline=None)
@given(graphs, graphs)
def test_distinguish_matches_naive(g1, g2):
    out = wl_distinguish(g1, g2)
    verdict, rnd = naive_wl_verdict(g1, g2)
    assert (out.distinguished, out.round) == (verdict, rnd)


@settings(max_examples=40, deadline=None)
@given(graphs)
def test_class_counts_match_naive(g):
    tr = wl_run(g)
    sizes = naive_partition_sizes(g, len(tr.labelings) - 1)
    assert [lab.num_classes() for lab in tr.labelings] == sizes


def test_partition_blocks_cover_nodes():
    p = Partition.from_colors([3, 1, 3, 2])
    flat = sorted(v for b in p.blocks for v in b)
    assert flat == [0, 1, 2, 3] and all(p.blocks)


def test_multiset_oracle_agrees_on_regular_pair():
    c6 = cycle_graph(6)
    k3k3 = disjoint_union(complete_graph(3), complete_graph(3))
    assert naive_wl_multisets(c6, 3) == naive_wl_multisets(k3k3, 3)
