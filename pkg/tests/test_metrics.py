"""Layer/path affectance characteristics against hand values and oracles."""

import math
from itertools import combinations

import pytest

from affbcast import (EXACT_SUBSET_CAP, BfsTree, Graph, bfs_tree,
                      characteristics, generate, hop_network,
                      max_avg_layer_affectance, max_path_affectance,
                      select_tmin)


def bidir(edges):
    out = []
    for u, v in edges:
        out.append((u, v))
        out.append((v, u))
    return out


def k22_net():
    g = Graph(4, bidir([(0, 2), (0, 3), (1, 2), (1, 3)]))
    return hop_network(g, 2)


def oracle_layer_affectance(net, tree):
    """Definition-level restatement: try every subset of every layer as the
    transmitting group and average its affectance over the group's own tree
    links. Leaves inside a subset add interference but no links."""
    a = net.affectance
    best = 0.0
    for layer in tree.layers:
        members = sorted(layer)
        for k in range(1, len(members) + 1):
            for group in combinations(members, k):
                cols = [net.link_index[(u, c)]
                        for u in group for c in tree.children(u)]
                if not cols:
                    continue
                total = sum(a[w, col] for col in cols for w in group)
                best = max(best, total / len(cols))
    return best


def oracle_path_affectance(net, tree):
    """Walk every root-to-leaf path explicitly; each link is weighted by the
    whole sending layer's affectance on it."""
    a = net.affectance

    def weight(u, c):
        col = net.link_index[(u, c)]
        return sum(a[w, col] for w in tree.layers[tree.depth_of(u)])

    best = 0.0
    stack = [(tree.root, 0.0)]
    while stack:
        v, acc = stack.pop()
        kids = tree.children(v)
        if not kids:
            best = max(best, acc)
        for c in kids:
            stack.append((c, acc + weight(v, c)))
    return best


def test_k22_hand_values():
    net = k22_net()
    tree = bfs_tree(net.graph, 0)
    assert max_avg_layer_affectance(net, tree, mode="exact") == 1.0
    assert max_path_affectance(net, tree) == 1.0
    ch = characteristics(net, tree)
    assert ch.layer_affectance == 1.0
    assert ch.path_affectance == 1.0
    assert ch.objective == pytest.approx(1.0 * (1.0 / 2.0 + 1.0))


def test_layer_heuristic_lower_bounds_exact():
    for seed in range(20):
        net = hop_network(generate("random_connected", 8, seed), 2)
        tree = bfs_tree(net.graph, seed % 8)
        exact = max_avg_layer_affectance(net, tree, mode="exact")
        heur = max_avg_layer_affectance(net, tree, mode="layer_heuristic")
        assert heur <= exact + 1e-12
    with pytest.raises(ValueError):
        max_avg_layer_affectance(net, tree, mode="bogus")


def test_exact_mode_caps_subset_enumeration():
    # a hub with EXACT_SUBSET_CAP+1 spokes, each carrying a private leaf,
    # puts too many non-leaves into layer 1 for subset enumeration
    spokes = EXACT_SUBSET_CAP + 1
    edges = [(0, i) for i in range(1, spokes + 1)]
    edges += [(i, spokes + i) for i in range(1, spokes + 1)]
    g = Graph(2 * spokes + 1, bidir(edges))
    net = hop_network(g, 1)
    tree = bfs_tree(g, 0)
    with pytest.raises(ValueError, match="layer_heuristic"):
        max_avg_layer_affectance(net, tree, mode="exact")
    assert max_avg_layer_affectance(net, tree, mode="layer_heuristic") >= 0.0


def test_exact_layer_affectance_matches_oracle():
    for seed in range(25):
        kind = ("random_connected", "overlap_trees", "path")[seed % 3]
        net = hop_network(generate(kind, 7, seed), 2 + seed % 3)
        tree = bfs_tree(net.graph, seed % 7)
        assert max_avg_layer_affectance(net, tree, mode="exact") == \
            oracle_layer_affectance(net, tree)


def test_path_affectance_matches_oracle():
    for seed in range(25):
        kind = ("random_connected", "overlap_trees", "bipartite")[seed % 3]
        n = 8 if kind == "bipartite" else 9
        net = hop_network(generate(kind, n, seed), 2 + seed % 3)
        tree = bfs_tree(net.graph, seed % n)
        assert max_path_affectance(net, tree) == oracle_path_affectance(net, tree)


def test_path_affectance_k22_by_hand():
    # path 0->2->1: layer {2,3} puts affectance 1 on (2,1); link (0,2) clean
    net = k22_net()
    tree = bfs_tree(net.graph, 0)
    assert oracle_path_affectance(net, tree) == 1.0


def test_select_tmin_single_bfs():
    net = k22_net()
    tree, ch = select_tmin(net, 0)
    assert tree == bfs_tree(net.graph, 0)
    assert ch.layer_affectance == \
        max_avg_layer_affectance(net, tree, mode="layer_heuristic")


def test_select_tmin_exhaustive_minimizes():
    for seed in range(10):
        net = hop_network(generate("random_connected", 7, seed), 2)
        tree, ch = select_tmin(net, 0, mode="exhaustive")
        from affbcast import enumerate_bfs_trees
        enum = enumerate_bfs_trees(net.graph, 0)
        scores = [characteristics(net, t).objective for t in enum.trees]
        assert ch.objective == min(scores)
        # ties broken by enumeration order: first minimizer wins
        first = scores.index(min(scores))
        assert tree == enum.trees[first]
    with pytest.raises(ValueError):
        select_tmin(net, 0, mode="sideways")


def test_select_tmin_exhaustive_refuses_truncation():
    g = generate("bipartite", 10, 0)
    net = hop_network(g, 2)
    with pytest.raises(ValueError, match="single_bfs"):
        select_tmin(net, 0, mode="exhaustive", cap=3)


def test_objective_formula():
    net = hop_network(generate("overlap_trees", 16, 3), 2)
    tree, ch = select_tmin(net, 5)
    k, m = ch.layer_affectance, ch.path_affectance
    assert ch.objective == pytest.approx(m * (m / math.log2(16) + k))
