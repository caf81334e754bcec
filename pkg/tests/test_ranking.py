"""Rank assignment: hand-checked demotions plus structural invariants."""

import math

from affbcast import (BfsTree, Graph, bfs_tree, build_ranked_tree, generate,
                      hop_network, max_path_affectance, rank_table)


def bidir(edges):
    out = []
    for u, v in edges:
        out.append((u, v))
        out.append((v, u))
    return out


def hand_case():
    """Five nodes where the cross links 2-3 and 1-4 jam the sibling layer.

    Tree (parents fixed by hand):  0 -> {1, 2}, 1 -> 3, 2 -> 4.
    Under the hop matrix with alpha=2, node 2 sits one hop from 3, so the
    initial class {1, 2} puts affectance 1 on link (1, 3): node 1 is demoted
    first (ascending id), after which 2 alone is clean and stays fast.
    """
    g = Graph(5, bidir([(0, 1), (0, 2), (1, 3), (2, 4), (2, 3), (1, 4)]))
    net = hop_network(g, 2)
    tree = BfsTree(0, {1: 0, 2: 0, 3: 1, 4: 2}, [[0], [1, 2], [3, 4]])
    return net, tree


def test_hand_case_demotion_and_pullup():
    net, tree = hand_case()
    ranked = build_ranked_tree(net, tree)
    assert ranked.rank == {0: 2, 1: 2, 2: 1, 3: 1, 4: 1}
    assert ranked.demoted == frozenset({1})
    assert ranked.max_rank == 2
    assert ranked.is_fast(2)
    assert not ranked.is_fast(1)
    assert ranked.is_fast(0)
    assert ranked.fast_sets == {(1, 1): frozenset({2}), (0, 2): frozenset({0})}


def test_hand_case_eviction_reread():
    # the order matters: had node 2 been checked against the full class it
    # would have been demoted by 1's affectance on (2, 4); the re-read after
    # 1's eviction is what keeps 2 fast
    net, tree = hand_case()
    a = net.affectance
    assert a[1, net.link_index[(2, 4)]] == 1.0
    ranked = build_ranked_tree(net, tree)
    assert 2 not in ranked.demoted


def test_interference_free_tree_all_rank_one():
    g = Graph(4, bidir([(0, 1), (1, 2), (2, 3)]))
    net = hop_network(g, 1)   # alpha=1: nobody affects anybody
    ranked = build_ranked_tree(net, bfs_tree(g, 0))
    assert set(ranked.rank.values()) == {1}
    assert ranked.max_rank == 1
    assert ranked.demoted == frozenset()


def seeded_instances():
    for seed in range(40):
        kind = ("overlap_trees", "bipartite", "random_connected", "path")[seed % 4]
        n = (8, 10, 12, 16)[seed % 4]
        net = hop_network(generate(kind, n, seed), 2 + seed % 3)
        tree = bfs_tree(net.graph, seed % n)
        yield net, tree, build_ranked_tree(net, tree)


def test_rank_invariants():
    for net, tree, ranked in seeded_instances():
        for v in tree.nodes():
            assert ranked.rank[v] >= 1
            if tree.is_leaf(v):
                assert ranked.rank[v] == 1
            elif v not in ranked.demoted:
                # never-demoted nodes sit at or above every child
                rmax = max(ranked.rank[c] for c in tree.children(v))
                assert ranked.rank[v] >= rmax
        assert ranked.max_rank == max(ranked.rank.values())


def test_fast_sets_are_consistent_and_certified():
    for net, tree, ranked in seeded_instances():
        a = net.affectance
        for (d, r), members in ranked.fast_sets.items():
            for v in members:
                assert tree.depth_of(v) == d
                assert ranked.rank[v] == r
                assert not tree.is_leaf(v)
                assert v not in ranked.demoted
            # certification: the class never jams its own links
            for v in members:
                for c in tree.children(v):
                    col = net.link_index[(v, c)]
                    total = sum(a[w, col] for w in members if w != v)
                    assert total < 1.0


def test_demoted_nodes_are_slow():
    for net, tree, ranked in seeded_instances():
        for v in ranked.demoted:
            assert not ranked.is_fast(v)
            assert not tree.is_leaf(v)


def test_rank_bounded_by_path_affectance():
    # the headline bound R <= floor(M) + 1 on a moderate seeded sample
    for net, tree, ranked in seeded_instances():
        m = max_path_affectance(net, tree)
        assert ranked.max_rank <= math.floor(m) + 1


def test_rank_table_format():
    net, tree = hand_case()
    ranked = build_ranked_tree(net, tree)
    text = rank_table(ranked)
    lines = text.strip().split("\n")
    assert lines[0] == "node,depth,rank,class"
    assert "1,1,2,slow" in lines
    assert "2,1,1,fast" in lines
    assert len(lines) == 6
