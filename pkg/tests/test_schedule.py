"""Reservation patterns, schedule parameters, and single-packet broadcasts."""

import math

import pytest

from affbcast import (Graph, bfs_tree, broadcast_trace_csv, build_ranked_tree,
                      characteristics, generate, hop_network, radio_network,
                      reserved, run_single_broadcast, schedule_params,
                      select_tmin)


def bidir(edges):
    out = []
    for u, v in edges:
        out.append((u, v))
        out.append((v, u))
    return out


def prepared(net, root, mode="single_bfs"):
    tree, chars = select_tmin(net, root, mode=mode)
    ranked = build_ranked_tree(net, tree)
    return ranked, schedule_params(net, ranked, chars)


def test_params_formulas():
    net = hop_network(generate("bipartite", 8, 3), 2)
    ranked, params = prepared(net, 0)
    h = max(3, net.degradation_distance)
    k = params.layer_affectance
    top = params.max_rank
    d = ranked.tree.depth
    n = net.node_count
    assert params.spacing == h
    assert params.schedule_len == d + 2 * h * top * top + \
        math.ceil(32.0 * h * top * k * math.log(n))
    assert params.pipeline_gap == max(1, math.ceil(16.0 * h * k * math.log(n)))
    assert params.tree_depth == d


def test_slow_prob_regimes():
    # interference-free: certain transmission; heavy: 1/(4K)
    net = hop_network(Graph(3, bidir([(0, 1), (1, 2)])), 1)
    ranked, params = prepared(net, 0)
    assert params.layer_affectance == 0.0
    assert params.slow_prob == 1.0
    assert params.pipeline_gap == 1

    net2 = hop_network(generate("bipartite", 8, 3), 2)
    _, params2 = prepared(net2, 0)
    k2 = params2.layer_affectance
    assert k2 >= 0.25
    assert params2.slow_prob == pytest.approx(min(1.0, 1.0 / (4.0 * k2)))


def test_reserved_fast_pattern():
    # depth-1 fast node of rank 2 with R=2, h=3: slots t = 1 (mod 12)
    net, tree = None, None
    g = Graph(5, bidir([(0, 1), (0, 2), (1, 3), (2, 4), (2, 3), (1, 4)]))
    net = hop_network(g, 2)
    from affbcast import BfsTree
    tree = BfsTree(0, {1: 0, 2: 0, 3: 1, 4: 2}, [[0], [1, 2], [3, 4]])
    ranked = build_ranked_tree(net, tree)
    params = schedule_params(net, ranked, characteristics(net, tree))
    assert params.spacing == 3 and params.max_rank == 2
    # node 0: depth 0, rank 2, fast -> t = 0 + 2*3*(2-2) = 0 (mod 12)
    slots0 = [t for t in range(36) if reserved(0, t, params, ranked)]
    assert slots0 == [0, 12, 24]
    # node 2: depth 1, rank 1, fast -> t = 1 + 2*3*1 = 7 (mod 12)
    slots2 = [t for t in range(24) if reserved(2, t, params, ranked)]
    assert slots2 == [7, 19]
    # node 1: depth 1, slow -> t = 1 + 3 = 4 (mod 6)
    slots1 = [t for t in range(18) if reserved(1, t, params, ranked)]
    assert slots1 == [4, 10, 16]
    with pytest.raises(ValueError):
        reserved(0, -1, params, ranked)


def test_reservation_separation_sweep():
    """One full period: co-scheduled nodes are same-fast-set, or same-depth
    slow nodes (the randomized-contention pool), or spaced >= h in depth."""
    for seed in range(10):
        kind = ("overlap_trees", "bipartite")[seed % 2]
        net = hop_network(generate(kind, 16, seed), 2)
        ranked, params = prepared(net, seed % 16)
        tree = ranked.tree
        period = 2 * params.spacing * params.max_rank
        nodes = [v for v in tree.nodes() if not tree.is_leaf(v)]
        for t in range(period):
            active = [v for v in nodes if reserved(v, t, params, ranked)]
            for i, u in enumerate(active):
                for v in active[i + 1:]:
                    du, dv = tree.depth_of(u), tree.depth_of(v)
                    fu, fv = ranked.is_fast(u), ranked.is_fast(v)
                    same_set = fu and fv and \
                        (du, ranked.rank[u]) == (dv, ranked.rank[v])
                    contention_pool = not fu and not fv and du == dv
                    assert same_set or contention_pool or \
                        abs(du - dv) >= params.spacing, (seed, t, u, v)


def test_broadcast_path4():
    net = hop_network(Graph(4, bidir([(0, 1), (1, 2), (2, 3)])), 2)
    ranked, params = prepared(net, 0)
    res = run_single_broadcast(net, ranked, params, "pkt", seed=5,
                               slot_budget=10 * params.schedule_len)
    assert res.delivery == {0: 0, 1: 0, 2: 1, 3: 2}
    assert res.slots == 3
    assert not res.violation
    assert res.packet == "pkt"


def test_broadcast_k22():
    g = Graph(4, bidir([(0, 2), (0, 3), (1, 2), (1, 3)]))
    net = hop_network(g, 2)
    ranked, params = prepared(net, 0)
    res = run_single_broadcast(net, ranked, params, 0, seed=1,
                               slot_budget=params.schedule_len)
    assert res.delivery == {0: 0, 1: 1, 2: 0, 3: 0}
    assert res.slots == 2
    assert not res.violation


def test_broadcast_budget_checked():
    net = hop_network(Graph(2, bidir([(0, 1)])), 2)
    ranked, params = prepared(net, 0)
    with pytest.raises(ValueError):
        run_single_broadcast(net, ranked, params, 0, seed=1,
                             slot_budget=params.schedule_len - 1)


def test_broadcast_completes_on_seeded_instances():
    for seed in range(12):
        kind = ("overlap_trees", "random_connected", "bipartite")[seed % 3]
        n = 10 if kind == "bipartite" else 9
        net = hop_network(generate(kind, n, seed), 2)
        ranked, params = prepared(net, seed % n)
        res = run_single_broadcast(net, ranked, params, seed, seed=seed,
                                   slot_budget=10 * params.schedule_len)
        assert not res.violation, (kind, seed)
        assert set(res.delivery) == set(range(n))
        assert res.delivery[seed % n] == 0
        # children never beat their parents to the packet
        tree = ranked.tree
        for v, p in tree.parent.items():
            assert res.delivery[v] > res.delivery.get(p, -1) \
                if p != tree.root else res.delivery[v] >= 0


def test_broadcast_respects_reservations():
    # every recorded transmitter owns the slot it used
    net = radio_network(generate("path", 6, 0))
    ranked, params = prepared(net, 2)
    res = run_single_broadcast(net, ranked, params, 0, seed=9,
                               slot_budget=10 * params.schedule_len,
                               record_trace=True)
    assert res.trace is not None
    for slot, txs, hits in res.trace:
        for v in txs:
            assert reserved(v, slot, params, ranked)
        for c, u in hits:
            assert u in txs
    csv = broadcast_trace_csv(res)
    assert csv.startswith("slot,transmitters,receptions\n")
    plain = run_single_broadcast(net, ranked, params, 0, seed=9,
                                 slot_budget=10 * params.schedule_len)
    assert plain.trace is None
    with pytest.raises(ValueError):
        broadcast_trace_csv(plain)


def test_broadcast_deterministic():
    net = hop_network(generate("overlap_trees", 12, 4), 2)
    ranked, params = prepared(net, 3)
    a = run_single_broadcast(net, ranked, params, 0, seed=77,
                             slot_budget=10 * params.schedule_len)
    b = run_single_broadcast(net, ranked, params, 0, seed=77,
                             slot_budget=10 * params.schedule_len)
    assert a.delivery == b.delivery and a.slots == b.slots
    assert a.events == b.events
