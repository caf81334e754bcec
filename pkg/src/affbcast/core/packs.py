"""Array packing shared by the pure and compiled slot engines.

Both engines consume the same flat dicts of numpy arrays so that a run is
bit-identical regardless of backend: same RNG draw order, same float
summation order, same integer bookkeeping. Anything order-sensitive is
decided here once (links in canonical sorted order, children ascending,
sources ascending by node id).
"""

import numpy as np

MAXF = 256  # initial flight-pool capacity; engines grow it by doubling

EV_PASS = 0
EV_SILENT = 1
EV_DISCOVERY = 2
EV_BATCH_END = 3
EV_FAST_MISS = 4
EV_FAILED = 5
EV_LATE = 6
EV_BOUND = 7
EVENT_NAMES = (
    "pass", "silent", "discovery", "batch_end",
    "fast_miss", "packet_failed", "packet_late", "bound",
)

POLICY_IDS = {"uniform": 0, "next": 1, "current": 2, "unif_curr": 3}


def tree_arrays(net, ranked, params):
    """Flat per-node arrays for one source's tree and slot reservations.

    res/mod encode reserved(v, t) as t % mod[v] == res[v]; children are
    stored CSR-style ascending; incol[c] is the column of the tree link
    into c (-1 at the root).
    """
    tree = ranked.tree
    n = net.node_count
    incol = np.full(n, -1, dtype=np.int32)
    child_ptr = np.zeros(n + 1, dtype=np.int32)
    child_dat = np.zeros(max(n - 1, 1), dtype=np.int32)
    res = np.zeros(n, dtype=np.int64)
    mod = np.ones(n, dtype=np.int64)
    fast = np.zeros(n, dtype=np.int8)
    h = params.spacing
    top = params.max_rank
    pos = 0
    for v in range(n):
        child_ptr[v] = pos
        for c in tree.children(v):
            child_dat[pos] = c
            pos += 1
        d = tree.depth_of(v)
        if ranked.is_fast(v):
            fast[v] = 1
            period = 2 * h * top
            res[v] = (d + 2 * h * (top - ranked.rank[v])) % period
            mod[v] = period
        else:
            res[v] = (d + h) % (2 * h)
            mod[v] = 2 * h
    child_ptr[n] = pos
    for c, p in tree.parent.items():
        incol[c] = net.link_index[(p, c)]
    return {
        "incol": incol, "child_ptr": child_ptr, "child_dat": child_dat,
        "res": res, "mod": mod, "fast": fast,
    }


def build_broadcast_pack(net, ranked, params):
    """Engine input for a single-source, single-packet broadcast."""
    arrays = tree_arrays(net, ranked, params)
    arrays.update(
        n=net.node_count,
        A=np.ascontiguousarray(net.affectance),
        root=ranked.tree.root,
        slow_prob=float(params.slow_prob),
        sched_len=int(params.schedule_len),
    )
    return arrays


def build_world(net, ranked_list, params_list, src_nodes, queue0,
                rate, policy, total_slots, inj_seed, cont_seed):
    """Engine input for a full token-circulation run.

    Source order is ascending node id; per-source arrays are stacked on
    axis 0 in that order. delta/gap are the global maxima over sources.
    """
    n = net.node_count
    count = len(src_nodes)
    if count == 0:
        raise ValueError("need at least one source")
    if list(src_nodes) != sorted(src_nodes):
        raise ValueError("sources must be sorted by node id")
    incol = np.zeros((count, n), dtype=np.int32)
    child_ptr = np.zeros((count, n + 1), dtype=np.int32)
    child_dat = np.zeros((count, max(n - 1, 1)), dtype=np.int32)
    res = np.zeros((count, n), dtype=np.int64)
    mod = np.ones((count, n), dtype=np.int64)
    fast = np.zeros((count, n), dtype=np.int8)
    slow_prob = np.zeros(count, dtype=np.float64)
    sched_len = np.zeros(count, dtype=np.int64)
    for i, (ranked, params) in enumerate(zip(ranked_list, params_list)):
        if ranked.tree.root != src_nodes[i]:
            raise ValueError(f"tree {i} rooted at {ranked.tree.root}, "
                             f"expected source {src_nodes[i]}")
        arrays = tree_arrays(net, ranked, params)
        incol[i] = arrays["incol"]
        child_ptr[i] = arrays["child_ptr"]
        child_dat[i] = arrays["child_dat"]
        res[i] = arrays["res"]
        mod[i] = arrays["mod"]
        fast[i] = arrays["fast"]
        slow_prob[i] = params.slow_prob
        sched_len[i] = params.schedule_len
    if policy not in POLICY_IDS.values():
        raise ValueError(f"unknown policy id {policy}")
    queue0 = np.asarray(queue0, dtype=np.int64)
    if queue0.shape != (count,) or (queue0 < 0).any():
        raise ValueError("queue0 must hold one non-negative count per source")
    return {
        "n": n,
        "m": len(net.link_ids),
        "S": count,
        "A": np.ascontiguousarray(net.affectance),
        "src": np.asarray(src_nodes, dtype=np.int32),
        "incol": incol, "child_ptr": child_ptr, "child_dat": child_dat,
        "res": res, "mod": mod, "fast": fast,
        "slow_prob": slow_prob, "sched_len": sched_len,
        "queue0": queue0,
        "delta": int(max(sched_len)),
        "gap": int(max(int(p.pipeline_gap) for p in params_list)),
        "rate": float(rate),
        "policy": int(policy),
        "total_slots": int(total_slots),
        "inj_seed": int(inj_seed),
        "cont_seed": int(cont_seed),
    }
