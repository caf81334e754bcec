"""Reference slot engine in plain Python.

The compiled engine mirrors this file statement for statement; any change
here must be made there too. Determinism contract: injection draws use one
stream, contention draws another; contention is resolved in ascending node
id with at most one draw per node per slot; affectance sums iterate the
slot's transmitter list ascending so float accumulation order is fixed.

Live broadcasts are tracked in per-(source, node) FIFOs instead of a global
scan: a node serves the oldest packet it holds, and same-source packets
reach any given node in launch order (a parent finishes serving packet i to
every child before it ever transmits packet i+1), so the queue front is
always the one eligible transmission. Slot cost is then independent of the
backlog size, which grows without bound whenever the pipeline separation is
tighter than a node's reservation cycle.
"""

from collections import deque

import numpy as np

from ..rng import SplitMix64
from .packs import (
    EV_PASS, EV_SILENT, EV_DISCOVERY, EV_BATCH_END,
    EV_FAST_MISS, EV_FAILED, EV_LATE, EV_BOUND,
)

BACKEND = "pure"


class _Flight:
    __slots__ = ("src", "packet", "launch", "holder", "ready", "spent",
                 "unreach", "unserved", "held", "lost", "retired")

    def __init__(self, src, packet, launch, root, n, counts):
        self.src = src
        self.packet = packet
        self.launch = launch
        self.holder = [0] * n
        self.holder[root] = 1
        self.ready = [0] * n
        self.ready[root] = launch
        self.spent = [0] * n
        self.unreach = [0] * n
        self.unserved = list(counts)
        self.held = 1
        self.lost = 0
        self.retired = False


def _as_lists(world):
    g = {}
    g["A"] = [[float(x) for x in row] for row in world["A"]]
    for key in ("incol", "child_ptr", "child_dat", "res", "mod", "fast"):
        g[key] = [[int(x) for x in row] for row in world[key]]
    g["slow_prob"] = [float(x) for x in world["slow_prob"]]
    g["sched_len"] = [int(x) for x in world["sched_len"]]
    return g


def _radio_slot(t, fifos, A, incol, child_ptr, child_dat, res, mod, fast,
                slow_prob, n, count, cont):
    """One slot of the physical layer, shared by both entry points.

    Returns (tx_nodes, tx_fl, recv_fl, recv_sender); receptions are not
    applied here. Queue fronts that are done at a node (served out, or fast
    and already spent, or retired) are popped lazily before candidacy.
    """
    cand = [None] * n
    for v in range(n):
        best = None
        for s in range(count):
            q = fifos[s][v]
            while q:
                fl = q[0]
                if fl.retired or fl.unserved[v] == 0 or \
                        (fast[s][v] and fl.spent[v]):
                    q.popleft()
                    continue
                break
            if not q or t % mod[s][v] != res[s][v]:
                continue
            fl = q[0]
            if t >= fl.ready[v] and (best is None or fl.packet < best.packet):
                best = fl
        cand[v] = best

    tx_nodes = []
    tx_fl = [None] * n
    for v in range(n):
        fl = cand[v]
        if fl is None:
            continue
        if fast[fl.src][v]:
            go = True
        else:
            go = cont.random() < slow_prob[fl.src]
        if go:
            tx_nodes.append(v)
            tx_fl[v] = fl

    recv_fl = [None] * n
    recv_sender = [-1] * n
    for v in tx_nodes:
        fl = tx_fl[v]
        s = fl.src
        for idx in range(child_ptr[s][v], child_ptr[s][v + 1]):
            c = child_dat[s][idx]
            if fl.holder[c] or fl.unreach[c] or tx_fl[c] is not None:
                continue
            col = incol[s][c]
            total = 0.0
            for u in tx_nodes:
                if u != v:
                    total += A[u][col]
            if total < 1.0:
                if recv_sender[c] < 0 or v < recv_sender[c]:
                    recv_sender[c] = v
                    recv_fl[c] = fl
    return tx_nodes, tx_fl, recv_fl, recv_sender


def _apply_receptions(t, recv_fl, recv_sender, fifos, child_ptr, n, changed):
    for c in range(n):
        fl = recv_fl[c]
        if fl is None:
            continue
        fl.holder[c] = 1
        fl.held += 1
        fl.ready[c] = t + 1
        fl.unserved[recv_sender[c]] -= 1
        if child_ptr[fl.src][c + 1] > child_ptr[fl.src][c]:
            fifos[fl.src][c].append(fl)
        changed.append(fl)


def _fast_postcheck(t, tx_nodes, tx_fl, child_ptr, child_dat, fast, events,
                    broadcast_payload, changed):
    for v in tx_nodes:
        fl = tx_fl[v]
        s = fl.src
        if not fast[s][v]:
            continue
        fl.spent[v] = 1
        for idx in range(child_ptr[s][v], child_ptr[s][v + 1]):
            c = child_dat[s][idx]
            if fl.holder[c] or fl.unreach[c]:
                continue
            events.append((t, EV_FAST_MISS, v,
                           c if broadcast_payload else fl.packet))
            stack = [c]
            while stack:
                x = stack.pop()
                if fl.unreach[x]:
                    continue
                fl.unreach[x] = 1
                fl.lost += 1
                for j in range(child_ptr[s][x], child_ptr[s][x + 1]):
                    stack.append(child_dat[s][j])
            changed.append(fl)


def run_broadcast(pack, seed, budget, record_trace=False):
    """Single packet from one root under its reservation schedule."""
    n = pack["n"]
    A = [[float(x) for x in row] for row in pack["A"]]
    incol = [[int(x) for x in pack["incol"]]]
    child_ptr = [[int(x) for x in pack["child_ptr"]]]
    child_dat = [[int(x) for x in pack["child_dat"]]]
    res = [[int(x) for x in pack["res"]]]
    mod = [[int(x) for x in pack["mod"]]]
    fast = [[int(x) for x in pack["fast"]]]
    slow_prob = [float(pack["slow_prob"])]
    root = pack["root"]
    cont = SplitMix64(seed)
    counts = [child_ptr[0][v + 1] - child_ptr[0][v] for v in range(n)]
    fl = _Flight(0, 0, 0, root, n, counts)
    fifos = [[deque() for _ in range(n)]]
    if counts[root] > 0:
        fifos[0][root].append(fl)
    delivery = [-1] * n
    delivery[root] = 0
    events = []
    trace = [] if record_trace else None
    changed = []
    last = 0
    for t in range(budget):
        tx_nodes, tx_fl, recv_fl, recv_sender = _radio_slot(
            t, fifos, A, incol, child_ptr, child_dat, res, mod, fast,
            slow_prob, n, 1, cont)
        _apply_receptions(t, recv_fl, recv_sender, fifos, child_ptr, n,
                          changed)
        for c in range(n):
            if recv_fl[c] is not None:
                delivery[c] = t
        _fast_postcheck(t, tx_nodes, tx_fl, child_ptr, child_dat, fast,
                        events, True, changed)
        if record_trace and tx_nodes:
            hits = tuple((c, recv_sender[c]) for c in range(n)
                         if recv_fl[c] is not None)
            trace.append((t, tuple(tx_nodes), hits))
        changed.clear()
        last = t
        if fl.held + fl.lost == n:
            break
    return {
        "delivery": delivery,
        "violation": fl.held < n,
        "slots": last + 1,
        "events": events,
        "trace": trace,
    }


def run_mmb(world):
    """Full token-circulation run over total_slots; see protocol docs."""
    n = world["n"]
    count = world["S"]
    total = world["total_slots"]
    delta = world["delta"]
    gap = world["gap"]
    rate = world["rate"]
    policy = world["policy"]
    g = _as_lists(world)
    A = g["A"]
    incol = g["incol"]
    child_ptr = g["child_ptr"]
    child_dat = g["child_dat"]
    res = g["res"]
    mod = g["mod"]
    fast = g["fast"]
    slow_prob = g["slow_prob"]
    sched_len = g["sched_len"]
    src = [int(x) for x in world["src"]]
    counts = [[child_ptr[s][v + 1] - child_ptr[s][v] for v in range(n)]
              for s in range(count)]

    inj = SplitMix64(world["inj_seed"])
    cont = SplitMix64(world["cont_seed"])

    queue = [int(x) for x in world["queue0"]]
    qtotal = sum(queue)
    ell0 = float(qtotal)
    injected_total = qtotal
    delivered_total = 0
    failed_total = 0
    launch_total = 0

    order = list(range(count))
    holder = order[0]
    arrive = delta
    in_batch = False
    batch_big = False
    launched = 0
    next_launch = -1

    fifos = [[deque() for _ in range(n)] for _ in range(count)]
    live = 0
    events = [(0, EV_PASS, holder, 0)]
    changed = []
    ell_arr = np.zeros(total, dtype=np.int64)
    inj_arr = np.zeros(total, dtype=np.int64)
    del_arr = np.zeros(total, dtype=np.int64)

    for t in range(total):
        # control: token arrival decision, then batch continuation
        if not in_batch and t == arrive:
            q = queue[holder]
            if q < delta:
                events.append((t, EV_SILENT, holder, 0))
                holder = order[(order.index(holder) + 1) % count]
                arrive = t + delta
                events.append((t, EV_PASS, holder, 0))
            else:
                if q >= n * delta:
                    events.append((t, EV_DISCOVERY, holder, 0))
                    order.remove(holder)
                    order.insert(0, holder)
                    batch_big = True
                else:
                    batch_big = False
                in_batch = True
                launched = 0
                next_launch = t
        do_launch = False
        if in_batch and t == next_launch:
            if batch_big:
                done = launched >= delta and queue[holder] < n * delta
            else:
                done = launched == delta
            if done:
                events.append((t, EV_BATCH_END, holder, launched))
                holder = order[(order.index(holder) + 1) % count]
                arrive = t + delta
                in_batch = False
                events.append((t, EV_PASS, holder, 0))
            else:
                do_launch = True

        # injection: the rate draw happens every slot; target draws only
        # for the policies that need one
        u = inj.random()
        if u < rate:
            target = -1
            if policy == 0:
                target = int(inj.random() * count)
            elif policy == 1:
                target = (holder + 1) % count
            elif policy == 2:
                target = holder
            else:
                if count > 1:
                    j = int(inj.random() * (count - 1))
                    if j >= holder:
                        j += 1
                    target = j
            if target >= 0:
                queue[target] += 1
                qtotal += 1
                injected_total += 1

        if do_launch:
            queue[holder] -= 1
            qtotal -= 1
            root = src[holder]
            fl = _Flight(holder, launch_total, t, root, n, counts[holder])
            if fl.unserved[root] > 0:
                fifos[holder][root].append(fl)
            launch_total += 1
            live += 1
            launched += 1
            next_launch = t + gap
            if fl.held + fl.lost == n:
                changed.append(fl)

        if live > 0:
            tx_nodes, tx_fl, recv_fl, recv_sender = _radio_slot(
                t, fifos, A, incol, child_ptr, child_dat, res, mod, fast,
                slow_prob, n, count, cont)
            _apply_receptions(t, recv_fl, recv_sender, fifos, child_ptr, n,
                              changed)
            _fast_postcheck(t, tx_nodes, tx_fl, child_ptr, child_dat, fast,
                            events, False, changed)

        if changed:
            changed.sort(key=lambda f: f.packet)
            for fl in changed:
                if fl.retired:
                    continue
                if fl.held == n:
                    fl.retired = True
                    live -= 1
                    delivered_total += 1
                    span = t - fl.launch + 1
                    if span > sched_len[fl.src]:
                        events.append((t, EV_LATE, fl.packet,
                                       span - sched_len[fl.src]))
                elif fl.held + fl.lost == n:
                    fl.retired = True
                    live -= 1
                    failed_total += 1
                    events.append((t, EV_FAILED, fl.packet, fl.lost))
            changed.clear()

        ell_arr[t] = qtotal
        inj_arr[t] = injected_total
        del_arr[t] = delivered_total
        rhs = ell0 + (t + 1.0) * gap / (gap + 1.0) + 2.0 * delta * n * n
        if qtotal >= rhs:
            events.append((t, EV_BOUND, qtotal, 0))

    return {
        "ell": ell_arr,
        "injected": inj_arr,
        "delivered": del_arr,
        "events": events,
        "queues": np.asarray(queue, dtype=np.int64),
        "order": list(order),
        "injected_total": injected_total,
        "delivered_total": delivered_total,
        "failed_total": failed_total,
        "launched_total": launch_total,
        "in_flight": live,
    }
