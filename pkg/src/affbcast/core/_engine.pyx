# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled slot engine.

Statement-for-statement twin of _engine_py; both must produce bit-identical
results for any input. The RNG, draw order, and float accumulation order are
pinned there — keep every loop in the same order when editing either file.
Live broadcasts sit in per-(source, node) FIFOs; the flight pool grows by
doubling and a retired row is recycled once every queue reference to it has
drained.
"""

import numpy as np

from .packs import (
    MAXF, EV_PASS, EV_SILENT, EV_DISCOVERY, EV_BATCH_END,
    EV_FAST_MISS, EV_FAILED, EV_LATE, EV_BOUND,
)

BACKEND = "compiled"

ctypedef unsigned long long u64

cdef double _INV53 = 1.0 / 9007199254740992.0


cdef inline double _rng_next(u64 *state) nogil:
    cdef u64 z
    state[0] = state[0] + <u64>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EB
    z = z ^ (z >> 31)
    return <double>(z >> 11) * _INV53


cdef class _Sim:
    # static world
    cdef long n, S
    cdef const double[:, ::1] A
    cdef long[:, ::1] incol, child_ptr, child_dat, res, mod
    cdef signed char[:, ::1] fastm
    cdef double[:] slow_prob
    cdef long[:] sched_len
    cdef bint broadcast_payload
    cdef list events
    cdef u64 cont_state
    # per (source, node) FIFO of flight ids
    cdef long[:, ::1] fhead, ftail
    # flight pool, grown by doubling; rows recycled through a free list
    cdef long cap
    cdef dict pool
    cdef long[:] fsrc, fpacket, flaunch, fheld, flost, frefs, freelist
    cdef signed char[:] fretired
    cdef long[:, ::1] fready, funserved, ffnext
    cdef signed char[:, ::1] fholder, fspent, funreach
    cdef long freetop
    # per-slot scratch
    cdef long[:] txn, txf, rflight, rsender, stack, changed
    cdef long txcount, nchanged
    # run totals
    cdef long live, delivered_total, failed_total

    def __cinit__(self, A, incol, child_ptr, child_dat, res, mod, fast,
                  slow_prob, sched_len, long n, long S, u64 cont_seed,
                  bint broadcast_payload):
        self.A = A
        self.incol = np.ascontiguousarray(incol, dtype=np.int64)
        self.child_ptr = np.ascontiguousarray(child_ptr, dtype=np.int64)
        self.child_dat = np.ascontiguousarray(child_dat, dtype=np.int64)
        self.res = np.ascontiguousarray(res, dtype=np.int64)
        self.mod = np.ascontiguousarray(mod, dtype=np.int64)
        self.fastm = np.ascontiguousarray(fast, dtype=np.int8)
        self.slow_prob = np.ascontiguousarray(slow_prob, dtype=np.float64)
        self.sched_len = np.ascontiguousarray(sched_len, dtype=np.int64)
        self.n = n
        self.S = S
        self.cont_state = cont_seed
        self.broadcast_payload = broadcast_payload
        self.events = []
        self.fhead = np.full((S, n), -1, dtype=np.int64)
        self.ftail = np.full((S, n), -1, dtype=np.int64)
        self.cap = MAXF
        self.pool = {}
        self._alloc_pool(self.cap)
        cdef long f
        self.freetop = self.cap
        for f in range(self.cap):
            self.freelist[f] = self.cap - 1 - f
        self.txn = np.zeros(n, dtype=np.int64)
        self.txf = np.full(n, -1, dtype=np.int64)
        self.rflight = np.full(n, -1, dtype=np.int64)
        self.rsender = np.full(n, -1, dtype=np.int64)
        self.stack = np.zeros(n, dtype=np.int64)
        self.changed = np.zeros(n * (S + 1) + 1, dtype=np.int64)
        self.txcount = 0
        self.nchanged = 0
        self.live = 0
        self.delivered_total = 0
        self.failed_total = 0

    cdef void _alloc_pool(self, long cap):
        cdef long n = self.n
        for key in ("fsrc", "fpacket", "flaunch", "fheld", "flost", "frefs",
                    "freelist"):
            self.pool[key] = np.zeros(cap, dtype=np.int64)
        self.pool["fretired"] = np.zeros(cap, dtype=np.int8)
        for key in ("fready", "funserved", "ffnext"):
            self.pool[key] = np.zeros((cap, n), dtype=np.int64)
        for key in ("fholder", "fspent", "funreach"):
            self.pool[key] = np.zeros((cap, n), dtype=np.int8)
        self._bind_pool()

    cdef void _bind_pool(self):
        self.fsrc = self.pool["fsrc"]
        self.fpacket = self.pool["fpacket"]
        self.flaunch = self.pool["flaunch"]
        self.fheld = self.pool["fheld"]
        self.flost = self.pool["flost"]
        self.frefs = self.pool["frefs"]
        self.freelist = self.pool["freelist"]
        self.fretired = self.pool["fretired"]
        self.fready = self.pool["fready"]
        self.funserved = self.pool["funserved"]
        self.ffnext = self.pool["ffnext"]
        self.fholder = self.pool["fholder"]
        self.fspent = self.pool["fspent"]
        self.funreach = self.pool["funreach"]

    cdef void _grow(self):
        cdef long old = self.cap
        cdef long newcap = old * 2
        cdef dict fresh = {}
        for key in ("fsrc", "fpacket", "flaunch", "fheld", "flost", "frefs",
                    "freelist"):
            arr = np.zeros(newcap, dtype=np.int64)
            arr[:old] = self.pool[key]
            fresh[key] = arr
        arr = np.zeros(newcap, dtype=np.int8)
        arr[:old] = self.pool["fretired"]
        fresh["fretired"] = arr
        for key in ("fready", "funserved", "ffnext"):
            arr = np.zeros((newcap, self.n), dtype=np.int64)
            arr[:old] = self.pool[key]
            fresh[key] = arr
        for key in ("fholder", "fspent", "funreach"):
            arr = np.zeros((newcap, self.n), dtype=np.int8)
            arr[:old] = self.pool[key]
            fresh[key] = arr
        self.pool = fresh
        self._bind_pool()
        self.cap = newcap
        cdef long f
        for f in range(newcap - 1, old - 1, -1):
            self.freelist[self.freetop] = f
            self.freetop += 1

    cdef long _alloc(self):
        if self.freetop == 0:
            self._grow()
        self.freetop -= 1
        return self.freelist[self.freetop]

    cdef inline void _reclaim(self, long f):
        if self.fretired[f] and self.frefs[f] == 0:
            self.freelist[self.freetop] = f
            self.freetop += 1

    cdef inline void _enqueue(self, long s, long v, long f):
        self.ffnext[f, v] = -1
        if self.ftail[s, v] < 0:
            self.fhead[s, v] = f
        else:
            self.ffnext[self.ftail[s, v], v] = f
        self.ftail[s, v] = f
        self.frefs[f] += 1

    cdef long _launch(self, long s, long root, long packet, long t):
        """Allocate and reset a flight row; enqueue it at its root."""
        cdef long f = self._alloc()
        cdef long v
        self.fsrc[f] = s
        self.fpacket[f] = packet
        self.flaunch[f] = t
        self.fheld[f] = 1
        self.flost[f] = 0
        self.frefs[f] = 0
        self.fretired[f] = 0
        for v in range(self.n):
            self.fholder[f, v] = 0
            self.fspent[f, v] = 0
            self.funreach[f, v] = 0
            self.fready[f, v] = 0
            self.funserved[f, v] = self.child_ptr[s, v + 1] - self.child_ptr[s, v]
        self.fholder[f, root] = 1
        self.fready[f, root] = t
        if self.funserved[f, root] > 0:
            self._enqueue(s, root, f)
        self.live += 1
        return f

    cdef void _radio(self, long t):
        """Candidate selection, contention, and reception resolution.

        Queue fronts that are done at a node (served out, fast and spent, or
        retired) are popped lazily before candidacy, mirroring the reference
        engine's compaction.
        """
        cdef long v, s, f, best, idx, c, col, i, u
        cdef double total
        cdef bint go
        self.txcount = 0
        for v in range(self.n):
            self.txf[v] = -1
            self.rflight[v] = -1
            self.rsender[v] = -1
        for v in range(self.n):
            best = -1
            for s in range(self.S):
                f = self.fhead[s, v]
                while f >= 0:
                    if self.fretired[f] or self.funserved[f, v] == 0 or \
                            (self.fastm[s, v] and self.fspent[f, v]):
                        self.fhead[s, v] = self.ffnext[f, v]
                        if self.fhead[s, v] < 0:
                            self.ftail[s, v] = -1
                        self.frefs[f] -= 1
                        self._reclaim(f)
                        f = self.fhead[s, v]
                        continue
                    break
                if f < 0 or t % self.mod[s, v] != self.res[s, v]:
                    continue
                if t >= self.fready[f, v] and \
                        (best < 0 or self.fpacket[f] < self.fpacket[best]):
                    best = f
            if best < 0:
                continue
            s = self.fsrc[best]
            if self.fastm[s, v]:
                go = True
            else:
                go = _rng_next(&self.cont_state) < self.slow_prob[s]
            if go:
                self.txn[self.txcount] = v
                self.txcount += 1
                self.txf[v] = best

        for i in range(self.txcount):
            v = self.txn[i]
            f = self.txf[v]
            s = self.fsrc[f]
            for idx in range(self.child_ptr[s, v], self.child_ptr[s, v + 1]):
                c = self.child_dat[s, idx]
                if self.fholder[f, c] or self.funreach[f, c] or self.txf[c] >= 0:
                    continue
                col = self.incol[s, c]
                total = 0.0
                for u in range(self.txcount):
                    if self.txn[u] != v:
                        total += self.A[self.txn[u], col]
                if total < 1.0:
                    if self.rsender[c] < 0 or v < self.rsender[c]:
                        self.rsender[c] = v
                        self.rflight[c] = f

    cdef void _apply(self, long t):
        cdef long c, f, s
        for c in range(self.n):
            f = self.rflight[c]
            if f < 0:
                continue
            self.fholder[f, c] = 1
            self.fheld[f] += 1
            self.fready[f, c] = t + 1
            self.funserved[f, self.rsender[c]] -= 1
            s = self.fsrc[f]
            if self.child_ptr[s, c + 1] > self.child_ptr[s, c]:
                self._enqueue(s, c, f)
            self.changed[self.nchanged] = f
            self.nchanged += 1

    cdef void _post(self, long t):
        cdef long i, v, f, s, idx, c, top, x, j
        for i in range(self.txcount):
            v = self.txn[i]
            f = self.txf[v]
            s = self.fsrc[f]
            if not self.fastm[s, v]:
                continue
            self.fspent[f, v] = 1
            for idx in range(self.child_ptr[s, v], self.child_ptr[s, v + 1]):
                c = self.child_dat[s, idx]
                if self.fholder[f, c] or self.funreach[f, c]:
                    continue
                if self.broadcast_payload:
                    self.events.append((t, EV_FAST_MISS, v, c))
                else:
                    self.events.append((t, EV_FAST_MISS, v, self.fpacket[f]))
                top = 1
                self.stack[0] = c
                while top > 0:
                    top -= 1
                    x = self.stack[top]
                    if self.funreach[f, x]:
                        continue
                    self.funreach[f, x] = 1
                    self.flost[f] += 1
                    for j in range(self.child_ptr[s, x], self.child_ptr[s, x + 1]):
                        self.stack[top] = self.child_dat[s, j]
                        top += 1
                self.changed[self.nchanged] = f
                self.nchanged += 1

    cdef void _retire(self, long t):
        """Settle flights whose held/lost moved this slot, in launch order."""
        cdef long i, j, f, key, span
        for i in range(1, self.nchanged):
            f = self.changed[i]
            key = self.fpacket[f]
            j = i - 1
            while j >= 0 and self.fpacket[self.changed[j]] > key:
                self.changed[j + 1] = self.changed[j]
                j -= 1
            self.changed[j + 1] = f
        for i in range(self.nchanged):
            f = self.changed[i]
            if self.fretired[f]:
                continue
            if self.fheld[f] == self.n:
                self.fretired[f] = 1
                self.live -= 1
                self.delivered_total += 1
                span = t - self.flaunch[f] + 1
                if span > self.sched_len[self.fsrc[f]]:
                    self.events.append((t, EV_LATE, self.fpacket[f],
                                        span - self.sched_len[self.fsrc[f]]))
                self._reclaim(f)
            elif self.fheld[f] + self.flost[f] == self.n:
                self.fretired[f] = 1
                self.live -= 1
                self.failed_total += 1
                self.events.append((t, EV_FAILED, self.fpacket[f],
                                    self.flost[f]))
                self._reclaim(f)
        self.nchanged = 0


def run_broadcast(pack, seed, budget, record_trace=False):
    """Single packet from one root under its reservation schedule."""
    cdef long n = pack["n"]
    A = np.ascontiguousarray(pack["A"], dtype=np.float64)
    cdef _Sim sim = _Sim(
        A,
        np.asarray(pack["incol"], dtype=np.int64).reshape(1, -1),
        np.asarray(pack["child_ptr"], dtype=np.int64).reshape(1, -1),
        np.asarray(pack["child_dat"], dtype=np.int64).reshape(1, -1),
        np.asarray(pack["res"], dtype=np.int64).reshape(1, -1),
        np.asarray(pack["mod"], dtype=np.int64).reshape(1, -1),
        np.asarray(pack["fast"], dtype=np.int8).reshape(1, -1),
        np.asarray([pack["slow_prob"]], dtype=np.float64),
        np.asarray([0], dtype=np.int64),
        n, 1, <u64>int(seed), True)
    cdef long root = pack["root"]
    cdef long f = sim._launch(0, root, 0, 0)
    delivery_np = np.full(n, -1, dtype=np.int64)
    cdef long[:] delivery = delivery_np
    delivery[root] = 0
    trace = [] if record_trace else None
    cdef long t, c, last = 0
    cdef long budget_c = int(budget)
    cdef list tx, hits
    for t in range(budget_c):
        sim._radio(t)
        sim._apply(t)
        for c in range(n):
            if sim.rflight[c] >= 0:
                delivery[c] = t
        sim._post(t)
        if record_trace and sim.txcount > 0:
            tx = []
            for c in range(sim.txcount):
                tx.append(sim.txn[c])
            hits = []
            for c in range(n):
                if sim.rflight[c] >= 0:
                    hits.append((c, sim.rsender[c]))
            trace.append((t, tuple(tx), tuple(hits)))
        sim.nchanged = 0
        last = t
        if sim.fheld[f] + sim.flost[f] == n:
            break
    return {
        "delivery": [int(x) for x in delivery_np],
        "violation": bool(sim.fheld[f] < n),
        "slots": last + 1,
        "events": sim.events,
        "trace": trace,
    }


def run_mmb(world):
    """Full token-circulation run over total_slots; see protocol docs."""
    cdef long n = world["n"]
    cdef long count = world["S"]
    cdef long total = world["total_slots"]
    cdef long delta = world["delta"]
    cdef long gap = world["gap"]
    cdef double rate = world["rate"]
    cdef long policy = world["policy"]
    A = np.ascontiguousarray(world["A"], dtype=np.float64)
    cdef _Sim sim = _Sim(
        A, world["incol"], world["child_ptr"], world["child_dat"],
        world["res"], world["mod"], world["fast"], world["slow_prob"],
        world["sched_len"], n, count, <u64>int(world["cont_seed"]), False)
    cdef long[:] src = np.ascontiguousarray(world["src"], dtype=np.int64)
    cdef u64 inj_state = <u64>int(world["inj_seed"])

    cdef long[:] queue = np.array(world["queue0"], dtype=np.int64)
    cdef long qtotal = 0
    cdef long i
    for i in range(count):
        qtotal += queue[i]
    cdef double ell0 = <double>qtotal
    cdef long injected_total = qtotal
    cdef long launch_total = 0

    order = list(range(count))
    cdef long holder = order[0]
    cdef long arrive = delta
    cdef bint in_batch = False
    cdef bint batch_big = False
    cdef long launched = 0
    cdef long next_launch = -1

    sim.events.append((0, EV_PASS, holder, 0))
    ell_np = np.zeros(total, dtype=np.int64)
    inj_np = np.zeros(total, dtype=np.int64)
    del_np = np.zeros(total, dtype=np.int64)
    cdef long[:] ell_arr = ell_np
    cdef long[:] inj_arr = inj_np
    cdef long[:] del_arr = del_np

    cdef long t, q, target, j, f
    cdef bint do_launch, done
    cdef double u, rhs
    for t in range(total):
        # control: token arrival decision, then batch continuation
        if not in_batch and t == arrive:
            q = queue[holder]
            if q < delta:
                sim.events.append((t, EV_SILENT, holder, 0))
                holder = order[(order.index(holder) + 1) % count]
                arrive = t + delta
                sim.events.append((t, EV_PASS, holder, 0))
            else:
                if q >= n * delta:
                    sim.events.append((t, EV_DISCOVERY, holder, 0))
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
                sim.events.append((t, EV_BATCH_END, holder, launched))
                holder = order[(order.index(holder) + 1) % count]
                arrive = t + delta
                in_batch = False
                sim.events.append((t, EV_PASS, holder, 0))
            else:
                do_launch = True

        # injection: the rate draw happens every slot; target draws only
        # for the policies that need one
        u = _rng_next(&inj_state)
        if u < rate:
            target = -1
            if policy == 0:
                target = <long>(_rng_next(&inj_state) * count)
            elif policy == 1:
                target = (holder + 1) % count
            elif policy == 2:
                target = holder
            else:
                if count > 1:
                    j = <long>(_rng_next(&inj_state) * (count - 1))
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
            f = sim._launch(holder, src[holder], launch_total, t)
            launch_total += 1
            launched += 1
            next_launch = t + gap
            if sim.fheld[f] + sim.flost[f] == n:
                sim.changed[sim.nchanged] = f
                sim.nchanged += 1

        if sim.live > 0:
            sim._radio(t)
            sim._apply(t)
            sim._post(t)

        if sim.nchanged > 0:
            sim._retire(t)

        ell_arr[t] = qtotal
        inj_arr[t] = injected_total
        del_arr[t] = sim.delivered_total
        rhs = ell0 + (t + 1.0) * gap / (gap + 1.0) + 2.0 * delta * n * n
        if qtotal >= rhs:
            sim.events.append((t, EV_BOUND, qtotal, 0))

    queues_out = np.zeros(count, dtype=np.int64)
    for i in range(count):
        queues_out[i] = queue[i]
    return {
        "ell": ell_np,
        "injected": inj_np,
        "delivered": del_np,
        "events": sim.events,
        "queues": queues_out,
        "order": list(order),
        "injected_total": injected_total,
        "delivered_total": sim.delivered_total,
        "failed_total": sim.failed_total,
        "launched_total": launch_total,
        "in_flight": sim.live,
    }
