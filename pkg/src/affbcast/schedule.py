"""Slot reservations and single-packet broadcast execution.

A ranked tree yields a reservation pattern: fast nodes of rank r at depth d
own slots t = d + 2h(R-r) (mod 2hR), so a packet hops one layer per slot
within a rank band and waits 2h slots at each rank boundary; slow nodes share
the coarser pattern t = d + h (mod 2h) and resolve contention by transmitting
with probability slow_prob. h = max(3, alpha) keeps co-scheduled layers
farther apart than the affectance range.
"""

import math
from dataclasses import dataclass

from .core import get_engine
from .core.packs import EVENT_NAMES, build_broadcast_pack
from .metrics import TreeCharacteristics
from .network import Network
from .ranking import RankedTree


@dataclass(frozen=True)
class ScheduleParams:
    spacing: int            # h
    max_rank: int           # R
    layer_affectance: float  # K
    path_affectance: float   # M
    tree_depth: int
    schedule_len: int       # per-source broadcast budget, slots
    pipeline_gap: int       # slots between consecutive packet launches
    slow_prob: float


def schedule_params(net: Network, ranked: RankedTree,
                    chars: TreeCharacteristics) -> ScheduleParams:
    h = max(3, net.degradation_distance)
    top = ranked.max_rank
    k = chars.layer_affectance
    depth = ranked.tree.depth
    n = net.node_count
    sched = depth + 2 * h * top * top + math.ceil(32.0 * h * top * k * math.log(n))
    gap = max(1, math.ceil(16.0 * h * k * math.log(n)))
    # interference-free trees would get probability above 1 and zero gap;
    # clamp to certain transmission and back-to-back pipelining
    prob = 1.0 if k < 0.25 else min(1.0, 1.0 / (4.0 * k))
    return ScheduleParams(
        spacing=h,
        max_rank=top,
        layer_affectance=k,
        path_affectance=chars.path_affectance,
        tree_depth=depth,
        schedule_len=int(sched),
        pipeline_gap=int(gap),
        slow_prob=prob,
    )


def reserved(v: int, t: int, params: ScheduleParams, ranked: RankedTree) -> bool:
    """Whether slot t belongs to node v under this schedule."""
    if t < 0:
        raise ValueError("slots start at 0")
    h = params.spacing
    d = ranked.tree.depth_of(v)
    if ranked.is_fast(v):
        period = 2 * h * params.max_rank
        return t % period == (d + 2 * h * (params.max_rank - ranked.rank[v])) % period
    return t % (2 * h) == (d + h) % (2 * h)


@dataclass(frozen=True)
class BroadcastResult:
    packet: object
    delivery: dict        # node -> first-reception slot; root maps to 0
    violation: bool       # some node never reached within the budget
    slots: int            # slots consumed until completion or budget
    events: tuple         # (slot, kind, a, b) with kind in EVENT_NAMES order
    trace: tuple | None   # (slot, transmitters, receptions) when recorded


def run_single_broadcast(net: Network, ranked: RankedTree,
                         params: ScheduleParams, packet, seed: int,
                         slot_budget: int, record_trace: bool = False,
                         engine=None) -> BroadcastResult:
    """Broadcast one packet from the tree root, launched at slot 0.

    The budget must cover at least one schedule length. Delivery can still
    miss nodes (a fast transmission jammed by out-of-schedule interference
    strands its subtree); that sets the violation flag rather than raising.
    """
    if slot_budget < params.schedule_len:
        raise ValueError(
            f"slot_budget {slot_budget} below schedule length "
            f"{params.schedule_len}")
    eng = engine if engine is not None else get_engine()
    pack = build_broadcast_pack(net, ranked, params)
    out = eng.run_broadcast(pack, seed, slot_budget, record_trace)
    delivery = {v: s for v, s in enumerate(out["delivery"]) if s >= 0}
    return BroadcastResult(
        packet=packet,
        delivery=delivery,
        violation=bool(out["violation"]),
        slots=int(out["slots"]),
        events=tuple(out["events"]),
        trace=None if out["trace"] is None else tuple(out["trace"]),
    )


def broadcast_trace_csv(result: BroadcastResult) -> str:
    """Render a recorded trace as CSV (slot, transmitters, receptions)."""
    if result.trace is None:
        raise ValueError("broadcast was run without record_trace")
    lines = ["slot,transmitters,receptions"]
    for slot, tx, hits in result.trace:
        txs = "|".join(str(v) for v in tx)
        rxs = "|".join(f"{c}<{u}" for c, u in hits)
        lines.append(f"{slot},{txs},{rxs}")
    return "\n".join(lines) + "\n"
