"""Dynamic many-source dissemination driven by a circulating token.

Sources keep FIFO queues of injected packets. A single token walks the
source list; each pass costs delta idle slots (the token's time-to-live).
On arrival the holder classifies its backlog against delta and n*delta:
an empty holder (below delta) passes on, a small one launches exactly delta
packet broadcasts spaced gap slots apart, and a big one first moves itself
to the front of the list (a "discovery") and keeps launching while it stays
big, with a floor of delta launches. Queue lengths obey
ell(t) < t*gap/(1+gap) + 2*delta*n^2 whenever queues start empty; the
engines flag any slot violating the start-adjusted form of that bound.
"""

from dataclasses import dataclass

from .core import get_engine
from .core.packs import EVENT_NAMES, POLICY_IDS, build_world
from .network import Network
from .ranking import RankedTree
from .rng import SplitMix64, derive_seed
from .schedule import ScheduleParams

POLICIES = tuple(POLICY_IDS)


@dataclass(frozen=True)
class SourceState:
    node: int
    ranked: RankedTree
    params: ScheduleParams
    initial_queue: int = 0


@dataclass(frozen=True)
class InjectionPlan:
    rate: float
    policy: str

    def __post_init__(self):
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError("rate must be in [0, 1]")
        if self.policy not in POLICY_IDS:
            raise ValueError(f"unknown policy {self.policy!r}")


def classify(queue_len: int, delta: int, n: int) -> str:
    if delta < 1:
        raise ValueError("delta must be >= 1")
    if queue_len < delta:
        return "empty"
    if queue_len < n * delta:
        return "small"
    return "big"


def inject(plan: InjectionPlan, holder: int, count: int, rng: SplitMix64):
    """One slot of the injection adversary; returns a source index or None.

    Reference twin of the engines' inline injection step: the rate draw is
    consumed every slot, a target draw only when the policy needs one.
    """
    u = rng.random()
    if u >= plan.rate:
        return None
    if plan.policy == "uniform":
        return int(rng.random() * count)
    if plan.policy == "next":
        return (holder + 1) % count
    if plan.policy == "current":
        return holder
    if count > 1:
        j = int(rng.random() * (count - 1))
        if j >= holder:
            j += 1
        return j
    return None


@dataclass(frozen=True)
class SimTrace:
    ell: object           # int64[t]: total queued packets after slot t
    injected: object      # int64[t]: cumulative, preloads included at t=0
    delivered: object     # int64[t]: cumulative completed broadcasts
    events: tuple         # (slot, name, a, b) rows, name per EVENT_NAMES
    queues_final: tuple   # per-source backlog in ascending node order
    order_final: tuple    # source node ids, front first
    source_nodes: tuple
    delta: int
    gap: int
    injected_total: int
    delivered_total: int
    failed_total: int
    launched_total: int
    in_flight: int

    def event_count(self, name: str, upto: int | None = None) -> int:
        total = 0
        for slot, kind, _, _ in self.events:
            if kind == name and (upto is None or slot <= upto):
                total += 1
        return total


def run_mmb(net: Network, sources, plan: InjectionPlan, total_slots: int,
            seed: int, engine=None) -> SimTrace:
    """Simulate total_slots slots; deterministic in (inputs, seed).

    Sources must be given with distinct nodes; they are processed in
    ascending node order. The run's injection and contention randomness come
    from sub-streams derived from seed, so either can be replayed alone.
    """
    if total_slots < 1:
        raise ValueError("total_slots must be >= 1")
    ordered = sorted(sources, key=lambda s: s.node)
    nodes = [s.node for s in ordered]
    if len(set(nodes)) != len(nodes):
        raise ValueError("duplicate source nodes")
    world = build_world(
        net,
        [s.ranked for s in ordered],
        [s.params for s in ordered],
        nodes,
        [s.initial_queue for s in ordered],
        plan.rate,
        POLICY_IDS[plan.policy],
        total_slots,
        derive_seed(seed, "injection"),
        derive_seed(seed, "contention"),
    )
    eng = engine if engine is not None else get_engine()
    out = eng.run_mmb(world)
    return SimTrace(
        ell=out["ell"],
        injected=out["injected"],
        delivered=out["delivered"],
        events=tuple((slot, EVENT_NAMES[kind], a, b)
                     for slot, kind, a, b in out["events"]),
        queues_final=tuple(int(x) for x in out["queues"]),
        order_final=tuple(nodes[i] for i in out["order"]),
        source_nodes=tuple(nodes),
        delta=world["delta"],
        gap=world["gap"],
        injected_total=out["injected_total"],
        delivered_total=out["delivered_total"],
        failed_total=out["failed_total"],
        launched_total=out["launched_total"],
        in_flight=out["in_flight"],
    )


def competitive_throughput(trace: SimTrace, t: int) -> float:
    """Delivered over injected at slot t; the optimum delivers instantly,
    so injected packets stand in for its output. 1.0 on a quiet network."""
    injected = int(trace.injected[t])
    if injected == 0:
        return 1.0
    return int(trace.delivered[t]) / injected
