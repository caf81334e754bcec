"""Seeded end-to-end experiments with CSV artifacts.

One master seed drives labeled sub-streams (topology, source draw,
injection, contention), so runs are reproducible knob by knob: every output
row carries the seed and a 12-hex config hash, and rerunning a config yields
byte-identical files.
"""

import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass

from . import topology
from .metrics import select_tmin
from .network import hop_network, radio_network
from .protocol import (POLICIES, InjectionPlan, SourceState,
                       competitive_throughput, run_mmb)
from .ranking import build_ranked_tree
from .rng import SplitMix64, derive_seed
from .schedule import schedule_params

RATE_NAMES = ("1", "sqrt", "delta")
MATRIX_KINDS = ("hop", "radio")
TMIN_MODES = ("single_bfs", "exhaustive")
SOURCE_ATTEMPTS = 32


@dataclass(frozen=True)
class ExperimentConfig:
    topology: str = "overlap_trees"
    n: int = 16
    matrix: str = "hop"
    rate: str = "1"
    policy: str = "uniform"
    total_slots: int = 1_000_000
    seed: int = 1
    tmin_mode: str = "single_bfs"
    out_dir: str = "."
    snapshot_every: int = 1000
    source_prob: float = 1.0 / 3.0
    preload: object = "auto"    # "auto" = 2*delta*gap, or an explicit count
    alpha: object = None        # None = per-topology default

    def __post_init__(self):
        if self.topology not in topology.TOPOLOGY_KINDS:
            raise ValueError(f"unknown topology {self.topology!r}")
        if self.matrix not in MATRIX_KINDS:
            raise ValueError(f"unknown matrix {self.matrix!r}")
        if self.rate not in RATE_NAMES:
            raise ValueError(f"unknown rate {self.rate!r}")
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.tmin_mode not in TMIN_MODES:
            raise ValueError(f"unknown tmin_mode {self.tmin_mode!r}")
        if self.total_slots < 1:
            raise ValueError("total_slots must be >= 1")
        if self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")
        if not 0.0 < self.source_prob <= 1.0:
            raise ValueError("source_prob must be in (0, 1]")
        if self.preload != "auto" and (not isinstance(self.preload, int)
                                       or self.preload < 0):
            raise ValueError("preload must be 'auto' or a non-negative count")
        if self.alpha is not None and (not isinstance(self.alpha, int)
                                       or self.alpha < 1):
            raise ValueError("alpha must be a positive integer")


def default_alpha(kind: str, n: int) -> int:
    lg = math.log2(n)
    if kind == "bipartite":
        return max(1, math.ceil(math.sqrt(lg)))
    if kind == "path":
        return max(1, math.ceil(lg))
    # overlap_trees and random_connected share the middle setting
    return max(1, math.ceil(lg / 2.0))


def config_hash(config: ExperimentConfig) -> str:
    """12-hex experiment identity. out_dir is excluded: where artifacts land
    is not part of what was run, and reruns into a fresh directory must
    reproduce the old files byte for byte."""
    fields = asdict(config)
    del fields["out_dir"]
    payload = json.dumps(fields, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def resolve_rate(name: str, gap: int) -> float:
    if name == "1":
        return 1.0
    if name == "sqrt":
        return 1.0 / math.sqrt(1.0 + gap)
    return 1.0 / (1.0 + gap)


def draw_sources(n: int, prob: float, seed: int):
    """Each node independently becomes a source; redraw (up to a cap) if the
    coin flips left nobody standing."""
    for attempt in range(SOURCE_ATTEMPTS):
        rng = SplitMix64(derive_seed(seed, f"sources#{attempt}"))
        chosen = [v for v in range(n) if rng.random() < prob]
        if chosen:
            return chosen
    raise RuntimeError(
        f"no sources drawn in {SOURCE_ATTEMPTS} attempts at probability {prob}")


def build_network(config: ExperimentConfig):
    graph = topology.generate(config.topology, config.n,
                              derive_seed(config.seed, "topology"))
    if config.matrix == "radio":
        return radio_network(graph)
    alpha = config.alpha if config.alpha is not None else \
        default_alpha(config.topology, config.n)
    return hop_network(graph, alpha)


def prepare_sources(net, config: ExperimentConfig):
    """Source draw plus per-source tree, ranking, and schedule parameters."""
    nodes = draw_sources(config.n, config.source_prob, config.seed)
    prepared = []
    for s in nodes:
        tree, chars = select_tmin(net, s, mode=config.tmin_mode)
        ranked = build_ranked_tree(net, tree)
        params = schedule_params(net, ranked, chars)
        prepared.append((s, ranked, params, chars))
    return prepared


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def _event_counter(events, names):
    slots = sorted(e[0] for e in events if e[1] in names)

    def upto(t):
        lo, hi = 0, len(slots)
        while lo < hi:
            mid = (lo + hi) // 2
            if slots[mid] <= t:
                lo = mid + 1
            else:
                hi = mid
        return lo

    return upto


def _snapshot_slots(total: int, every: int):
    slots = list(range(every - 1, total, every))
    if not slots or slots[-1] != total - 1:
        slots.append(total - 1)
    return slots


def _plot_slots(total: int):
    out = []
    i = 0
    while True:
        t = int(round(10.0 ** (i / 8.0))) - 1
        if t > total - 1:
            break
        if not out or t > out[-1]:
            out.append(t)
        i += 1
    if not out or out[-1] != total - 1:
        out.append(total - 1)
    return out


def run_experiment(config: ExperimentConfig, keep_trace: bool = False,
                   engine=None):
    """Run one configuration end to end and write its three CSVs.

    Returns a summary dict (paths, final ratio, global delta/gap, event
    totals); pass keep_trace=True to also get the full SimTrace back.
    """
    net = build_network(config)
    prepared = prepare_sources(net, config)
    delta = max(p.schedule_len for _, _, p, _ in prepared)
    gap = max(p.pipeline_gap for _, _, p, _ in prepared)
    rate = resolve_rate(config.rate, gap)
    preload = 2 * delta * gap if config.preload == "auto" else config.preload

    sources = []
    for i, (s, ranked, params, _) in enumerate(prepared):
        initial = preload if i == 0 else 0
        sources.append(SourceState(s, ranked, params, initial_queue=initial))
    plan = InjectionPlan(rate=rate, policy=config.policy)
    trace = run_mmb(net, sources, plan, config.total_slots, config.seed,
                    engine=engine)

    tag = config_hash(config)
    os.makedirs(config.out_dir, exist_ok=True)
    run_path = os.path.join(config.out_dir, f"run_{tag}.csv")
    params_path = os.path.join(config.out_dir, f"params_{tag}.csv")
    plot_path = os.path.join(config.out_dir, f"plot_{tag}.csv")

    disc = _event_counter(trace.events, {"discovery"})
    silent = _event_counter(trace.events, {"silent"})
    viol = _event_counter(trace.events, {"bound"})
    with open(run_path, "w") as fh:
        fh.write("slot,injected,delivered,queue_total,ratio,events,seed,"
                 "config_hash\n")
        for t in _snapshot_slots(config.total_slots, config.snapshot_every):
            ratio = competitive_throughput(trace, t)
            ev = f"disc={disc(t)};silent={silent(t)};viol={viol(t)}"
            fh.write(f"{t},{trace.injected[t]},{trace.delivered[t]},"
                     f"{trace.ell[t]},{_fmt(ratio)},{ev},{config.seed},"
                     f"{tag}\n")

    with open(params_path, "w") as fh:
        fh.write("source,K,M,objective,R,D,delta_len,delta_pipe,slow_prob,"
                 "seed,config_hash\n")
        for s, ranked, params, chars in prepared:
            fh.write(f"{s},{_fmt(chars.layer_affectance)},"
                     f"{_fmt(chars.path_affectance)},{_fmt(chars.objective)},"
                     f"{params.max_rank},{params.tree_depth},"
                     f"{params.schedule_len},{params.pipeline_gap},"
                     f"{_fmt(params.slow_prob)},{config.seed},{tag}\n")

    with open(plot_path, "w") as fh:
        fh.write("injected,ratio,slot,seed,config_hash\n")
        for t in _plot_slots(config.total_slots):
            ratio = competitive_throughput(trace, t)
            fh.write(f"{trace.injected[t]},{_fmt(ratio)},{t},{config.seed},"
                     f"{tag}\n")

    final = config.total_slots - 1
    summary = {
        "config_hash": tag,
        "run_csv": run_path,
        "params_csv": params_path,
        "plot_csv": plot_path,
        "sources": [s for s, _, _, _ in prepared],
        "delta": delta,
        "gap": gap,
        "rate_value": rate,
        "preload": preload,
        "ratio_final": competitive_throughput(trace, final),
        "injected_total": trace.injected_total,
        "delivered_total": trace.delivered_total,
        "failed_total": trace.failed_total,
        "bound_violations": viol(final),
        "discoveries": disc(final),
        "silent_rounds": silent(final),
    }
    if keep_trace:
        summary["trace"] = trace
    return summary


def sweep(configs, out_path, engine=None):
    """Run a grid of configs; per-row failures are recorded, not fatal."""
    header = ("config_hash,topology,n,matrix,rate,policy,total_slots,seed,"
              "status,ratio_final,delta,gap,error\n")
    rows = []
    for config in configs:
        tag = config_hash(config)
        base = (f"{tag},{config.topology},{config.n},{config.matrix},"
                f"{config.rate},{config.policy},{config.total_slots},"
                f"{config.seed}")
        try:
            summary = run_experiment(config, engine=engine)
            rows.append(f"{base},ok,{_fmt(summary['ratio_final'])},"
                        f"{summary['delta']},{summary['gap']},\n")
        except Exception as exc:  # noqa: BLE001 - sweep must keep going
            reason = str(exc).replace(",", ";").replace("\n", " ")
            rows.append(f"{base},error,,,,{reason}\n")
    parent = os.path.dirname(out_path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(out_path, "w") as fh:
        fh.write(header)
        fh.writelines(rows)
    return out_path


def load_config_file(path) -> dict:
    """Config files are 'key = value' lines; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            out[key] = value
    return out


_INT_FIELDS = ("n", "total_slots", "seed", "snapshot_every")


def config_from_strings(raw: dict) -> ExperimentConfig:
    """Build a config from string values (config file or CLI)."""
    kwargs = {}
    fields = ExperimentConfig.__dataclass_fields__
    for key, value in raw.items():
        if key not in fields:
            raise ValueError(f"unknown config key {key!r}")
        if value is None:
            continue
        if key in _INT_FIELDS:
            kwargs[key] = int(value)
        elif key == "source_prob":
            kwargs[key] = float(value)
        elif key == "alpha":
            kwargs[key] = None if str(value) == "none" else int(value)
        elif key == "preload":
            kwargs[key] = value if str(value) == "auto" else int(value)
        else:
            kwargs[key] = value
    return ExperimentConfig(**kwargs)
