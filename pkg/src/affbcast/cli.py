"""Command line front end: run one experiment or sweep a grid."""

import argparse
import itertools
import sys

from .core import backend_name, get_engine
from .experiment import (ExperimentConfig, config_from_strings,
                         load_config_file, run_experiment, sweep)


def _add_common_flags(parser, listy: bool):
    """Single values for `run`; `sweep` takes comma-separated lists."""
    note = " (comma-separated list)" if listy else ""
    parser.add_argument("--topology", help=f"graph family{note}")
    parser.add_argument("--n", help=f"node count{note}")
    parser.add_argument("--matrix", help=f"interference matrix: hop or radio{note}")
    parser.add_argument("--rate", help=f"injection rate: 1, sqrt, or delta{note}")
    parser.add_argument("--policy", help=f"injection target policy{note}")
    parser.add_argument("--slots", help=f"total slots to simulate{note}")
    parser.add_argument("--seed", help=f"master seed{note}")
    parser.add_argument("--tmin-mode", help="tree search: single_bfs or exhaustive")
    parser.add_argument("--out-dir", help="directory for CSV artifacts")
    parser.add_argument("--snapshot-every", help="run CSV sampling period")
    parser.add_argument("--preload", help="initial queue at first source, or auto")
    parser.add_argument("--alpha", help="degradation distance override")
    parser.add_argument("--config", help="config file of 'key = value' lines")
    parser.add_argument("--engine", choices=("pure", "compiled"),
                        help="force an engine backend")


# CLI flag -> config field
_FLAG_FIELDS = {
    "topology": "topology",
    "n": "n",
    "matrix": "matrix",
    "rate": "rate",
    "policy": "policy",
    "slots": "total_slots",
    "seed": "seed",
    "tmin_mode": "tmin_mode",
    "out_dir": "out_dir",
    "snapshot_every": "snapshot_every",
    "preload": "preload",
    "alpha": "alpha",
}


def _gather(args) -> dict:
    """Merge config file values with flags; flags win."""
    raw = {}
    if args.config:
        raw.update(load_config_file(args.config))
    for flag, field in _FLAG_FIELDS.items():
        value = getattr(args, flag)
        if value is not None:
            raw[field] = value
    return raw


def _cmd_run(args) -> int:
    engine = get_engine(args.engine) if args.engine else None
    config = config_from_strings(_gather(args))
    summary = run_experiment(config, engine=engine)
    name = backend_name(engine) if engine else backend_name()
    print(f"config {summary['config_hash']} engine={name}")
    print(f"  sources={summary['sources']} delta={summary['delta']} "
          f"gap={summary['gap']} rate={summary['rate_value']:.6g}")
    print(f"  injected={summary['injected_total']} "
          f"delivered={summary['delivered_total']} "
          f"ratio={summary['ratio_final']:.6g} "
          f"violations={summary['bound_violations']}")
    for key in ("run_csv", "params_csv", "plot_csv"):
        print(f"  {summary[key]}")
    return 0


def _cmd_sweep(args) -> int:
    engine = get_engine(args.engine) if args.engine else None
    raw = _gather(args)
    multi = {}
    for field in ("topology", "n", "matrix", "rate", "policy", "total_slots",
                  "seed"):
        if field in raw:
            multi[field] = [v.strip() for v in str(raw[field]).split(",")]
    fixed = {k: v for k, v in raw.items() if k not in multi}
    configs = []
    keys = sorted(multi)
    for combo in itertools.product(*(multi[k] for k in keys)):
        values = dict(fixed)
        values.update(dict(zip(keys, combo)))
        configs.append(config_from_strings(values))
    if not configs:
        configs.append(config_from_strings(fixed))
    out_dir = configs[0].out_dir
    path = sweep(configs, f"{out_dir}/sweep.csv", engine=engine)
    print(f"{len(configs)} configs -> {path}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="affbcast",
        description="Broadcast scheduling under additive interference")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run one experiment")
    _add_common_flags(run_p, listy=False)
    run_p.set_defaults(func=_cmd_run)
    sweep_p = sub.add_parser("sweep", help="run a cartesian grid of experiments")
    _add_common_flags(sweep_p, listy=True)
    sweep_p.set_defaults(func=_cmd_sweep)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
