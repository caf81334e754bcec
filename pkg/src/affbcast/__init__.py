"""Broadcast scheduling and simulation under additive interference.

The model: a directed communication graph plus an affectance matrix giving
each node's additive contribution against each link. A transmission is
received when the total affectance from other simultaneous transmitters
stays below one. On top of that sit ranked broadcast trees, slot-reserving
transmission schedules, and a dynamic multi-broadcast protocol with a
token-circulated queue discipline.
"""

from .core import EVENT_NAMES, MAXF, backend_name, get_engine
from .experiment import (ExperimentConfig, config_from_strings, config_hash,
                         default_alpha, load_config_file, run_experiment,
                         sweep)
from .metrics import (EXACT_SUBSET_CAP, TreeCharacteristics, characteristics,
                      max_avg_layer_affectance, max_path_affectance,
                      select_tmin)
from .network import (Network, SlotOutcome, hop_affectance_matrix,
                      hop_network, load_network, radio_network,
                      radio_network_matrix, save_network, sinr_matrix,
                      sinr_network)
from .protocol import (POLICIES, InjectionPlan, SimTrace, SourceState,
                       classify, competitive_throughput, inject, run_mmb)
from .ranking import RankedTree, build_ranked_tree, rank_table
from .rng import SplitMix64, derive_seed
from .schedule import (BroadcastResult, ScheduleParams, broadcast_trace_csv,
                       reserved, run_single_broadcast, schedule_params)
from .topology import (TOPOLOGY_KINDS, BfsTree, Graph, TreeEnumeration,
                       bfs_tree, enumerate_bfs_trees, generate, hop_distances)

__version__ = "0.1.0"

__all__ = [
    "BfsTree", "BroadcastResult", "EVENT_NAMES", "EXACT_SUBSET_CAP",
    "ExperimentConfig", "Graph", "InjectionPlan", "MAXF", "Network",
    "POLICIES", "RankedTree", "ScheduleParams", "SimTrace", "SlotOutcome",
    "SourceState", "SplitMix64", "TOPOLOGY_KINDS", "TreeCharacteristics",
    "TreeEnumeration",
    "backend_name", "bfs_tree", "broadcast_trace_csv", "characteristics",
    "classify", "competitive_throughput", "config_from_strings",
    "config_hash", "default_alpha", "derive_seed", "enumerate_bfs_trees",
    "generate", "get_engine", "hop_affectance_matrix", "hop_distances",
    "hop_network", "inject", "load_config_file", "load_network",
    "max_avg_layer_affectance", "max_path_affectance", "radio_network",
    "radio_network_matrix", "rank_table", "reserved", "run_experiment",
    "run_mmb", "run_single_broadcast", "save_network", "schedule_params",
    "select_tmin", "sinr_matrix", "sinr_network", "sweep",
    "build_ranked_tree",
]
