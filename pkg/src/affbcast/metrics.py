"""Interference characteristics of a broadcast tree.

Two numbers drive every scheduling bound downstream: the worst average
affectance a tree layer puts on its own downward links (layer_affectance)
and the worst accumulated affectance along a root-to-leaf path
(path_affectance). Both are properties of a (network, tree) pair.
"""

import math
from dataclasses import dataclass
from itertools import combinations

from .network import Network
from .topology import BfsTree, bfs_tree, enumerate_bfs_trees

EXACT_SUBSET_CAP = 20


@dataclass(frozen=True)
class TreeCharacteristics:
    layer_affectance: float
    path_affectance: float
    objective: float


def _sum_on_link(net: Network, nodes, col: int) -> float:
    # nodes must be sorted; sender self-entries are stored as zero, so no
    # exclusion test is needed here.
    a = net.affectance
    total = 0.0
    for u in nodes:
        total += a[u, col]
    return total


def _layer_links(net: Network, tree: BfsTree, members):
    cols = []
    for u in members:
        for c in tree.children(u):
            cols.append(net.link_index[(u, c)])
    return cols


def max_avg_layer_affectance(net: Network, tree: BfsTree, mode: str = "exact") -> float:
    """Worst average affectance on the downward links of a single layer.

    In "exact" mode every non-empty subset of a layer's non-leaf nodes is
    tried as the transmitting group; the layer's leaves always transmit too
    (they add interference but no links, so including them only raises the
    average). "layer_heuristic" evaluates just the full layer, which lower
    bounds the exact value.
    """
    if mode not in ("exact", "layer_heuristic"):
        raise ValueError(f"unknown mode {mode!r}")
    best = 0.0
    for depth in range(tree.depth):
        layer = tree.layers[depth]
        non_leaves = [u for u in layer if not tree.is_leaf(u)]
        if not non_leaves:
            continue
        leaves = [u for u in layer if tree.is_leaf(u)]
        if mode == "layer_heuristic":
            groups = [non_leaves]
        else:
            if len(non_leaves) > EXACT_SUBSET_CAP:
                raise ValueError(
                    f"layer at depth {depth} has {len(non_leaves)} non-leaf nodes; "
                    f"exact mode enumerates subsets and is capped at "
                    f"{EXACT_SUBSET_CAP}, use mode='layer_heuristic'"
                )
            groups = []
            for k in range(1, len(non_leaves) + 1):
                groups.extend(combinations(non_leaves, k))
        for group in groups:
            transmitters = sorted(set(group).union(leaves))
            cols = _layer_links(net, tree, group)
            total = 0.0
            for col in cols:
                total += _sum_on_link(net, transmitters, col)
            avg = total / len(cols)
            if avg > best:
                best = avg
    return float(best)


def max_path_affectance(net: Network, tree: BfsTree) -> float:
    """Worst root-to-leaf sum of per-link affectance, where each link is
    charged with the affectance of the sender's entire layer on it."""
    weights = {}
    for depth in range(tree.depth):
        layer = tree.layers[depth]
        for u in layer:
            for c in tree.children(u):
                col = net.link_index[(u, c)]
                weights[(u, c)] = _sum_on_link(net, layer, col)

    cost = {}
    for depth in range(tree.depth, -1, -1):
        for u in tree.layers[depth]:
            best = 0.0
            for c in tree.children(u):
                candidate = weights[(u, c)] + cost[c]
                if candidate > best:
                    best = candidate
            cost[u] = best
    return float(cost[tree.root])


def characteristics(net: Network, tree: BfsTree, mode: str = "exact") -> TreeCharacteristics:
    k = max_avg_layer_affectance(net, tree, mode=mode)
    m = max_path_affectance(net, tree)
    n = net.node_count
    objective = m * (m / math.log2(n) + k)
    return TreeCharacteristics(layer_affectance=k, path_affectance=m, objective=objective)


def select_tmin(net: Network, root: int, mode: str = "single_bfs", cap: int = 10_000):
    """Pick the broadcast tree minimizing M*(M/log2 n + K).

    "single_bfs" scores the lowest-parent-id BFS tree with the layer
    heuristic. "exhaustive" scores every BFS tree with exact K and keeps the
    first minimizer in enumeration order; if the enumeration would exceed
    `cap` trees it refuses rather than silently optimizing over a sample.
    Returns (tree, characteristics).
    """
    if mode == "single_bfs":
        tree = bfs_tree(net.graph, root)
        return tree, characteristics(net, tree, mode="layer_heuristic")
    if mode == "exhaustive":
        enum = enumerate_bfs_trees(net.graph, root, cap=cap)
        if enum.truncated:
            raise ValueError(
                f"more than {cap} BFS trees from root {root}; "
                f"use mode='single_bfs'"
            )
        best_tree = None
        best_chars = None
        for tree in enum.trees:
            chars = characteristics(net, tree, mode="exact")
            if best_chars is None or chars.objective < best_chars.objective:
                best_tree, best_chars = tree, chars
        return best_tree, best_chars
    raise ValueError(f"unknown mode {mode!r}")
