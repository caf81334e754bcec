"""Affectance network model and slot-level reception semantics.

A network is a directed graph plus an affectance matrix A with one row per
node and one column per link. A[w, (u,v)] is the interference node w adds on
link (u,v) while transmitting; a listener v receives from transmitter u iff
the summed affectance of all other transmitters on (u,v) is below 1.
Collisions are indistinguishable from silence for the listener.

Matrix conventions enforced at construction: sender self-entries are zero,
all entries are finite and non-negative, and any entry from a node at hop
distance >= degradation_distance from the link's receiver is zero (checked
for pairs at finite distance; the model assumes connected networks).
"""

import math
from dataclasses import dataclass

import numpy as np

from .topology import Graph, hop_distances


class Network:
    def __init__(self, graph: Graph, affectance, degradation_distance: int):
        self.graph = graph
        self.degradation_distance = int(degradation_distance)
        if self.degradation_distance < 1:
            raise ValueError("degradation_distance must be a positive integer")
        self.link_ids = tuple(sorted(graph.links))
        self.link_index = {link: i for i, link in enumerate(self.link_ids)}
        a = np.asarray(affectance, dtype=np.float64)
        n, m = graph.node_count, len(self.link_ids)
        if a.shape != (n, m):
            raise ValueError(f"affectance must have shape ({n},{m}), got {a.shape}")
        self.affectance = a.copy()
        self.affectance.setflags(write=False)
        self.hops = hop_distances(graph)
        self._validate()

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    @property
    def links(self):
        return self.link_ids

    def _validate(self):
        a = self.affectance
        if not np.isfinite(a).all():
            raise ValueError("affectance entries must be finite")
        if (a < 0).any():
            raise ValueError("affectance entries must be non-negative")
        alpha = self.degradation_distance
        for j, (u, v) in enumerate(self.link_ids):
            if a[u, j] != 0.0:
                raise ValueError(f"sender self-affectance must be 0 on link ({u},{v})")
            for w in range(self.node_count):
                d = self.hops[w][v]
                if d >= alpha and a[w, j] != 0.0:
                    raise ValueError(
                        f"node {w} at hop distance {d} >= {alpha} from {v} "
                        f"must not affect link ({u},{v})"
                    )

    def hop_distance(self, u: int, v: int) -> int:
        return self.hops[u][v]

    def diameter(self) -> int:
        return max(max(row) for row in self.hops)


@dataclass(frozen=True)
class SlotOutcome:
    """Receptions per listener plus the links blocked by interference."""

    receptions: dict          # listener -> (sender, packet)
    collisions: frozenset     # links (u, v): u transmitted, v listened, affectance >= 1


def affectance_on_link(net: Network, transmitters, link) -> float:
    """Total affectance of the transmitter set on one link.

    Only the link's own sender is excluded from the sum; a transmitting
    receiver does count against its own link (busy-receiver entries).
    Summation is in ascending node order so results are bit-stable.
    """
    col = net.link_index.get(tuple(link))
    if col is None:
        raise ValueError(f"unknown link {tuple(link)}")
    sender = link[0]
    a = net.affectance
    total = 0.0
    for u in sorted(set(transmitters)):
        if u != sender:
            total += a[u, col]
    return total


def step(net: Network, transmitters, listeners, payloads=None) -> SlotOutcome:
    """Resolve one time slot.

    transmitters and listeners must be disjoint node sets. `payloads` maps a
    transmitter to the packet it carries (defaults to the transmitter id).
    A listener with several satisfying incoming links receives from the
    lowest sender id, which can happen under general matrices.
    """
    tx = sorted(set(transmitters))
    lis = set(listeners)
    overlap = lis.intersection(tx)
    if overlap:
        raise ValueError(f"nodes {sorted(overlap)} cannot transmit and listen at once")
    if payloads is None:
        payloads = {u: u for u in tx}
    receptions = {}
    collisions = set()
    for v in sorted(lis):
        best = None
        for u in tx:
            if not net.graph.has_link(u, v):
                continue
            if affectance_on_link(net, tx, (u, v)) < 1.0:
                if best is None:
                    best = u
            else:
                collisions.add((u, v))
        if best is not None:
            receptions[v] = (best, payloads[best])
    return SlotOutcome(receptions=receptions, collisions=frozenset(collisions))


def radio_network_matrix(graph: Graph) -> np.ndarray:
    """Classic radio model as affectance: any busy neighbor (or the busy
    receiver itself) fully blocks a link; everyone else is silent to it."""
    links = sorted(graph.links)
    a = np.zeros((graph.node_count, len(links)))
    for j, (u, v) in enumerate(links):
        for w in range(graph.node_count):
            if w == u:
                continue
            if w == v or graph.has_link(w, v):
                a[w, j] = 1.0
    return a


def sinr_matrix(graph: Graph, positions, power: float, noise: float,
                beta: float, path_loss: float) -> np.ndarray:
    """Geometric SINR model expressed as affectance.

    Requires power/(beta*d_uv^path_loss) > noise on every link; otherwise the
    link cannot be received even alone and construction fails naming it.
    Receiver self-entries (w == v) are stored as 1.0: the formula diverges at
    distance zero and any value >= 1 is equivalent (a busy receiver never
    listens).
    """
    pos = [tuple(map(float, p)) for p in positions]
    if len(pos) != graph.node_count:
        raise ValueError("need one position per node")

    def dist(i, j):
        return math.dist(pos[i], pos[j])

    links = sorted(graph.links)
    a = np.zeros((graph.node_count, len(links)))
    for j, (u, v) in enumerate(links):
        denom = power / (beta * dist(u, v) ** path_loss) - noise
        if denom <= 0:
            raise ValueError(f"link ({u},{v}) infeasible: required signal margin <= 0")
        for w in range(graph.node_count):
            if w == u:
                continue
            if w == v:
                a[w, j] = 1.0
            else:
                a[w, j] = (power / dist(w, v) ** path_loss) / denom
    return a


def hop_affectance_matrix(graph: Graph, alpha: int) -> np.ndarray:
    """Affectance decaying with hop distance: zero at >= alpha hops, 1 at the
    receiver itself, 1/d^2 in between. Sender self-entries stay zero."""
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    hops = hop_distances(graph)
    links = sorted(graph.links)
    a = np.zeros((graph.node_count, len(links)))
    for j, (u, v) in enumerate(links):
        for w in range(graph.node_count):
            if w == u:
                continue
            d = hops[w][v]
            if d < 0 or d >= alpha:
                continue
            a[w, j] = 1.0 if d == 0 else 1.0 / (d * d)
    return a


def radio_network(graph: Graph) -> Network:
    return Network(graph, radio_network_matrix(graph), degradation_distance=2)


def sinr_network(graph: Graph, positions, power: float, noise: float,
                 beta: float, path_loss: float) -> Network:
    matrix = sinr_matrix(graph, positions, power, noise, beta, path_loss)
    return Network(graph, matrix, degradation_distance=graph.node_count)


def hop_network(graph: Graph, alpha: int) -> Network:
    return Network(graph, hop_affectance_matrix(graph, alpha), degradation_distance=alpha)


def save_network(net: Network, path) -> None:
    """Text format: header "n m alpha", m link lines "u v", then one
    "w u v value" line per nonzero matrix entry (absent entries are zero)."""
    with open(path, "w") as fh:
        fh.write(f"{net.node_count} {len(net.link_ids)} {net.degradation_distance}\n")
        for u, v in net.link_ids:
            fh.write(f"{u} {v}\n")
        for j, (u, v) in enumerate(net.link_ids):
            col = net.affectance[:, j]
            for w in range(net.node_count):
                if col[w] != 0.0:
                    fh.write(f"{w} {u} {v} {col[w]:.17g}\n")


def load_network(path) -> Network:
    with open(path) as fh:
        tokens = [line.split() for line in fh if line.strip()]
    if not tokens or len(tokens[0]) != 3:
        raise ValueError("network file must start with 'n m alpha'")
    n, m, alpha = (int(x) for x in tokens[0])
    if len(tokens) < 1 + m:
        raise ValueError("network file truncated: missing link lines")
    links = []
    for row in tokens[1:1 + m]:
        if len(row) != 2:
            raise ValueError(f"bad link line {' '.join(row)!r}")
        links.append((int(row[0]), int(row[1])))
    graph = Graph(n, links)
    index = {link: i for i, link in enumerate(sorted(graph.links))}
    a = np.zeros((n, len(index)))
    for row in tokens[1 + m:]:
        if len(row) != 4:
            raise ValueError(f"bad matrix line {' '.join(row)!r}")
        w, u, v, value = int(row[0]), int(row[1]), int(row[2]), float(row[3])
        col = index.get((u, v))
        if col is None:
            raise ValueError(f"matrix entry names unknown link ({u},{v})")
        a[w, col] = value
    return Network(graph, a, degradation_distance=alpha)
