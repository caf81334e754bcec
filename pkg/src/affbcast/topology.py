"""Input-network generators, BFS spanning trees, and tree enumeration.

Links are directed pairs (u, v); every generator here emits both directions
of each edge. BFS layering follows directed links outward from the root and
breaks parent ties toward the lowest node id, so trees are deterministic in
(graph, root).
"""

import itertools
import math
from typing import Iterable, NamedTuple

from .rng import SplitMix64

TOPOLOGY_KINDS = ("path", "bipartite", "overlap_trees", "random_connected")


class Graph:
    """Directed communication graph over nodes 0..node_count-1."""

    def __init__(self, node_count: int, links: Iterable[tuple[int, int]]):
        self.node_count = int(node_count)
        if self.node_count < 1:
            raise ValueError("graph needs at least one node")
        self.links = frozenset((int(u), int(v)) for u, v in links)
        out = [[] for _ in range(self.node_count)]
        inc = [[] for _ in range(self.node_count)]
        for u, v in self.links:
            if not (0 <= u < self.node_count and 0 <= v < self.node_count):
                raise ValueError(f"link ({u},{v}) out of range")
            if u == v:
                raise ValueError(f"self-link ({u},{v}) not allowed")
            out[u].append(v)
            inc[v].append(u)
        self._out = tuple(tuple(sorted(vs)) for vs in out)
        self._in = tuple(tuple(sorted(vs)) for vs in inc)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def in_neighbors(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def has_link(self, u: int, v: int) -> bool:
        return (u, v) in self.links

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.node_count == other.node_count
            and self.links == other.links
        )

    def __hash__(self):
        return hash((self.node_count, self.links))

    def __repr__(self):
        return f"Graph(n={self.node_count}, links={len(self.links)})"


def hop_distances(graph: Graph) -> list[list[int]]:
    """All-pairs BFS hop distances along directed links; -1 if unreachable."""
    n = graph.node_count
    dist = [[-1] * n for _ in range(n)]
    for s in range(n):
        row = dist[s]
        row[s] = 0
        frontier = [s]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for v in frontier:
                for w in graph.neighbors(v):
                    if row[w] < 0:
                        row[w] = d
                        nxt.append(w)
            frontier = nxt
    return dist


class BfsTree:
    """A BFS spanning tree: parent pointers plus the distance layering.

    `layers[d]` holds the nodes at hop distance d from the root, ascending.
    Tree links point parent -> child and always exist in the source graph.
    """

    def __init__(self, root: int, parent: dict[int, int], layers: Iterable[Iterable[int]]):
        self.root = int(root)
        self.parent = dict(parent)
        self.layers = tuple(tuple(sorted(layer)) for layer in layers)
        self.depth = len(self.layers) - 1
        self._depth_of = {}
        for d, layer in enumerate(self.layers):
            for v in layer:
                self._depth_of[v] = d
        kids: dict[int, list[int]] = {v: [] for v in self._depth_of}
        for c, p in self.parent.items():
            kids[p].append(c)
        self._children = {v: tuple(sorted(cs)) for v, cs in kids.items()}
        self.node_count = len(self._depth_of)

    def depth_of(self, v: int) -> int:
        return self._depth_of[v]

    def children(self, v: int) -> tuple[int, ...]:
        return self._children[v]

    def is_leaf(self, v: int) -> bool:
        return not self._children[v]

    def tree_links(self) -> list[tuple[int, int]]:
        return sorted((p, c) for c, p in self.parent.items())

    def nodes(self) -> list[int]:
        return sorted(self._depth_of)

    def __eq__(self, other):
        return (
            isinstance(other, BfsTree)
            and self.root == other.root
            and self.parent == other.parent
            and self.layers == other.layers
        )

    def __hash__(self):
        return hash((self.root, tuple(sorted(self.parent.items()))))


def bfs_tree(graph: Graph, root: int) -> BfsTree:
    """Layered BFS tree from root; parent ties break to the lowest id."""
    n = graph.node_count
    if not 0 <= root < n:
        raise ValueError(f"root {root} out of range")
    depth = {root: 0}
    layers = [[root]]
    while True:
        frontier = set()
        for v in layers[-1]:
            for w in graph.neighbors(v):
                if w not in depth:
                    frontier.add(w)
        if not frontier:
            break
        for w in frontier:
            depth[w] = len(layers)
        layers.append(sorted(frontier))
    if len(depth) < n:
        missing = min(v for v in range(n) if v not in depth)
        raise ValueError(f"node {missing} unreachable from root {root}")
    parent = {}
    for d in range(1, len(layers)):
        prev = set(layers[d - 1])
        for w in layers[d]:
            parent[w] = min(u for u in graph.in_neighbors(w) if u in prev)
    return BfsTree(root, parent, layers)


class TreeEnumeration(NamedTuple):
    trees: list[BfsTree]
    truncated: bool


def enumerate_bfs_trees(graph: Graph, root: int, cap: int = 10_000) -> TreeEnumeration:
    """All BFS trees of (graph, root): every per-node parent choice from the
    previous layer, in lexicographic parent-choice order, up to `cap`."""
    base = bfs_tree(graph, root)
    nodes = [v for v in sorted(base.parent)]
    choices = []
    for v in nodes:
        prev = set(base.layers[base.depth_of(v) - 1])
        choices.append(sorted(u for u in graph.in_neighbors(v) if u in prev))
    total = 1
    truncated = False
    for c in choices:
        total *= len(c)
        if total > cap:
            truncated = True
            break
    trees = []
    for combo in itertools.islice(itertools.product(*choices), cap):
        parent = dict(zip(nodes, combo))
        trees.append(BfsTree(root, parent, base.layers))
    return TreeEnumeration(trees, truncated)


def _bidirected(edges: Iterable[tuple[int, int]]) -> set[tuple[int, int]]:
    links = set()
    for u, v in edges:
        links.add((u, v))
        links.add((v, u))
    return links


def _is_connected(n: int, links: set[tuple[int, int]]) -> bool:
    adj = [[] for _ in range(n)]
    for u, v in links:
        adj[u].append(v)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def _random_connected(n: int, rng: SplitMix64, attempts: int = 256) -> set[tuple[int, int]]:
    p = min(1.0, 2.0 * math.log(n) / n)
    for _ in range(attempts):
        edges = set()
        for u in range(n):
            for v in range(u + 1, n):
                if rng.random() < p:
                    edges.add((u, v))
        links = _bidirected(edges)
        if _is_connected(n, links):
            return links
    raise RuntimeError(f"no connected graph on {n} nodes after {attempts} draws")


def generate(kind: str, n: int, seed: int) -> Graph:
    """Seeded generator for the experiment families."""
    if n < 2:
        raise ValueError("need n >= 2")
    if kind == "path":
        links = _bidirected((i, i + 1) for i in range(n - 1))
    elif kind == "bipartite":
        if n % 2:
            raise ValueError("bipartite needs even n")
        half = n // 2
        links = _bidirected((u, v) for u in range(half) for v in range(half, n))
    elif kind == "random_connected":
        links = _random_connected(n, SplitMix64(seed))
    elif kind == "overlap_trees":
        rng = SplitMix64(seed)
        base = Graph(n, _random_connected(n, rng))
        r1 = rng.randrange(n)
        r2 = rng.randrange(n)
        while r2 == r1:
            r2 = rng.randrange(n)
        links = set()
        for tree in (bfs_tree(base, r1), bfs_tree(base, r2)):
            links |= _bidirected(tree.tree_links())
    else:
        raise ValueError(f"unknown topology kind {kind!r}")
    return Graph(n, links)
