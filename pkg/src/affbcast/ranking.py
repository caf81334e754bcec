"""Rank assignment turning a broadcast tree into fast and slow relays.

Every non-leaf starts at rank 1 inside its layer's rank class. Layers are
consumed deepest-first: a node whose rank class jams one of its child links
(class affectance >= 1) is demoted out of the class and parks just above the
rank of the child whose link failed; afterwards the ranks of everything
closer to the root are lifted to their max child rank. A node that survives
in its class is "fast" and its links are certified against exactly the set
that ends up sharing its slots; everyone else is "slow" and will rely on
randomized retransmission.
"""

from dataclasses import dataclass

from .network import Network
from .topology import BfsTree


@dataclass(frozen=True)
class RankedTree:
    tree: BfsTree
    rank: dict           # node -> positive rank; leaves stay at 1
    fast_sets: dict      # (depth, rank) -> frozenset of fast nodes
    max_rank: int
    demoted: frozenset   # nodes removed by the affectance check

    def is_fast(self, v: int) -> bool:
        key = (self.tree.depth_of(v), self.rank[v])
        return v in self.fast_sets.get(key, ())


def build_ranked_tree(net: Network, tree: BfsTree) -> RankedTree:
    rank = {u: 1 for u in tree.nodes()}
    fast = [dict() for _ in range(tree.depth + 1)]
    for d, layer in enumerate(tree.layers):
        members = {u for u in layer if not tree.is_leaf(u)}
        if members:
            fast[d][1] = members
    demoted = set()
    a = net.affectance

    for d in range(tree.depth - 1, -1, -1):
        # Phase 1: evict nodes whose current rank class jams a child link.
        # The class affectance is re-read after every eviction, so order
        # matters; snapshots iterate ascending node id, links ascending
        # child id.
        for r in sorted(fast[d]):
            group = fast[d][r]
            for u in sorted(group):
                for c in tree.children(u):
                    col = net.link_index[(u, c)]
                    total = 0.0
                    for w in sorted(group):
                        if w != u:
                            total += a[w, col]
                    if total >= 1.0:
                        rank[u] = rank[c] + 1
                        group.discard(u)
                        demoted.add(u)
                        break
        # Phase 2: pull ranks above this layer up to their max child rank;
        # a node re-enters a fast set only if its rank is not already higher.
        for dp in range(d - 1, -1, -1):
            for u in tree.layers[dp]:
                if tree.is_leaf(u):
                    continue
                current = fast[dp].get(rank[u])
                if current is not None:
                    current.discard(u)
                rmax = max(rank[c] for c in tree.children(u))
                if rank[u] <= rmax:
                    rank[u] = rmax
                    fast[dp].setdefault(rmax, set()).add(u)

    fast_sets = {}
    for d, by_rank in enumerate(fast):
        for r, members in by_rank.items():
            if members:
                fast_sets[(d, r)] = frozenset(members)
    return RankedTree(
        tree=tree,
        rank=rank,
        fast_sets=fast_sets,
        max_rank=max(rank.values()),
        demoted=frozenset(demoted),
    )


def rank_table(ranked: RankedTree) -> str:
    """CSV debug dump: one row per node with depth, rank and class."""
    lines = ["node,depth,rank,class"]
    for v in ranked.tree.nodes():
        cls = "fast" if ranked.is_fast(v) else "slow"
        lines.append(f"{v},{ranked.tree.depth_of(v)},{ranked.rank[v]},{cls}")
    return "\n".join(lines) + "\n"
