"""Undirected graph model, connectivity analysis, and rupture-degree scoring.

Nodes are labeled 1..n.  Adjacency is kept both as an edge list and as
per-node bitmasks; the bitmask form is the hot path for the enumeration
oracle and the branch-and-bound solvers.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InputError, SizeLimitError

NODE_CLASSES = ("attackable", "intact", "generator", "hub", "load")

DEFAULT_ENUMERATION_CAP = 22


class Graph:
    """Simple undirected graph with per-node attack costs and pairwise
    link-addition costs for non-edges."""

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]],
        attack_cost: Optional[Sequence[float]] = None,
        link_cost: Optional[Mapping[tuple[int, int], float]] = None,
        node_class: Optional[Sequence[str]] = None,
    ):
        if n < 1:
            raise InputError(f"node count must be >= 1, got {n}")
        self.n = n
        norm = set()
        for i, j in edges:
            if i == j:
                raise InputError(f"self-loop at node {i}")
            if not (1 <= i <= n and 1 <= j <= n):
                raise InputError(f"edge ({i},{j}) out of range 1..{n}")
            norm.add((min(i, j), max(i, j)))
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(norm))
        self.edge_set = frozenset(self.edges)

        if attack_cost is None:
            self.attack_cost: tuple[float, ...] = (1.0,) * n
        else:
            if len(attack_cost) != n:
                raise InputError("attack_cost must have one entry per node")
            if any(c < 0 for c in attack_cost):
                raise InputError("attack costs must be nonnegative")
            self.attack_cost = tuple(float(c) for c in attack_cost)

        self.link_cost: dict[tuple[int, int], float] = {}
        if link_cost:
            for (i, j), d in link_cost.items():
                if i == j or not (1 <= i <= n and 1 <= j <= n):
                    raise InputError(f"link cost pair ({i},{j}) invalid")
                if d < 0:
                    raise InputError(f"link cost for ({i},{j}) must be nonnegative")
                key = (min(i, j), max(i, j))
                if key in self.link_cost and abs(self.link_cost[key] - d) > 1e-9:
                    raise InputError(f"asymmetric link cost for pair {key}")
                self.link_cost[key] = float(d)

        if node_class is not None:
            if len(node_class) != n:
                raise InputError("node_class must have one entry per node")
            for cls in node_class:
                if cls not in NODE_CLASSES:
                    raise InputError(f"unknown node class {cls!r}")
            self.node_class: Optional[tuple[str, ...]] = tuple(node_class)
        else:
            self.node_class = None

        # adjacency bitmasks, adj[v] has bit (u-1) set for each neighbor u
        adj = [0] * (n + 1)
        for i, j in self.edges:
            adj[i] |= 1 << (j - 1)
            adj[j] |= 1 << (i - 1)
        self._adj = adj
        self._full_mask = (1 << n) - 1

    # -- basic accessors -------------------------------------------------

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    def degree(self, v: int) -> int:
        return self._adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return _mask_to_nodes(self._adj[v])

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edge_set

    def adjacency_masks(self) -> list[int]:
        return list(self._adj)

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        comps = _component_masks(self._adj, self._full_mask)
        return len(comps) == 1

    def add_edges(self, new_edges: Iterable[tuple[int, int]]) -> "Graph":
        """Return a new graph with the given edges added."""
        merged = set(self.edges)
        for i, j in new_edges:
            merged.add((min(i, j), max(i, j)))
        link = {k: v for k, v in self.link_cost.items() if k not in merged}
        return Graph(self.n, merged, self.attack_cost, link, self.node_class)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.edges == other.edges
            and self.attack_cost == other.attack_cost
            and self.link_cost == other.link_cost
            and self.node_class == other.node_class
        )

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={len(self.edges)})"


@dataclass(frozen=True)
class ComponentPartition:
    """Partition of surviving nodes into connected components, ordered by
    smallest contained node index."""

    components: tuple[tuple[int, ...], ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.components)

    @property
    def largest_size(self) -> int:
        return max(self.sizes, default=0)

    @property
    def count(self) -> int:
        return len(self.components)

    def component_of(self, v: int) -> int:
        """1-based index of the component containing node v."""
        for k, comp in enumerate(self.components, start=1):
            if v in comp:
                return k
        raise KeyError(f"node {v} not in any component")


@dataclass(frozen=True)
class CutSet:
    nodes: frozenset[int]
    is_cut: bool


@dataclass(frozen=True)
class RuptureScore:
    cut_size: int
    largest: int
    count: int
    rupture: int
    is_cut: bool

    @property
    def resilience(self) -> int:
        return -self.rupture


def _mask_to_nodes(mask: int) -> list[int]:
    out = []
    while mask:
        b = mask & -mask
        out.append(b.bit_length())
        mask ^= b
    return out


def _component_masks(adj: Sequence[int], alive: int) -> list[int]:
    """Bitmasks of the connected components of the subgraph induced on
    `alive`, ordered by lowest contained bit."""
    comps = []
    rest = alive
    while rest:
        seed = rest & -rest
        comp = seed
        frontier = seed
        while frontier:
            nxt = 0
            f = frontier
            while f:
                b = f & -f
                f ^= b
                nxt |= adj[b.bit_length()]
            frontier = nxt & alive & ~comp
            comp |= frontier
        comps.append(comp)
        rest &= ~comp
    return comps


def _nodes_to_mask(nodes: Iterable[int]) -> int:
    mask = 0
    for v in nodes:
        mask |= 1 << (v - 1)
    return mask


def components(g: Graph, removed: Iterable[int] = ()) -> ComponentPartition:
    """Connected components of g after deleting `removed` and their edges."""
    removed = set(removed)
    for v in removed:
        if not (1 <= v <= g.n):
            raise InputError(f"removed node {v} out of range")
    alive = g._full_mask & ~_nodes_to_mask(removed)
    masks = _component_masks(g._adj, alive)
    return ComponentPartition(tuple(tuple(_mask_to_nodes(m)) for m in masks))


def _survivor_stats(g: Graph, removed_mask: int) -> tuple[int, int]:
    """(largest component size, component count) after removing the mask."""
    alive = g._full_mask & ~removed_mask
    masks = _component_masks(g._adj, alive)
    if not masks:
        return 0, 0
    return max(m.bit_count() for m in masks), len(masks)


def rupture_score(g: Graph, x: CutSet | Iterable[int]) -> RuptureScore:
    """Score a removal set: r = -|X| - m(G-X) + w(G-X).

    Non-cut removals are scored too, with is_cut=False; removing every
    node is an error.
    """
    nodes = x.nodes if isinstance(x, CutSet) else frozenset(x)
    for v in nodes:
        if not (1 <= v <= g.n):
            raise InputError(f"cut node {v} out of range")
    removed_mask = _nodes_to_mask(nodes)
    alive = g._full_mask & ~removed_mask
    if alive == 0:
        raise InputError("cut set removes all nodes")
    m, omega = _survivor_stats(g, removed_mask)
    survivors = alive.bit_count()
    is_cut = omega >= 2 or survivors == 1
    r = -len(nodes) - m + omega
    return RuptureScore(len(nodes), m, omega, r, is_cut)


def _better_cut(
    cand: tuple[int, int, tuple[int, ...]],
    best: Optional[tuple[int, int, tuple[int, ...]]],
) -> bool:
    """Tie-break: higher rupture, then smaller |X|, then lexicographically
    smallest sorted node tuple."""
    if best is None:
        return True
    cr, csz, ct = cand
    br, bsz, bt = best
    return (-cr, csz, ct) < (-br, bsz, bt)


def worst_cut_oracle(
    g: Graph,
    budget: float,
    attackable: Optional[Iterable[int]] = None,
    *,
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP,
) -> Optional[tuple[CutSet, RuptureScore]]:
    """Reference oracle: exhaustively enumerate budget-feasible cut sets and
    return the rupture maximizer, or None when no feasible cut set exists.

    Enumeration runs over subsets of `attackable` (all nodes by default);
    refuses instances whose enumerated set exceeds `enumeration_cap`.
    """
    if budget < 0:
        raise InputError("budget must be nonnegative")
    pool = sorted(attackable) if attackable is not None else list(g.nodes)
    if len(pool) > enumeration_cap:
        raise SizeLimitError(
            f"{len(pool)} enumerable nodes exceed the enumeration cap "
            f"{enumeration_cap}"
        )
    costs = {v: g.attack_cost[v - 1] for v in pool}
    min_cost = min(costs.values(), default=0.0)
    best: Optional[tuple[int, int, tuple[int, ...]]] = None
    tol = 1e-9
    for k in range(0, len(pool) + 1):
        if k * min_cost > budget + tol:
            break
        for combo in combinations(pool, k):
            if sum(costs[v] for v in combo) > budget + tol:
                continue
            removed_mask = _nodes_to_mask(combo)
            alive = g._full_mask & ~removed_mask
            if alive == 0:
                continue
            m, omega = _survivor_stats(g, removed_mask)
            if not (omega >= 2 or alive.bit_count() == 1):
                continue
            r = -k - m + omega
            cand = (r, k, combo)
            if _better_cut(cand, best):
                best = cand
    if best is None:
        return None
    r, k, combo = best
    cut = CutSet(frozenset(combo), True)
    return cut, rupture_score(g, cut)
