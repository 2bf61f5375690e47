"""Second-stage optimization: pick budget-feasible inter-component links
that maximize post-attack resilience.

Only the cheapest link between each component pair (the MCEIC link) can
matter, so the search runs over component merges: the solver enumerates
set partitions of the components and prices each group by its minimum-cost
connecting forest.  The independent oracle in :func:`brute_force_response`
enumerates raw link subsets instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .attack import AttackModel, AttackResult, solve_attack
from .errors import InputError, SizeLimitError
from .graph import ComponentPartition, Graph, rupture_score

LOAD_ONLY = "load-only"
HAS_GENERATOR = "has-generator"

SOLVER_MAX_COMPONENTS = 12
ORACLE_MAX_LINKS = 21   # covers up to 7 components
POWER_GROUP_MAX = 7


@dataclass(frozen=True)
class MceicMatrix:
    """Minimum link-addition cost between each component pair, with the
    realizing node endpoints."""

    size: int
    cost: dict[tuple[int, int], float]      # keys (m,n), m<n, 1-based
    endpoint: dict[tuple[int, int], tuple[int, int]]

    def pair_cost(self, m: int, n: int) -> float:
        return self.cost[(min(m, n), max(m, n))]

    def pair_endpoint(self, m: int, n: int) -> tuple[int, int]:
        return self.endpoint[(min(m, n), max(m, n))]


@dataclass(frozen=True)
class FlatIndex:
    """Bijection between component pairs (m,n), m<n, and positions
    1..s(s-1)/2 of the flattened upper triangle."""

    s: int

    def sigma(self, m: int, n: int) -> int:
        if not (1 <= m < n <= self.s):
            raise InputError(f"pair ({m},{n}) invalid for s={self.s}")
        return (n - m) + sum(self.s - k for k in range(1, m))

    def unsigma(self, z: int) -> tuple[int, int]:
        if not (1 <= z <= self.length):
            raise InputError(f"position {z} out of range")
        m = 1
        row_start = 1
        while z >= row_start + (self.s - m):
            row_start += self.s - m
            m += 1
        return m, m + (z - row_start + 1)

    @property
    def length(self) -> int:
        return self.s * (self.s - 1) // 2


@dataclass(frozen=True)
class ResponseModel:
    partition: ComponentPartition
    mceic: MceicMatrix
    budget: Optional[float]            # None = unlimited
    cut_size: int
    component_class: Optional[tuple[str, ...]] = None
    power_constraint: bool = False

    def __post_init__(self):
        if self.budget is not None and self.budget < 0:
            raise InputError("response budget must be nonnegative")
        if self.power_constraint and self.component_class is None:
            raise InputError("power constraint requires component classes")
        if self.component_class is not None:
            if len(self.component_class) != self.partition.count:
                raise InputError("one class per component required")
            for cls in self.component_class:
                if cls not in (LOAD_ONLY, HAS_GENERATOR):
                    raise InputError(f"unknown component class {cls!r}")

    @property
    def effective_budget(self) -> float:
        return math.inf if self.budget is None else self.budget


@dataclass
class ReconstructionPlan:
    selected: tuple[tuple[int, int], ...]     # component pairs (m,n), m<n
    links: tuple[tuple[int, int], ...]        # realized node endpoints
    total_cost: float
    merged_partition: ComponentPartition
    rupture: int
    dynamic_worst: Optional[AttackResult] = None

    @property
    def resilience(self) -> int:
        return -self.rupture

    def to_dict(self) -> dict:
        return {
            "selected_pairs": [list(p) for p in self.selected],
            "links": [list(l) for l in self.links],
            "total_cost": self.total_cost,
            "rupture": self.rupture,
            "resilience": self.resilience,
            "merged_components": [list(c) for c in self.merged_partition.components],
        }


def mceic_matrix(g: Graph, p: ComponentPartition) -> MceicMatrix:
    """Pairwise minimum link costs between components, exact argmin
    endpoints, ties broken by lexicographically smallest (i,j)."""
    if p.count < 2:
        raise InputError("MCEIC matrix needs at least two components")
    cost: dict[tuple[int, int], float] = {}
    endpoint: dict[tuple[int, int], tuple[int, int]] = {}
    for m, n in combinations(range(1, p.count + 1), 2):
        best: Optional[tuple[float, tuple[int, int]]] = None
        for i in p.components[m - 1]:
            for j in p.components[n - 1]:
                key = (min(i, j), max(i, j))
                if key in g.edge_set:
                    continue
                if key not in g.link_cost:
                    raise InputError(
                        f"missing link cost for cross-component pair {key}"
                    )
                d = g.link_cost[key]
                if best is None or (d, key) < best:
                    best = (d, key)
        if best is None:
            raise InputError(
                f"components {m} and {n} have no candidate link"
            )
        cost[(m, n)] = best[0]
        endpoint[(m, n)] = best[1]
    return MceicMatrix(p.count, cost, endpoint)


def flatten(s: int) -> FlatIndex:
    if s < 2:
        raise InputError("flatten requires at least two components")
    return FlatIndex(s)


class _DSU:
    def __init__(self, s: int):
        self.parent = list(range(s + 1))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _set_partitions(s: int):
    """Canonical (restricted-growth) enumeration of partitions of 1..s."""
    groups: list[list[int]] = []

    def rec(k: int):
        if k > s:
            yield [tuple(gr) for gr in groups]
            return
        for gr in groups:
            gr.append(k)
            yield from rec(k + 1)
            gr.pop()
        groups.append([k])
        yield from rec(k + 1)
        groups.pop()

    yield from rec(1)


def _group_links(group: Sequence[int], flat: FlatIndex) -> list[tuple[int, int]]:
    return [(m, n) for m, n in combinations(sorted(group), 2)]


def _power_ok(selected: Iterable[tuple[int, int]], classes: Sequence[str]) -> bool:
    """Every selected link joining two load-only components must be backed
    by a selected link from one of its endpoints to a generator component."""
    chosen = set(selected)
    for m, n in chosen:
        if classes[m - 1] == LOAD_ONLY and classes[n - 1] == LOAD_ONLY:
            backed = any(
                ((min(e, i), max(e, i)) in chosen)
                for e in (m, n)
                for i in range(1, len(classes) + 1)
                if classes[i - 1] == HAS_GENERATOR
            )
            if not backed:
                return False
    return True


def _spans(group: Sequence[int], selected: Sequence[tuple[int, int]]) -> bool:
    dsu = _DSU(max(group))
    merges = sum(dsu.union(m, n) for m, n in selected)
    return merges == len(group) - 1


def _connect_group(
    group: Sequence[int],
    mceic: MceicMatrix,
    flat: FlatIndex,
    classes: Optional[Sequence[str]],
    power: bool,
) -> Optional[tuple[list[tuple[int, int]], float]]:
    """Cheapest link selection connecting one merge group; None if the
    power constraint makes the group infeasible.

    Without the power constraint this is a deterministic Kruskal tree.  With
    it, tree edges between load-only components must be justified, possibly
    by an extra (otherwise redundant) link to a generator component, so the
    selection is found by subset enumeration over the group's links.
    """
    group = sorted(group)
    if len(group) == 1:
        return [], 0.0
    links = _group_links(group, flat)
    if not power or classes is None:
        ranked = sorted(links, key=lambda p: (mceic.pair_cost(*p), flat.sigma(*p)))
        dsu = _DSU(max(group))
        chosen = []
        total = 0.0
        for m, n in ranked:
            if dsu.union(m, n):
                chosen.append((m, n))
                total += mceic.pair_cost(m, n)
        chosen.sort(key=lambda p: flat.sigma(*p))
        return chosen, total
    if all(classes[c - 1] == LOAD_ONLY for c in group):
        return None  # any connecting tree contains an unjustifiable load-load link
    if len(group) > POWER_GROUP_MAX:
        raise SizeLimitError(
            f"power-constrained group of {len(group)} components exceeds "
            f"the enumeration cap {POWER_GROUP_MAX}"
        )
    best: Optional[tuple[float, tuple[int, ...], list[tuple[int, int]]]] = None
    sorted_costs = sorted(mceic.pair_cost(*p) for p in links)
    for r in range(len(group) - 1, len(links) + 1):
        # any size-r selection costs at least the r cheapest links; once that
        # floor exceeds the incumbent no larger size can improve either
        if best is not None and sum(sorted_costs[:r]) > best[0] + 1e-9:
            break
        for sel in combinations(links, r):
            if not _spans(group, sel):
                continue
            if not _power_ok(sel, classes):
                continue
            total = sum(mceic.pair_cost(*p) for p in sel)
            key = (total, tuple(sorted(flat.sigma(*p) for p in sel)))
            if best is None or key < (best[0], best[1]):
                best = (key[0], key[1], sorted(sel, key=lambda p: flat.sigma(*p)))
    if best is None:
        return None
    return best[2], best[0]


def _plan_from_selection(
    model: ResponseModel,
    pairs: Sequence[tuple[int, int]],
) -> ReconstructionPlan:
    p = model.partition
    dsu = _DSU(p.count)
    for m, n in pairs:
        dsu.union(m, n)
    merged: dict[int, list[int]] = {}
    for c in range(1, p.count + 1):
        merged.setdefault(dsu.find(c), []).extend(p.components[c - 1])
    comps = tuple(
        tuple(sorted(nodes))
        for nodes in sorted(merged.values(), key=lambda ns: min(ns))
    )
    part = ComponentPartition(comps)
    total = sum(model.mceic.pair_cost(m, n) for m, n in pairs)
    rupture = -model.cut_size - part.largest_size + part.count
    links = tuple(model.mceic.pair_endpoint(m, n) for m, n in pairs)
    return ReconstructionPlan(tuple(pairs), links, total, part, rupture)


def solve_response(m: ResponseModel) -> ReconstructionPlan:
    """Exact minimizer of r = -|X| - m' + w' over budget-feasible MCEIC
    selections.

    Enumerates set partitions of the components; each merge group is priced
    by its cheapest connecting selection, so transitively redundant links
    never enter a plan.  Ties on the objective break by total cost, then by
    the flattened link positions.
    """
    p = m.partition
    s = p.count
    if s == 1:
        return _plan_from_selection(m, [])
    if s > SOLVER_MAX_COMPONENTS:
        raise SizeLimitError(
            f"{s} components exceed the response solver cap {SOLVER_MAX_COMPONENTS}"
        )
    flat = flatten(s)
    budget = m.effective_budget
    best: Optional[tuple[tuple[int, float, tuple[int, ...]], list[tuple[int, int]]]] = None
    sizes = p.sizes
    for groups in _set_partitions(s):
        pairs: list[tuple[int, int]] = []
        total = 0.0
        feasible = True
        for group in groups:
            conn = _connect_group(group, m.mceic, flat, m.component_class,
                                  m.power_constraint)
            if conn is None:
                feasible = False
                break
            pairs.extend(conn[0])
            total += conn[1]
        if not feasible or total > budget + 1e-9:
            continue
        omega = len(groups)
        largest = max(sum(sizes[c - 1] for c in group) for group in groups)
        r = -m.cut_size - largest + omega
        key = (r, round(total, 9), tuple(sorted(flat.sigma(*pr) for pr in pairs)))
        if best is None or key < best[0]:
            best = (key, sorted(pairs, key=lambda pr: flat.sigma(*pr)))
    if best is None:
        # the empty selection is always budget-feasible
        return _plan_from_selection(m, [])
    return _plan_from_selection(m, best[1])


def brute_force_response(m: ResponseModel) -> ReconstructionPlan:
    """Independent oracle: enumerate every subset of the flattened MCEIC
    links (budget-pruned) and score it from first principles."""
    s = m.partition.count
    if s == 1:
        return _plan_from_selection(m, [])
    flat = flatten(s)
    if flat.length > ORACLE_MAX_LINKS:
        raise SizeLimitError(
            f"{flat.length} candidate links exceed the oracle cap {ORACLE_MAX_LINKS}"
        )
    all_pairs = [flat.unsigma(z) for z in range(1, flat.length + 1)]
    budget = m.effective_budget
    sizes = m.partition.sizes
    best: Optional[tuple[tuple[int, float, tuple[int, ...]], list[tuple[int, int]]]] = None

    def score(selection: list[tuple[int, int]], total: float) -> None:
        nonlocal best
        if m.power_constraint and not _power_ok(selection, m.component_class):
            return
        dsu = _DSU(s)
        for a, b in selection:
            dsu.union(a, b)
        group_sizes: dict[int, int] = {}
        for c in range(1, s + 1):
            root = dsu.find(c)
            group_sizes[root] = group_sizes.get(root, 0) + sizes[c - 1]
        omega = len(group_sizes)
        r = -m.cut_size - max(group_sizes.values()) + omega
        key = (r, round(total, 9), tuple(sorted(flat.sigma(*pr) for pr in selection)))
        if best is None or key < best[0]:
            best = (key, list(selection))

    def rec(z: int, selection: list[tuple[int, int]], total: float) -> None:
        if z == len(all_pairs):
            score(selection, total)
            return
        pair = all_pairs[z]
        c = m.mceic.pair_cost(*pair)
        if total + c <= budget + 1e-9:
            selection.append(pair)
            rec(z + 1, selection, total + c)
            selection.pop()
        rec(z + 1, selection, total)

    rec(0, [], 0.0)
    assert best is not None  # the empty selection always scores
    return _plan_from_selection(m, best[1])


def apply_power_constraint(m: ResponseModel) -> ResponseModel:
    """Enable the generator-backing constraint for load-only component pairs."""
    if m.component_class is None:
        raise InputError("power constraint requires component classes")
    return replace(m, power_constraint=True)


def classify_components(g: Graph, p: ComponentPartition) -> tuple[str, ...]:
    """Label each component load-only or has-generator from node classes."""
    if g.node_class is None:
        raise InputError("graph has no node classes")
    labels = []
    for comp in p.components:
        if any(g.node_class[v - 1] == "generator" for v in comp):
            labels.append(HAS_GENERATOR)
        else:
            labels.append(LOAD_ONLY)
    return tuple(labels)


def dynamic_worst_cut(
    g: Graph, plan: ReconstructionPlan, attack: AttackModel
) -> AttackResult:
    """Re-solve the attack stage on the reconstructed graph (original graph
    plus the plan's realized links)."""
    rebuilt = g.add_edges(plan.links)
    return solve_attack(AttackModel(rebuilt, attack.budget, attack.attackable))
