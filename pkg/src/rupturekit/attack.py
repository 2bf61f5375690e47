"""Exact first-stage solver: find the budget-feasible node removal that
maximizes the rupture degree.

The search is a depth-first branch-and-bound over remove/keep decisions.
All consistency constraints of the companion MIP become deterministic once
the removal set is fixed, so leaves are scored exactly with the graph-core
routines; the full MIP remains available through the model-io export.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .cuts import LiftedCoverCut, TOL
from .errors import InputError
from .graph import (
    ComponentPartition,
    CutSet,
    Graph,
    RuptureScore,
    _component_masks,
    _mask_to_nodes,
    _nodes_to_mask,
    components,
    rupture_score,
)

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class AttackModel:
    """First-stage instance: which nodes may be removed and at what budget.

    `attackable` defaults to all nodes (targeted attack); the complement is
    treated as intact and is never removed (distributed attack).
    """

    graph: Graph
    budget: float
    attackable: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.budget < 0:
            raise InputError("attack budget must be nonnegative")
        if not self.attackable:
            object.__setattr__(self, "attackable", frozenset(self.graph.nodes))
        for v in self.attackable:
            if not (1 <= v <= self.graph.n):
                raise InputError(f"attackable node {v} out of range")

    @property
    def intact(self) -> frozenset[int]:
        return frozenset(self.graph.nodes) - self.attackable


@dataclass
class SolverStats:
    nodes_explored: int = 0
    cuts_applied: int = 0
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return {
            "nodes_explored": self.nodes_explored,
            "cuts_applied": self.cuts_applied,
            "wall_time": self.wall_time,
        }


@dataclass
class AttackResult:
    status: str
    cut: Optional[CutSet] = None
    score: Optional[RuptureScore] = None
    partition: Optional[ComponentPartition] = None
    stats: SolverStats = field(default_factory=SolverStats)
    # continuous optima of the relaxed variant, populated by
    # solve_attack_relaxed; integral at optimality
    relaxed_alpha: Optional[float] = None
    relaxed_b: Optional[tuple[float, ...]] = None

    @property
    def objective(self) -> Optional[int]:
        return None if self.score is None else self.score.rupture


def branch_bound_engine(
    model: AttackModel, cuts: Sequence[LiftedCoverCut] = ()
) -> AttackResult:
    """Depth-first branch-and-bound on remove/keep decisions.

    Branching order is descending degree then index; removal is tried first
    so good incumbents appear early.  Knapsack cuts (over the removal
    indicators) prune partial removals whose forced left-hand side already
    exceeds the cut's right-hand side.
    """
    for cut in cuts:
        if not cut.verified:
            raise InputError("unverified cut passed to the attack engine")
        if len(cut.coeffs) != model.graph.n:
            raise InputError("cut index space does not match the graph")

    g = model.graph
    if not g.is_connected():
        raise InputError("attack stage requires a connected graph")
    start = time.perf_counter()
    stats = SolverStats()
    order = sorted(model.attackable, key=lambda v: (-g.degree(v), v))
    adj = g._adj
    full = g._full_mask
    budget = model.budget
    cost = g.attack_cost

    # best = (rupture, |X|, sorted node tuple)
    best: list[Optional[tuple[int, int, tuple[int, ...]]]] = [None]

    def kept_stats(kept_mask: int) -> tuple[int, int]:
        masks = _component_masks(adj, kept_mask)
        if not masks:
            return 0, 0
        return max(m.bit_count() for m in masks), len(masks)

    def leaf(removed_mask: int) -> None:
        alive = full & ~removed_mask
        if alive == 0:
            return
        masks = _component_masks(adj, alive)
        omega = len(masks)
        if not (omega >= 2 or alive.bit_count() == 1):
            return  # not a cut set
        m = max(mm.bit_count() for mm in masks)
        size = removed_mask.bit_count()
        cand = (-size - m + omega, size, tuple(_mask_to_nodes(removed_mask)))
        b = best[0]
        if b is None or (-cand[0], cand[1], cand[2]) < (-b[0], b[1], b[2]):
            best[0] = cand

    def dfs(idx: int, removed_mask: int, kept_mask: int, spent: float,
            cut_lhs: list[int]) -> None:
        stats.nodes_explored += 1
        b = best[0]
        if b is not None:
            # Admissible bound.  With f nodes removed so far, kept set K and
            # u undecided nodes, any completion removes t >= 0 more nodes,
            # so |X| = f + t.  Components of the subgraph induced on K stay
            # connected in any completion, hence m >= max(1, m(K)); each
            # undecided survivor adds at most one new component, hence
            # omega <= comp(K) + (u - t).  Therefore
            #   r <= -(f+t) - max(1, m(K)) + comp(K) + u - t
            #     <= -f - max(1, m(K)) + comp(K) + u.
            f = removed_mask.bit_count()
            m_k, comp_k = kept_stats(kept_mask)
            u = len(order) - idx
            bound = -f - max(1, m_k) + comp_k + u
            # equal-bound subtrees with f > |best X| cannot improve the
            # cardinality-then-lex tie-break
            if bound < b[0] or (bound == b[0] and f > b[1]):
                return
        if idx == len(order):
            leaf(removed_mask)
            return
        v = order[idx]
        bit = 1 << (v - 1)
        # branch: remove v
        new_spent = spent + cost[v - 1]
        if new_spent <= budget + TOL:
            new_lhs = [lhs + c.coeffs[v - 1] for lhs, c in zip(cut_lhs, cuts)]
            violated = any(
                lhs > c.rhs for lhs, c in zip(new_lhs, cuts)
            )
            if violated:
                stats.cuts_applied += 1
            else:
                dfs(idx + 1, removed_mask | bit, kept_mask, new_spent, new_lhs)
        # branch: keep v
        dfs(idx + 1, removed_mask, kept_mask | bit, spent, cut_lhs)

    intact_mask = _nodes_to_mask(model.intact)
    dfs(0, 0, intact_mask, 0.0, [0] * len(cuts))
    stats.wall_time = time.perf_counter() - start

    if best[0] is None:
        return AttackResult(STATUS_INFEASIBLE, stats=stats)
    _, _, nodes = best[0]
    cut_set = CutSet(frozenset(nodes), True)
    # score and partition are recomputed independently of the search
    score = rupture_score(g, cut_set)
    part = components(g, cut_set.nodes)
    return AttackResult(STATUS_OPTIMAL, cut_set, score, part, stats)


def solve_attack(
    model: AttackModel, cuts: Sequence[LiftedCoverCut] = ()
) -> AttackResult:
    """Global maximizer of r = -|X| - m + w over budget-feasible cut sets."""
    return branch_bound_engine(model, cuts)


def solve_attack_relaxed(
    model: AttackModel, cuts: Sequence[LiftedCoverCut] = ()
) -> AttackResult:
    """Variant with the component-length and non-emptiness variables
    continuous.

    Once the removal set is fixed, the continuous optimum is attained in
    closed form: the objective pushes the largest-component length down to
    its binding value m and each non-emptiness indicator up to min(1, size),
    both integral.  The engine therefore reuses the combinatorial search and
    reports the continuous optimizers alongside.
    """
    result = branch_bound_engine(model, cuts)
    if result.status != STATUS_OPTIMAL:
        return result
    assert result.partition is not None and result.score is not None
    alpha = float(result.partition.largest_size)
    b = tuple(1.0 if size > 0 else 0.0 for size in result.partition.sizes)
    n = model.graph.n
    survivors = n - result.score.cut_size
    relaxed_obj = -(n - survivors) - alpha + sum(b)
    if abs(relaxed_obj - result.score.rupture) > 1e-9:
        raise AssertionError("relaxed objective disagrees with the integer optimum")
    result.relaxed_alpha = alpha
    result.relaxed_b = b
    return result


def attack_budget_knapsack(model: AttackModel) -> "KnapsackConstraint":
    """The budget constraint as a knapsack over removal indicators."""
    from .cuts import KnapsackConstraint

    return KnapsackConstraint(tuple(model.graph.attack_cost), model.budget)
