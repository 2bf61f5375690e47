"""Random instance generation, the two-stage pipeline, and budget sweeps.

Everything here is deterministic under a fixed seed so benchmark tables can
be regenerated byte-for-byte.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from .attack import (
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    AttackModel,
    AttackResult,
    SolverStats,
    attack_budget_knapsack,
    solve_attack,
)
from .errors import InputError
from .graph import CutSet, Graph, components, rupture_score, worst_cut_oracle
from .model_io import InstanceFile
from .response import (
    ReconstructionPlan,
    ResponseModel,
    brute_force_response,
    classify_components,
    dynamic_worst_cut,
    flatten,
    mceic_matrix,
    solve_response,
)

# link costs are drawn uniformly from {1.0, 1.1, ..., 3.0}
LINK_COST_CHOICES = tuple(round(1.0 + 0.1 * k, 1) for k in range(21))

PIPELINE_CSV_HEADER = (
    "instance,n,edges,budget_used,mceic_links,x_star_size,"
    "res_initial,res_reconstructed,x_dyn_size,res_dynamic"
)
SWEEP_CSV_HEADER = "budget,links_added,resilience,robustness"


@dataclass(frozen=True)
class BenchConfig:
    seed: int = 0
    count: int = 1
    n_min: int = 8
    n_max: int = 12
    edge_count: Optional[int] = None   # None: uniform in [n-1, min(2n, max)]
    budget_attack: Optional[float] = None   # None: floor(n/2)
    budget_response: Optional[float] = None  # None: unlimited

    def __post_init__(self):
        if self.count < 1:
            raise InputError("instance count must be >= 1")
        if not (1 <= self.n_min <= self.n_max):
            raise InputError("bad node-count range")


def default_attack_budget(n: int) -> float:
    return float(n // 2)


def gen_random(config: BenchConfig) -> list[InstanceFile]:
    """Connected instances: random spanning tree plus uniform extra edges;
    unit attack costs; link costs for every non-edge."""
    rng = random.Random(config.seed)
    out = []
    for _ in range(config.count):
        n = rng.randint(config.n_min, config.n_max)
        max_edges = n * (n - 1) // 2
        if config.edge_count is None:
            m = rng.randint(n - 1, min(2 * n, max_edges))
        else:
            m = config.edge_count
            if not (n - 1 <= m <= max_edges):
                raise InputError(
                    f"edge count {m} impossible for {n} nodes"
                )
        order = list(range(1, n + 1))
        rng.shuffle(order)
        edges = set()
        for idx in range(1, n):
            anchor = order[rng.randrange(idx)]
            v = order[idx]
            edges.add((min(anchor, v), max(anchor, v)))
        rest = [e for e in combinations(range(1, n + 1), 2) if e not in edges]
        edges.update(rng.sample(rest, m - len(edges)))
        link_cost = {
            e: rng.choice(LINK_COST_CHOICES)
            for e in combinations(range(1, n + 1), 2)
            if e not in edges
        }
        budget_a = (default_attack_budget(n) if config.budget_attack is None
                    else config.budget_attack)
        budget_r = (math.inf if config.budget_response is None
                    else config.budget_response)
        out.append(InstanceFile(
            n, tuple(sorted(edges)), (1.0,) * n, link_cost,
            None, budget_a, budget_r, "targeted", (),
        ))
    return out


@dataclass
class PipelineOutcome:
    instance_name: str
    instance: InstanceFile
    attack: AttackResult
    plan: Optional[ReconstructionPlan]
    dynamic: Optional[AttackResult]

    def csv_row(self) -> str:
        inst = self.instance
        mceic_links = 0
        if self.attack.partition is not None and self.attack.partition.count > 1:
            mceic_links = flatten(self.attack.partition.count).length
        used = 0.0 if self.plan is None else self.plan.total_cost
        res_init = "" if self.attack.score is None else self.attack.score.resilience
        res_rec = "" if self.plan is None else self.plan.resilience
        x_dyn = ""
        res_dyn = ""
        if self.dynamic is not None and self.dynamic.score is not None:
            x_dyn = self.dynamic.score.cut_size
            res_dyn = self.dynamic.score.resilience
        x_star = "" if self.attack.score is None else self.attack.score.cut_size
        return (
            f"{self.instance_name},{inst.n},{len(inst.edges)},{used:.6f},"
            f"{mceic_links},{x_star},{res_init},{res_rec},{x_dyn},{res_dyn}"
        )

    def table_row(self) -> str:
        if self.attack.status != STATUS_OPTIMAL or self.attack.score is None:
            return f"{self.instance_name}: no budget-feasible attack"
        cells = [
            f"|X*|={self.attack.score.cut_size}",
            f"res_attacked={self.attack.score.resilience}",
        ]
        if self.plan is not None:
            cells.append(f"res_reconstructed={self.plan.resilience}")
            cells.append(f"links_added={len(self.plan.links)}")
            cells.append(f"budget_used={self.plan.total_cost:.6f}")
        if self.dynamic is not None and self.dynamic.score is not None:
            cells.append(f"|X'*|={self.dynamic.score.cut_size}")
            cells.append(f"res_dynamic={self.dynamic.score.resilience}")
        return f"{self.instance_name}: " + "  ".join(cells)


def _designated_attack(inst: InstanceFile) -> AttackResult:
    """Stage one skipped: the removal set is given, only scoring remains."""
    g = inst.to_graph()
    cut = CutSet(frozenset(inst.attack_nodes), is_cut=True)
    score = rupture_score(g, cut)
    cut = CutSet(cut.nodes, score.is_cut)
    part = components(g, cut.nodes)
    return AttackResult(STATUS_OPTIMAL, cut, score, part, SolverStats(0, 0, 0.0))


def run_pipeline(
    inst: InstanceFile,
    name: str = "instance",
    oracle_check: bool = False,
    power: bool = False,
) -> PipelineOutcome:
    """attack -> response -> dynamic worst cut on one instance."""
    g = inst.to_graph()
    if inst.attack_type in ("designated", "random"):
        attack_res = _designated_attack(inst)
        model = AttackModel(g, inst.budget_attack
                            if inst.budget_attack is not None
                            else default_attack_budget(inst.n))
    else:
        budget = (inst.budget_attack if inst.budget_attack is not None
                  else default_attack_budget(inst.n))
        model = AttackModel(g, budget, inst.attackable_nodes())
        cuts = []
        if budget > 0:
            cuts = _safe_cuts(model)
        attack_res = solve_attack(model, cuts)
        if oracle_check and attack_res.status == STATUS_OPTIMAL:
            ref = worst_cut_oracle(g, budget, model.attackable)
            assert ref is not None and attack_res.score is not None
            if ref[1].rupture != attack_res.score.rupture:
                raise AssertionError("attack solver disagrees with the oracle")

    if attack_res.status != STATUS_OPTIMAL or attack_res.partition is None:
        return PipelineOutcome(name, inst, attack_res, None, None)

    part = attack_res.partition
    assert attack_res.score is not None
    if part.count > 1:
        mc = mceic_matrix(g, part)
        comp_class = classify_components(g, part) if power else None
        budget_r = inst.budget_response
        if budget_r is not None and math.isinf(budget_r):
            budget_r = None
        rm = ResponseModel(part, mc, budget_r, attack_res.score.cut_size,
                           comp_class, power)
        plan = solve_response(rm)
        if oracle_check:
            ref_plan = brute_force_response(rm)
            if ref_plan.rupture != plan.rupture:
                raise AssertionError("response solver disagrees with the oracle")
    else:
        # removing down to one component needs no reconstruction
        rm = ResponseModel(part, mceic_matrix(g, part), None,
                           attack_res.score.cut_size)
        plan = solve_response(rm)

    dynamic = dynamic_worst_cut(g, plan, model)
    return PipelineOutcome(name, inst, attack_res, plan, dynamic)


def _safe_cuts(model: AttackModel):
    """Budget-knapsack lifted covers, applicable only when every cut is
    verified; unit costs usually admit no cover, which is fine."""
    if model.budget <= 0:
        return []
    k = attack_budget_knapsack(model)
    from .cuts import cuts_for_knapsack

    if k.size > 24:  # verification enumerates 2^size points
        return []
    return cuts_for_knapsack(k)


def sweep_budget(
    inst: InstanceFile, grid: Sequence[float], name: str = "instance"
) -> list[str]:
    """CSV rows (budget, links_added, resilience, robustness) for a grid of
    response budgets against the fixed worst-case attack."""
    g = inst.to_graph()
    budget_a = (inst.budget_attack if inst.budget_attack is not None
                else default_attack_budget(inst.n))
    if inst.attack_type in ("designated", "random"):
        attack_res = _designated_attack(inst)
    else:
        model = AttackModel(g, budget_a, inst.attackable_nodes())
        attack_res = solve_attack(model, _safe_cuts(model))
    if attack_res.status != STATUS_OPTIMAL or attack_res.partition is None:
        raise InputError("budget sweep requires a solvable attack stage")
    part = attack_res.partition
    assert attack_res.score is not None
    mc = mceic_matrix(g, part)
    rows = [SWEEP_CSV_HEADER]
    attack_model = AttackModel(g, budget_a, inst.attackable_nodes())
    for b in grid:
        rm = ResponseModel(part, mc, None if math.isinf(b) else b,
                           attack_res.score.cut_size)
        plan = solve_response(rm)
        dyn = dynamic_worst_cut(g, plan, attack_model)
        robustness = dyn.score.cut_size if dyn.score is not None else 0
        label = "unlimited" if math.isinf(b) else f"{b:.6f}"
        rows.append(
            f"{label},{len(plan.links)},{plan.resilience},{robustness}"
        )
    return rows
