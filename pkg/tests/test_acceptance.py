"""Acceptance gate: nine independently checkable criteria, each reported
with a single pass/fail line on the terminal.

Solver answers are always cross-checked against a second, structurally
different route (exhaustive enumeration, closed-form identities, or the
published anchor values bundled with the fixtures)."""

import itertools
import json
import math
import random
import time

import pytest

from rupturekit.attack import (
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    AttackModel,
    solve_attack,
    solve_attack_relaxed,
)
from rupturekit.bench import BenchConfig, gen_random, sweep_budget
from rupturekit.cuts import KnapsackConstraint, cuts_for_knapsack, verify_cut
from rupturekit.graph import Graph, components, rupture_score, worst_cut_oracle
from rupturekit.model_io import export_mip, result_to_json
from rupturekit.response import (
    ResponseModel,
    brute_force_response,
    classify_components,
    flatten,
    mceic_matrix,
    solve_response,
)


def _report(capsys, num, ok, desc):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {num}: {desc}")
    assert ok, f"criterion {num} failed: {desc}"


def _attack_bench_instances(count=200):
    return gen_random(BenchConfig(seed=20260826, count=count, n_min=6, n_max=12))


def test_criterion_1_attack_oracle_equivalence(capsys):
    start = time.monotonic()
    ok = True
    for inst in _attack_bench_instances():
        g = inst.to_graph()
        res = solve_attack(AttackModel(g, inst.budget_attack))
        ref = worst_cut_oracle(g, inst.budget_attack)
        if ref is None:
            ok = ok and res.status == STATUS_INFEASIBLE
        else:
            ok = (ok and res.status == STATUS_OPTIMAL
                  and res.score.rupture == ref[1].rupture)
    elapsed = time.monotonic() - start
    ok = ok and elapsed < 60.0
    _report(capsys, 1, ok,
            f"attack solver equals enumeration oracle on 200 instances "
            f"({elapsed:.1f}s < 60s)")


def test_criterion_2_relaxation_equivalence(capsys):
    ok = True
    for inst in _attack_bench_instances():
        model = AttackModel(inst.to_graph(), inst.budget_attack)
        exact = solve_attack(model)
        relaxed = solve_attack_relaxed(model)
        if exact.status != STATUS_OPTIMAL:
            ok = ok and relaxed.status != STATUS_OPTIMAL
            continue
        ok = ok and relaxed.score.rupture == exact.score.rupture
        ok = ok and abs(relaxed.relaxed_alpha - round(relaxed.relaxed_alpha)) <= 1e-9
        ok = ok and all(abs(b - round(b)) <= 1e-9 for b in relaxed.relaxed_b)
    _report(capsys, 2, ok,
            "relaxed objectives match the integer optimum with alpha, b "
            "integral within 1e-9 on 200 instances")


def test_criterion_3_response_reduction(capsys):
    rng = random.Random(33)
    checked = 0
    ok = True
    seed = 0
    while checked < 100:
        seed += 1
        inst = gen_random(BenchConfig(seed=seed, count=1, n_min=8, n_max=12))[0]
        g = inst.to_graph()
        res = solve_attack(AttackModel(g, inst.budget_attack))
        if res.status != STATUS_OPTIMAL or not (2 <= res.partition.count <= 7):
            continue
        budget = rng.choice([1.5, 2.5, 3.5, 5.0])
        m = ResponseModel(res.partition, mceic_matrix(g, res.partition),
                          budget, res.score.cut_size)
        solved = solve_response(m)
        brute = brute_force_response(m)
        ok = ok and solved.rupture == brute.rupture
        checked += 1
    _report(capsys, 3, ok,
            "response solver equals MCEIC subset enumeration on 100 "
            "attacked instances with s <= 7")


def test_criterion_4_lci_validity(capsys):
    rng = random.Random(44)
    ok = True
    emitted = 0
    for _ in range(500):
        n = rng.randint(3, 16)
        if rng.random() < 0.5:
            weights = tuple(float(rng.randint(1, 9)) for _ in range(n))
        else:
            weights = tuple(round(rng.randint(1, 99) / 10, 1) for _ in range(n))
        cap = round(rng.uniform(min(weights), max(sum(weights) - 0.5, 1.0)), 1)
        k = KnapsackConstraint(weights, max(cap, 0.5))
        for cut in cuts_for_knapsack(k):
            emitted += 1
            ok = ok and cut.verified and cut.dominates_ci
            # re-verify from scratch so the emitter's own flag is not trusted
            for bits in itertools.product((0, 1), repeat=n):
                if sum(w * x for w, x in zip(weights, bits)) <= k.capacity + 1e-9:
                    if sum(c * x for c, x in zip(cut.coeffs, bits)) > cut.rhs:
                        ok = False
                        break
            if not ok:
                break
        if not ok:
            break
    fixture = KnapsackConstraint((4.0, 3.0, 3.0, 6.0), 6.0)
    strong = [c for c in cuts_for_knapsack(fixture)
              if c.coeffs == (1, 1, 0, 1) and c.rhs == 1]
    ok = ok and bool(strong)
    _report(capsys, 4, ok,
            f"all {emitted} lifted cuts over 500 random knapsacks are valid "
            "and dominate their CI; (4,3,3,6)/6 yields x1+x2+x4 <= 1")


def test_criterion_5_link_addition_inequalities(capsys):
    rng = random.Random(55)
    ok = True
    checked = 0
    while checked < 1000:
        inst = gen_random(BenchConfig(seed=rng.randint(0, 10 ** 6), count=1,
                                      n_min=6, n_max=12))[0]
        g = inst.to_graph()
        nodes = list(g.nodes)
        cut = rng.sample(nodes, rng.randint(1, g.n // 2))
        part = components(g, cut)
        if part.count < 2:
            continue
        cm, cn = rng.sample(range(part.count), 2)
        i = rng.choice(part.components[cm])
        j = rng.choice(part.components[cn])
        before = rupture_score(g, cut)
        after = rupture_score(g.add_edges([(min(i, j), max(i, j))]), cut)
        ok = ok and after.rupture <= before.rupture - 1
        L = len(part.components[cm])
        K = len(part.components[cn])
        if L + K > before.largest:
            ok = ok and after.rupture <= before.rupture - 1 - (L + K - before.largest)
        checked += 1
    _report(capsys, 5, ok,
            "r(G-X+e) <= r(G-X)-1 on 1000 sampled triples, with the "
            "strengthened bound whenever L+K > m")


def test_criterion_6_nine_node_anchors(capsys, nine_node):
    g = nine_node.to_graph()
    res = solve_attack(AttackModel(g, 1.0))
    ok = (res.cut.nodes == frozenset({5})
          and res.score.resilience == -1)
    part = components(g, [5])
    ok = ok and part.components == ((1, 2, 3), (4,), (6, 7), (8,), (9,))
    mc = mceic_matrix(g, part)
    plan15 = solve_response(ResponseModel(part, mc, 1.5, 1))
    ok = ok and plan15.links == ((1, 4),) and plan15.resilience == 1
    plan_inf = solve_response(ResponseModel(part, mc, None, 1))
    ok = ok and plan_inf.resilience == 8
    _report(capsys, 6, ok,
            "9-node anchors: resilience -1 under X={5}; link 1-4 and "
            "resilience 1 at budget 1.5; resilience 8 unlimited")


def test_criterion_7_ieee_14_bus(capsys, ieee14, tmp_path):
    g = ieee14.to_graph()
    part = components(g, [2, 4, 6, 9])
    expected = ((1, 5), (3,), (7, 8), (10, 11), (12, 13, 14))
    ok = part.components == expected
    attacked = rupture_score(g, [2, 4, 6, 9])
    classes = classify_components(g, part)
    m = ResponseModel(part, mceic_matrix(g, part), 3.0, 4, classes, True)
    plan = solve_response(m)
    ok = ok and len(plan.links) == 2
    ok = ok and plan.rupture == brute_force_response(m).rupture
    # computed values differ from the published summary table; the result
    # file must record both readings rather than silently pick one
    notes = [
        f"computed attacked resilience {attacked.resilience}; the published "
        "summary table prints 1 for the same cut set",
        f"computed reconstructed resilience {plan.resilience}; the published "
        "summary table prints 7 for the same two-link plan",
    ]
    doc = result_to_json("ieee14", plan=plan, notes=notes)
    out = tmp_path / "ieee14_result.json"
    out.write_text(doc)
    parsed = json.loads(out.read_text())
    ok = ok and len(parsed["notes"]) == 2
    _report(capsys, 7, ok,
            "14-bus: five expected components under X={2,4,6,9}; exactly 2 "
            "links at budget 3; deviations recorded in the result file")


def test_criterion_8_flatten_and_export_determinism(capsys, nine_node, ieee14):
    ok = True
    for s in range(2, 51):
        f = flatten(s)
        seen = set()
        for mn in itertools.combinations(range(1, s + 1), 2):
            z = f.sigma(*mn)
            ok = ok and f.unsigma(z) == mn and 1 <= z <= f.length
            seen.add(z)
        ok = ok and len(seen) == f.length
    for inst, which, cut in [
        (nine_node, "attack", None),
        (nine_node, "response", [5]),
        (nine_node, "reduced", [5]),
        (ieee14, "reduced", [2, 4, 6, 9]),
    ]:
        a = export_mip(inst, which, cut, power=(inst is ieee14))
        b = export_mip(inst, which, cut, power=(inst is ieee14))
        ok = ok and a == b and len(a) > 0
    _report(capsys, 8, ok,
            "sigma flattening is a bijection for all s <= 50 and every "
            "formulation export is byte-identical across runs")


def test_criterion_9_budget_monotonicity(capsys, nine_node):
    ok = True
    grids = {"nine_node": (nine_node, [0.0, 0.5, 1.0, 1.5, 2.5, 3.8, 5.3, math.inf])}
    for idx, inst in enumerate(gen_random(
            BenchConfig(seed=99, count=5, n_min=7, n_max=10))):
        grids[f"rand{idx}"] = (inst, [0.0, 1.0, 2.0, 3.0, math.inf])
    for name, (inst, grid) in grids.items():
        g = inst.to_graph()
        budget_a = inst.budget_attack if inst.budget_attack is not None else g.n // 2
        base = solve_attack(AttackModel(g, budget_a))
        if base.status != STATUS_OPTIMAL:
            continue
        rows = sweep_budget(inst, grid, name)
        res = [int(r.split(",")[2]) for r in rows[1:]]
        ok = ok and res == sorted(res)
        ok = ok and res[0] == base.score.resilience  # zero-budget row
    _report(capsys, 9, ok,
            "sweep resilience is non-decreasing in the response budget and "
            "the zero-budget row equals the attacked score")
