import random

import pytest

from rupturekit.attack import (
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    AttackModel,
    attack_budget_knapsack,
    solve_attack,
    solve_attack_relaxed,
)
from rupturekit.bench import BenchConfig, gen_random
from rupturekit.cuts import cuts_for_knapsack
from rupturekit.errors import InputError
from rupturekit.graph import Graph, worst_cut_oracle


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(1, n)])


def star(n):
    return Graph(n, [(1, i) for i in range(2, n + 1)])


class TestAttackModel:
    def test_defaults_to_all_attackable(self):
        m = AttackModel(path_graph(4), 1.0)
        assert m.attackable == frozenset({1, 2, 3, 4})
        assert m.intact == frozenset()

    def test_intact_complement(self):
        m = AttackModel(path_graph(4), 1.0, frozenset({2, 3}))
        assert m.intact == frozenset({1, 4})

    def test_negative_budget_rejected(self):
        with pytest.raises(InputError):
            AttackModel(path_graph(4), -1.0)


class TestSolveAttack:
    def test_star_removes_center(self):
        res = solve_attack(AttackModel(star(6), 2.0))
        assert res.status == STATUS_OPTIMAL
        assert res.cut.nodes == frozenset({1})
        assert res.score.rupture == 3

    def test_infeasible_clique(self):
        g = Graph(4, [(i, j) for i in range(1, 5) for j in range(i + 1, 5)])
        res = solve_attack(AttackModel(g, 1.0))
        assert res.status == STATUS_INFEASIBLE
        assert res.cut is None

    def test_tie_break_matches_oracle(self):
        g = path_graph(7)
        res = solve_attack(AttackModel(g, 3.0))
        cut, sc = worst_cut_oracle(g, 3.0)
        assert res.score.rupture == sc.rupture
        assert res.cut.nodes == cut.nodes

    def test_distributed_attack_respects_intact(self):
        g = path_graph(5)
        res = solve_attack(AttackModel(g, 2.0, frozenset({3, 4})))
        assert res.status == STATUS_OPTIMAL
        assert res.cut.nodes <= {3, 4}

    def test_nonunit_costs(self):
        g = path_graph(5)
        g = Graph(5, g.edges, attack_cost=(1.0, 5.0, 1.0, 5.0, 1.0))
        res = solve_attack(AttackModel(g, 2.0))
        cut, sc = worst_cut_oracle(g, 2.0)
        assert res.score.rupture == sc.rupture

    def test_budget_cuts_do_not_change_optimum(self):
        g = path_graph(9)
        model = AttackModel(g, 4.0)
        plain = solve_attack(model)
        k = attack_budget_knapsack(model)
        with_cuts = solve_attack(model, cuts_for_knapsack(k))
        assert with_cuts.score.rupture == plain.score.rupture
        assert with_cuts.cut.nodes == plain.cut.nodes

    def test_rejects_unverified_cut(self):
        from rupturekit.cuts import LiftedCoverCut

        g = path_graph(4)
        fake = LiftedCoverCut((1, 1, 1, 1), 1, 1.0, frozenset({1, 2}),
                              frozenset())
        with pytest.raises(InputError):
            solve_attack(AttackModel(g, 2.0), [fake])

    def test_disconnected_input_rejected(self):
        g = Graph(4, [(1, 2), (3, 4)])
        with pytest.raises(InputError):
            solve_attack(AttackModel(g, 1.0))


class TestRelaxation:
    def test_relaxed_matches_integer_optimum(self):
        res = solve_attack_relaxed(AttackModel(star(6), 2.0))
        assert res.relaxed_alpha == 1.0
        assert all(b in (0.0, 1.0) for b in res.relaxed_b)

    def test_relaxed_on_random_instances(self):
        for inst in gen_random(BenchConfig(seed=5, count=10, n_min=6, n_max=9)):
            model = AttackModel(inst.to_graph(), inst.budget_attack)
            exact = solve_attack(model)
            relaxed = solve_attack_relaxed(model)
            if exact.status != STATUS_OPTIMAL:
                assert relaxed.status != STATUS_OPTIMAL
                continue
            assert relaxed.score.rupture == exact.score.rupture
            assert abs(relaxed.relaxed_alpha - round(relaxed.relaxed_alpha)) <= 1e-9
            for b in relaxed.relaxed_b:
                assert abs(b - round(b)) <= 1e-9


class TestAgainstOracleRandom:
    def test_fifty_random_instances(self):
        rng = random.Random(11)
        for inst in gen_random(BenchConfig(seed=11, count=50, n_min=6, n_max=10)):
            g = inst.to_graph()
            budget = inst.budget_attack
            res = solve_attack(AttackModel(g, budget))
            ref = worst_cut_oracle(g, budget)
            if ref is None:
                assert res.status == STATUS_INFEASIBLE
            else:
                assert res.status == STATUS_OPTIMAL
                assert res.score.rupture == ref[1].rupture
                # full incumbent tie-break must agree with the enumeration
                assert res.cut.nodes == ref[0].nodes
