from fractions import Fraction as F

import pytest

from fcgp.graph import Graph, compute_profile
from fcgp.harness import gen_annotated, gen_degenerate, gen_gnp
from fcgp.instance import MAX, MIN, GuardViolation
from fcgp.solve import (
    BudgetExceeded,
    UndecidedWithinBudget,
    branch_decision_nodes,
    branch_degrading,
    brute_force,
    densest_vc,
    hindex_fpt_max,
    solve_auto,
    solve_bounded_degree,
    solve_third,
)

from conftest import annotated, complete_graph, path_graph, plain, seeded_instances, star_graph


# -- brute force ----------------------------------------------------------------

def test_brute_k3():
    inst = plain(complete_graph(3), 2, F(3, 2), F(1, 2), MAX)
    res = brute_force(inst)
    assert res.decision and res.best_value == F(3, 2) and res.witness == (0, 1)


def test_brute_p3_min_leaf():
    inst = plain(path_graph(3), 1, 1, F(1), MIN)
    res = brute_force(inst)
    assert res.decision and res.best_value == 1 and res.witness == (0,)


def test_brute_matches_independent_reenumeration():
    for seed in range(10):
        g = gen_gnp(10, 1, 2, seed + 50)
        inst = plain(g, 3, 2, F(2, 5), MAX)
        res = brute_force(inst)
        # second, slower enumeration in reverse order
        from itertools import combinations

        best = None
        for combo in combinations(range(9, -1, -1), 3):
            value = inst.val(combo)
            if best is None or value > best:
                best = value
        assert res.best_value == best


def test_brute_budget():
    g = gen_gnp(24, 1, 2, 1)
    with pytest.raises(BudgetExceeded):
        brute_force(plain(g, 12, 0, F(1, 2), MAX), budget=1000)


def test_brute_infeasible_k():
    inst = plain(path_graph(3), 5, 0, F(1, 2), MAX)
    res = brute_force(inst)
    assert not res.decision and res.best_value is None


def test_brute_respects_t_set():
    inst = annotated(path_graph(4), [0], {}, 2, 0, F(1, 2), MAX)
    res = brute_force(inst)
    assert 0 in res.witness


# -- branch_degrading --------------------------------------------------------------

def test_branch_immediate_accept_on_independent_layer():
    # large independent L accepts without deep branching
    g = Graph.from_edges(12, [])
    inst = annotated(g, [], {v: 2 for v in range(12)}, 3, 3, F(1, 2), MAX)
    res = branch_degrading(inst, 0)
    assert res.decision and res.best_value == 3
    assert inst.val(res.witness) >= inst.t


def test_branch_empty_layer_is_no():
    inst = plain(path_graph(4), 2, 100, F(1, 2), MAX)
    res = branch_degrading(inst, 1)
    assert not res.decision


def test_branch_guard():
    with pytest.raises(GuardViolation):
        branch_degrading(plain(path_graph(3), 1, 0, F(1, 4), MAX), 1)
    with pytest.raises(GuardViolation):
        branch_degrading(plain(path_graph(3), 1, 0, F(0), MIN), 1)


@pytest.mark.parametrize("variant,alpha", [(MAX, F(1, 2)), (MAX, F(1)), (MIN, F(1, 4)), (MIN, F(1, 6))])
def test_branch_agrees_with_brute(variant, alpha):
    for _, inst in seeded_instances(40, alpha, variant, base_seed=12_000):
        sub, _ = inst.graph.induced(inst.alive_vertices())
        d = compute_profile(sub).degeneracy
        ref = brute_force(inst)
        res = branch_degrading(inst, d)
        assert res.decision == ref.decision
        if ref.decision:
            assert res.best_value == ref.best_value
            assert res.witness == ref.witness


def test_branch_node_bound():
    for seed in range(10):
        g = gen_degenerate(10, 2, seed + 70)
        d = compute_profile(g).degeneracy
        inst = gen_annotated(g, seed, F(1, 2), MAX, (1, 3), (0, 1))
        nodes = branch_decision_nodes(inst, d)
        assert nodes <= ((d + 1) * inst.k + 1) ** inst.k + 1


# -- alpha = 1/3 ---------------------------------------------------------------------

def test_third_star_max_center():
    inst = plain(star_graph(4), 1, F(4, 3), F(1, 3), MAX)
    res = solve_third(inst)
    assert res.decision and res.best_value == F(4, 3) and res.witness == (0,)


def test_third_star_min_leaf():
    inst = plain(star_graph(4), 1, F(1, 3), F(1, 3), MIN)
    res = solve_third(inst)
    assert res.decision and res.best_value == F(1, 3) and res.witness == (1,)


def test_third_agrees_with_brute():
    for variant in (MAX, MIN):
        for _, inst in seeded_instances(40, F(1, 3), variant, base_seed=13_000):
            ref = brute_force(inst)
            res = solve_third(inst)
            assert (res.decision, res.best_value) == (ref.decision, ref.best_value)


def test_third_guard():
    with pytest.raises(GuardViolation):
        solve_third(plain(path_graph(3), 1, 0, F(1, 2), MAX))


# -- bounded-degree component solver ----------------------------------------------------

def test_bounded_two_disjoint_edges():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    inst = plain(g, 2, 1, F(0), MAX)
    res = solve_bounded_degree(inst)
    assert res.decision and res.best_value == 1 and res.witness in ((0, 1), (2, 3))


def test_bounded_all_singletons_top_bonuses():
    g = Graph.from_edges(4, [])
    inst = annotated(g, [], {0: 1, 1: 5, 2: 3, 3: 0}, 2, 4, F(1, 2), MAX)
    res = solve_bounded_degree(inst)
    assert res.decision and res.best_value == F(8, 2)
    assert res.witness == (1, 2)


@pytest.mark.parametrize("variant,alpha", [(MAX, F(1, 2)), (MIN, F(1, 4)), (MAX, F(0)), (MIN, F(1))])
def test_bounded_agrees_with_brute(variant, alpha):
    for _, inst in seeded_instances(40, alpha, variant, base_seed=14_000):
        ref = brute_force(inst)
        res = solve_bounded_degree(inst)
        assert (res.decision, res.best_value) == (ref.decision, ref.best_value)


def test_bounded_budget():
    g = complete_graph(26)
    with pytest.raises(BudgetExceeded):
        solve_bounded_degree(plain(g, 13, 0, F(1, 2), MAX), budget=1000)


# -- h-index FPT ----------------------------------------------------------------------

def test_hindex_no_hubs_single_residual():
    inst = plain(path_graph(6), 2, 1, F(1, 4), MAX)
    h = compute_profile(path_graph(6)).h_index
    res = hindex_fpt_max(inst, h)
    ref = brute_force(inst)
    assert (res.decision, res.best_value) == (ref.decision, ref.best_value)


def test_hindex_star_instances():
    for leaves in (4, 6, 8):
        g = star_graph(leaves)
        for t in (0, 1, 2, 5):
            inst = plain(g, 2, t, F(1, 4), MAX)
            res = hindex_fpt_max(inst, 1)
            ref = brute_force(inst)
            assert (res.decision, res.best_value) == (ref.decision, ref.best_value)


@pytest.mark.parametrize("alpha", [F(0), F(1, 4)])
def test_hindex_agrees_with_brute(alpha):
    for _, inst in seeded_instances(40, alpha, MAX, base_seed=15_000):
        sub, _ = inst.graph.induced(inst.alive_vertices())
        h = compute_profile(sub).h_index
        ref = brute_force(inst)
        res = hindex_fpt_max(inst, h)
        assert (res.decision, res.best_value) == (ref.decision, ref.best_value)
        if res.decision:
            assert res.check_witness(inst)


def test_hindex_guard():
    with pytest.raises(GuardViolation):
        hindex_fpt_max(plain(path_graph(3), 1, 0, F(1, 2), MAX), 1)


def test_hindex_branch_budget():
    g = star_graph(9)
    inst = plain(g, 3, 1, F(1, 4), MAX)
    with pytest.raises(BudgetExceeded):
        hindex_fpt_max(inst, 1, branch_budget=1)


# -- densest k-subgraph with vertex cover -------------------------------------------------

def test_densest_k4_triangle():
    inst = plain(complete_graph(4), 3, 3, F(0), MAX)
    cover = compute_profile(complete_graph(4), want_vc=True).vertex_cover
    res = densest_vc(inst, cover)
    assert res.decision and res.best_value == 3


def test_densest_star_center_plus_leaves():
    inst = plain(star_graph(4), 3, 2, F(0), MAX)
    res = densest_vc(inst, (0,))
    assert res.decision and res.best_value == 2 and 0 in res.witness


def test_densest_agrees_with_brute():
    for _, inst in seeded_instances(40, F(0), MAX, base_seed=16_000, allow_t=False, counters=(0, 0)):
        sub, _ = inst.graph.induced(inst.alive_vertices())
        cover = compute_profile(sub, want_vc=True).vertex_cover
        ref = brute_force(inst)
        res = densest_vc(inst, cover)
        assert (res.decision, res.best_value) == (ref.decision, ref.best_value)


def test_densest_rejects_bad_cover():
    inst = plain(path_graph(4), 2, 1, F(0), MAX)
    with pytest.raises(GuardViolation, match="uncovered"):
        densest_vc(inst, (0,))


# -- auto routing ----------------------------------------------------------------------------

def test_auto_routes_and_agrees():
    routes = set()
    for variant in (MAX, MIN):
        for alpha in (F(0), F(1, 4), F(1, 3), F(1, 2), F(1)):
            for _, inst in seeded_instances(8, alpha, variant, base_seed=17_000):
                ref = brute_force(inst)
                res = solve_auto(inst)
                assert res.decision == ref.decision
                if res.decision:
                    assert res.check_witness(inst)
                routes.add(res.solver_id)
    assert "auto:third" in routes
    assert "auto:branch" in routes
    assert any(r in routes for r in ("auto:brute", "auto:hindex", "auto:densest-vc"))


def test_auto_min_trivial_route():
    g = gen_degenerate(9, 2, 3)
    d = compute_profile(g).degeneracy
    inst = plain(g, 3, d * 3 + 1, F(1, 4), MIN)
    res = solve_auto(inst)
    assert res.decision and res.solver_id == "auto:min-trivial"
    assert inst.val(res.witness) <= inst.t


def test_auto_undecided_within_budget():
    g = gen_gnp(26, 1, 2, 9)
    inst = plain(g, 13, 40, F(5, 12), MAX)
    with pytest.raises(UndecidedWithinBudget):
        solve_auto(inst, budget=500)
