import random
from fractions import Fraction as F
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fcgp.graph import Graph
from fcgp.harness import gen_gnp
from fcgp.instance import (
    MAX,
    MIN,
    AnnotatedInstance,
    GuardViolation,
    PlainInstance,
    deannotate_max,
    deannotate_min,
    lift_witness,
    telescope_check,
)
from fcgp.solve import brute_force

from conftest import annotated, complete_graph, path_graph, plain, star_graph


# -- val ------------------------------------------------------------------------

def test_val_p3_center():
    inst = plain(path_graph(3), 1, 1, F(1, 2), MAX)
    assert inst.val([1]) == 1


def test_val_k3_pair_third():
    inst = plain(complete_graph(3), 2, 0, F(1, 3), MAX)
    assert inst.val([0, 1]) == F(4, 3)


def test_val_counter_term():
    inst = annotated(Graph.from_edges(1, []), [], {0: 2}, 1, 0, F(1, 2), MAX)
    assert inst.val([0]) == 1


# -- contribution ----------------------------------------------------------------

def test_contribution_p3_center():
    inst = annotated(path_graph(3), [0], {}, 2, 0, F(1, 2), MAX)
    assert inst.contribution(1, [0]) == F(1, 2)


def test_contribution_third_is_degree_over_three():
    inst = plain(complete_graph(4), 2, 0, F(1, 3), MAX)
    for v in range(4):
        assert inst.contribution(v, []) == F(3, 3)


def test_contribution_isolated_bonus():
    g = Graph.from_edges(3, [(1, 2)])
    inst = annotated(g, [1], {0: 5}, 2, 0, F(1, 4), MAX)
    assert inst.contribution(0, [1]) == F(5, 4)


# -- telescoping -------------------------------------------------------------------

def test_telescope_k3_pair():
    inst = plain(complete_graph(3), 2, 0, F(1, 2), MAX)
    assert telescope_check(inst, [0, 1]) == inst.val([0, 1]) == F(3, 2)


def test_telescope_empty():
    inst = plain(complete_graph(3), 1, 0, F(1, 2), MAX)
    assert telescope_check(inst, []) == 0


def test_telescope_random_orderings():
    rng = random.Random(7)
    for seed in range(25):
        g = gen_gnp(8, 1, 2, seed)
        inst = annotated(g, [], {v: rng.randint(0, 2) for v in range(8)}, 4, 0, F(2, 5), MAX)
        verts = rng.sample(range(8), 4)
        assert telescope_check(inst, verts) == inst.val(verts)


def test_telescope_rejects_repeats():
    inst = plain(path_graph(3), 2, 0, F(1, 2), MAX)
    with pytest.raises(GuardViolation):
        telescope_check(inst, [1, 1])


# -- better / strictly better -------------------------------------------------------

def test_better_at_third_is_degree_order():
    inst = plain(star_graph(4), 1, 0, F(1, 3), MAX)
    assert inst.is_strictly_better(0, 1)  # center dominates a leaf
    assert not inst.is_strictly_better(1, 0)


def test_strictly_better_margin_example():
    g = Graph.from_edges(13, [(0, i) for i in range(1, 11)] + [(11, 12)])
    inst = plain(g, 2, 0, F(1, 2), MAX)
    # deg+(0)=10, deg+(11)=1: 1/2 <= 5 - 1
    assert inst.is_strictly_better(0, 11)


def test_strictly_better_at_third_is_deg_plus_order():
    # zero margin at alpha = 1/3: the relation collapses to comparing deg+
    g = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)])
    inst = annotated(g, [], {3: 2}, 2, 0, F(1, 3), MAX)
    assert inst.is_strictly_better(0, 1)  # deg+ 3 vs 2
    assert inst.is_strictly_better(1, 2) and inst.is_strictly_better(2, 1)  # tie
    assert inst.is_strictly_better(3, 2)  # deg+ 1+2 vs 2
    assert not inst.is_strictly_better(2, 0)


def test_better_at_alpha_zero_min():
    g = Graph.from_edges(3, [(0, 1)])
    inst = annotated(g, [0], {}, 2, 0, F(0), MIN)
    # alpha=0 min: fewer T-neighbors is better
    assert inst.is_better(2, 1, [0]) is True
    assert inst.is_better(1, 2, [0]) is False


# -- include / exclude ----------------------------------------------------------------

def test_include_zero_bonus_only_grows_t_set():
    inst = plain(path_graph(3), 2, 5, F(1, 2), MAX)
    nxt = inst.include(1)
    assert nxt.t == inst.t and nxt.t_vertices() == (1,)


def test_include_folds_bonus():
    g = Graph.from_edges(2, [])
    inst = annotated(g, [], {0: 3}, 1, 2, F(1, 2), MAX)
    nxt = inst.include(0)
    assert nxt.t == 2 - F(3, 2) and nxt.bonus[0] == 0


def test_exclude_isolated_is_pure_deletion():
    g = Graph.from_edges(3, [(1, 2)])
    inst = plain(g, 1, 0, F(1, 2), MAX)
    nxt = inst.exclude(0)
    assert nxt.n_alive == 2 and nxt.t == inst.t and all(b == 0 for b in nxt.bonus)


def test_exclude_p3_center_gives_leaf_bonuses():
    inst = plain(path_graph(3), 1, 0, F(1, 2), MAX)
    nxt = inst.exclude(1)
    assert nxt.bonus[0] == F(1, 2) and nxt.bonus[2] == F(1, 2)
    assert nxt.degree(0) == 0 and nxt.degree(2) == 0


def _restricted_optimum(inst, v, want_in):
    best = None
    free = [u for u in inst.free_vertices() if u != v]
    base = list(inst.t_vertices()) + ([v] if want_in else [])
    need = inst.k - len(base)
    if need < 0 or need > len(free):
        return None
    sign = 1 if inst.variant == MAX else -1
    for combo in combinations(free, need):
        value = inst.val(base + list(combo))
        if best is None or sign * (value - best) > 0:
            best = value
    return best


@pytest.mark.parametrize("variant,alpha", [(MAX, F(1, 2)), (MIN, F(1, 4)), (MAX, F(1, 3)), (MIN, F(1))])
def test_include_matches_restricted_solve(variant, alpha):
    for seed in range(12):
        g = gen_gnp(8, 1, 2, seed + 300)
        inst = annotated(g, [], {v: (seed + v) % 3 for v in range(8)}, 3, 2, alpha, variant)
        v = seed % 8
        restricted = _restricted_optimum(inst, v, want_in=True)
        after = inst.include(v)
        got = brute_force(after)
        if restricted is None:
            assert got.best_value is None
        else:
            assert got.best_value + (inst.t - after.t) == restricted


@pytest.mark.parametrize("variant,alpha", [(MAX, F(1, 2)), (MIN, F(1, 4)), (MAX, F(0)), (MIN, F(2, 3))])
def test_exclude_matches_restricted_solve(variant, alpha):
    for seed in range(12):
        g = gen_gnp(8, 1, 2, seed + 600)
        inst = annotated(g, [], {v: (seed + v) % 2 for v in range(8)}, 3, 2, alpha, variant)
        v = (seed * 3) % 8
        restricted = _restricted_optimum(inst, v, want_in=False)
        after = inst.exclude(v)
        got = brute_force(after)
        if restricted is None:
            assert got.best_value is None
        else:
            assert got.best_value + (inst.t - after.t) == restricted


def test_exclude_rejects_t_member():
    inst = annotated(path_graph(3), [1], {}, 2, 0, F(1, 2), MAX)
    with pytest.raises(GuardViolation):
        inst.exclude(1)


# -- modularity --------------------------------------------------------------------

@given(st.integers(0, 2**40 - 1), st.sampled_from([F(0), F(1, 4), F(1, 3), F(1, 2), F(1)]))
@settings(max_examples=200, deadline=None)
def test_modularity_direction(bits, alpha):
    rng = random.Random(bits)
    g = gen_gnp(7, 1, 2, bits % 997)
    inst = plain(g, 3, 0, alpha, MAX)
    xs = {v for v in range(7) if (bits >> v) & 1}
    ys = xs | {v for v in range(7) if (bits >> (v + 7)) & 1}
    outside = [v for v in range(7) if v not in ys]
    if not outside:
        return
    v = outside[bits % len(outside)]
    dx = inst.val(xs | {v}) - inst.val(xs)
    dy = inst.val(ys | {v}) - inst.val(ys)
    if alpha > F(1, 3):
        assert dx >= dy
    elif alpha < F(1, 3):
        assert dx <= dy
    else:
        assert dx == dy


# -- de-annotation ---------------------------------------------------------------------

def test_deannotate_max_single_vertex_counter2():
    g = Graph.from_edges(1, [])
    inst = annotated(g, [], {0: 2}, 1, 1, F(1, 2), MAX)
    deann = deannotate_max(inst)
    # counter 2 plus floor(2) leaves; t' = 1 + (1/2)(0 + 2*1) = 2
    assert deann.plain.graph.n == 5 and deann.plain.t == 2
    before = brute_force(inst)
    after = brute_force(deann.plain.annotate())
    assert before.decision == after.decision


def test_deannotate_max_alpha_one_counterless():
    g = path_graph(3)
    inst = plain(g, 2, 1, F(1), MAX)
    deann = deannotate_max(inst)
    # floor(1/1) = 1 leaf plus the (2 - 1/a)(k-1) = 1 exchange pad per vertex
    assert deann.plain.graph.n == 9 and deann.plain.t == inst.t + 4


def test_deannotate_max_alpha_one_no_pad_at_k1():
    g = path_graph(3)
    inst = plain(g, 1, 1, F(1), MAX)
    deann = deannotate_max(inst)
    # k = 1 needs no exchange pad: exactly one leaf per vertex, t' = t + k
    assert deann.plain.graph.n == 6 and deann.plain.t == inst.t + 1


def test_deannotate_max_large_alpha_regression():
    # no-instance that the unpadded construction would flip to yes
    g = Graph.from_edges(6, [(0, 1), (2, 4), (4, 5)])
    inst = annotated(g, [1], {3: 2, 4: 2}, 4, F(27, 4), F(1), MAX)
    assert not brute_force(inst).decision
    deann = deannotate_max(inst)
    assert not brute_force(deann.plain.annotate(), budget=10_000_000).decision


def test_deannotate_min_two_isolated():
    g = Graph.from_edges(2, [])
    inst = plain(g, 1, 0, F(1, 2), MIN)
    deann = deannotate_min(inst)
    # ell = smallest integer > 2*(0 + 1 + 1/2) = 3 -> 4; t' = a*ell*k'
    assert deann.ell == 4
    assert deann.plain.t == F(1, 2) * 4
    assert deann.plain.graph.n == 2 + (2 * 4 + 1)


def test_deannotate_min_t_only_shifts_for_free_vertices():
    g = complete_graph(3)
    inst = annotated(g, [0, 1], {}, 2, 5, F(1, 4), MIN)
    deann = deannotate_min(inst)
    assert deann.plain.t == inst.t  # k - |T| = 0


@pytest.mark.parametrize("variant,alpha", [(MAX, F(1, 2)), (MAX, F(2, 3)), (MIN, F(1, 4)), (MIN, F(1, 2))])
def test_deannotation_preserves_answers(variant, alpha):
    deann_fn = deannotate_max if variant == MAX else deannotate_min
    for seed in range(15):
        g = gen_gnp(6, 1, 2, seed + 900)
        inst = annotated(g, [seed % 6], {v: (seed + v) % 3 for v in range(6) if v != seed % 6},
                         1 + seed % 3, F(seed % 7, 2), alpha, variant)
        if inst.k <= inst.t_size:
            continue
        deann = deann_fn(inst)
        before = brute_force(inst)
        after = brute_force(deann.plain.annotate(), budget=4_000_000)
        assert before.decision == after.decision
        if after.decision:
            lifted = lift_witness(deann, inst, after.witness)
            assert len(lifted) == inst.k


def test_deannotate_guards():
    inst = plain(path_graph(3), 1, 0, F(0), MAX)
    with pytest.raises(GuardViolation):
        deannotate_max(inst)
    bad = annotated(path_graph(3), [], {}, 1, 0, F(1, 2), MIN)
    bad = AnnotatedInstance(
        graph=bad.graph, alive=bad.alive, tmask=0,
        bonus=(F(1, 3), F(0), F(0)), k=1, t=F(0), alpha=F(1, 2), variant=MIN,
    )
    with pytest.raises(GuardViolation, match="integer multiple"):
        deannotate_min(bad)


def test_deannotate_short_instance_is_trivial_no():
    inst = plain(path_graph(2), 3, 0, F(1, 2), MAX)
    deann = deannotate_max(inst)
    assert deann.kind == "trivial-no" and deann.plain.graph.n == 0


# -- serialization -----------------------------------------------------------------------

def test_snapshot_round_trip():
    g = gen_gnp(7, 1, 2, 123)
    inst = annotated(g, [2], {0: 1, 5: 2}, 3, F(7, 2), F(1, 2), MAX)
    back = AnnotatedInstance.from_text(inst.to_text())
    assert back.k == inst.k and back.t == inst.t and back.alpha == inst.alpha
    assert back.graph.m == inst.graph.m
    assert brute_force(back).best_value == brute_force(inst).best_value


def test_snapshot_remaps_alive_vertices():
    inst = plain(path_graph(4), 2, 0, F(1, 2), MAX).exclude(0)
    back = AnnotatedInstance.from_text(inst.to_text())
    assert back.graph.n == 3
    assert brute_force(back).best_value == brute_force(inst).best_value
