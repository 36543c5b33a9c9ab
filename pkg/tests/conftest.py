"""Shared builders for the test suite.

All randomness is seeded; the helpers below define the instance streams the
oracle-equivalence tests draw from.
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from fcgp.graph import Graph
from fcgp.harness import gen_annotated, gen_degenerate, gen_gnp
from fcgp.instance import AnnotatedInstance, PlainInstance


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def empty_graph(n: int) -> Graph:
    return Graph.from_edges(n, [])


def plain(g: Graph, k: int, t, alpha, variant: str) -> AnnotatedInstance:
    return PlainInstance(g, k, Fraction(t), Fraction(alpha), variant).annotate()


def annotated(g: Graph, tset, counters, k, t, alpha, variant) -> AnnotatedInstance:
    alpha = Fraction(alpha)
    tmask = 0
    for v in tset:
        tmask |= 1 << v
    bonus = [Fraction(0)] * g.n
    for v, c in counters.items():
        bonus[v] = alpha * c
    return AnnotatedInstance(
        graph=g,
        alive=(1 << g.n) - 1 if g.n else 0,
        tmask=tmask,
        bonus=tuple(bonus),
        k=k,
        t=Fraction(t),
        alpha=alpha,
        variant=variant,
    )


def seeded_instances(count, alpha, variant, *, base_seed=0, allow_t=True, counters=(0, 2), n_hi=10, k_hi=3):
    """Deterministic stream of annotated instances near their optima."""
    made = 0
    seed = base_seed
    alpha = Fraction(alpha)
    while made < count:
        seed += 1
        if seed % 2:
            g = gen_gnp(6 + (seed % (n_hi - 5)), 1, 2, seed * 7919 + 11)
        else:
            g = gen_degenerate(6 + (seed % (n_hi - 5)), 1 + seed % 3, seed * 6151 + 5)
        try:
            inst = gen_annotated(
                g, seed * 104729 + 7, alpha, variant, (1, min(k_hi, g.n)), counters, allow_t=allow_t
            )
        except ValueError:
            continue
        made += 1
        yield seed, inst


@pytest.fixture
def tiny_graphs():
    return {
        "p3": path_graph(3),
        "k3": complete_graph(3),
        "k4": complete_graph(4),
        "c4": cycle_graph(4),
        "star5": star_graph(5),
    }
