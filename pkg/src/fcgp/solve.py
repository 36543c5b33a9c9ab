"""Exact solvers, from the brute-force oracle up to the FPT branchings.

All solvers work on annotated instances and report exact rational values.
``brute_force`` is the reference oracle the whole test suite leans on; it
enumerates with scaled-integer arithmetic for speed but reports Fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import combinations

from .graph import degeneracy_ordering, iter_mask
from .instance import MAX, MIN, AnnotatedInstance, GuardViolation

DEFAULT_SUBSET_BUDGET = 2_000_000

THIRD = Fraction(1, 3)


class BudgetExceeded(RuntimeError):
    """The enumeration or branching budget would be exceeded."""


class UndecidedWithinBudget(BudgetExceeded):
    """solve_auto ran out of applicable routes; never a wrong answer."""


@dataclass(frozen=True)
class SolveResult:
    decision: bool
    witness: tuple[int, ...] | None
    best_value: Fraction | None
    solver_id: str
    nodes_explored: int = 0

    def check_witness(self, inst: AnnotatedInstance) -> bool:
        """Witness sanity on the given instance: size k, contains T, meets t."""
        if not self.decision:
            return self.witness is None
        w = self.witness
        if w is None or len(w) != inst.k or (inst.tmask & ~_mask(w)):
            return False
        value = inst.val(w)
        return value >= inst.t if inst.variant == MAX else value <= inst.t


def _mask(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class _ScaledEval:
    """Integer-scaled evaluator: value(S) * denom as a Python int."""

    def __init__(self, inst: AnnotatedInstance):
        denom = inst.alpha.denominator
        for v in iter_mask(inst.alive):
            denom = math.lcm(denom, inst.bonus[v].denominator)
        self.denom = denom
        self.a_num = int(inst.alpha * denom)
        self.in_num = denom - self.a_num
        self.bonus = [0] * inst.graph.n
        self.deg = [0] * inst.graph.n
        for v in iter_mask(inst.alive):
            self.bonus[v] = int(inst.bonus[v] * denom)
            self.deg[v] = (inst.graph.masks[v] & inst.alive).bit_count()
        self.masks = inst.graph.masks
        self.alive = inst.alive

    def value(self, smask: int) -> int:
        inside2 = 0
        out = 0
        bonus = 0
        m = smask
        while m:
            low = m & -m
            v = low.bit_length() - 1
            m ^= low
            hits = (self.masks[v] & self.alive & smask).bit_count()
            inside2 += hits
            out += self.deg[v] - hits
            bonus += self.bonus[v]
        return self.a_num * out + bonus + self.in_num * (inside2 // 2)

    def frac(self, scaled: int) -> Fraction:
        return Fraction(scaled, self.denom)


def brute_force(inst: AnnotatedInstance, budget: int = DEFAULT_SUBSET_BUDGET) -> SolveResult:
    """Exact optimum over all size-k supersets of T; the oracle for everything.

    Free-vertex combinations are enumerated in lexicographic order, so the
    first optimum found is the lexicographically smallest witness.  The inner
    loops run on scaled integers: val*D = sum_w(v) + (D-3*aD)*m(S), with the
    T-part folded into a per-vertex constant.
    """
    need = inst.k - inst.t_size
    free = inst.free_vertices()
    if need < 0 or need > len(free):
        return SolveResult(False, None, None, "brute", 0)
    if math.comb(len(free), need) > budget:
        raise BudgetExceeded(
            f"brute force needs C({len(free)},{need}) > {budget} subset evaluations"
        )
    ev = _ScaledEval(inst)
    sign = 1 if inst.variant == MAX else -1
    base = sign * ev.value(inst.tmask)
    c3 = sign * (ev.denom - 3 * ev.a_num)
    # u[v] folds the vertex weight and its T-edges; pair edges stay explicit
    u = {}
    masks = {}
    for v in free:
        m = ev.masks[v] & ev.alive
        u[v] = sign * (ev.a_num * ev.deg[v] + ev.bonus[v]) + c3 * (m & inst.tmask).bit_count()
        masks[v] = m
    best: int | None = None
    best_set: tuple[int, ...] = ()
    nodes = 0
    if need == 0:
        best, best_set, nodes = base, (), 1
    elif need == 1:
        for a in free:
            nodes += 1
            got = base + u[a]
            if best is None or got > best:
                best, best_set = got, (a,)
    elif need == 2:
        for i, a in enumerate(free):
            sa = base + u[a]
            ma = masks[a]
            for b in free[i + 1:]:
                nodes += 1
                got = sa + u[b] + c3 * ((ma >> b) & 1)
                if best is None or got > best:
                    best, best_set = got, (a, b)
    elif need == 3:
        for i, a in enumerate(free):
            sa = base + u[a]
            ma = masks[a]
            for j in range(i + 1, len(free)):
                b = free[j]
                sab = sa + u[b] + c3 * ((ma >> b) & 1)
                for c in free[j + 1:]:
                    nodes += 1
                    got = sab + u[c] + c3 * (((ma >> c) & 1) + ((masks[b] >> c) & 1))
                    if best is None or got > best:
                        best, best_set = got, (a, b, c)
    elif need == 4:
        for i, a in enumerate(free):
            sa = base + u[a]
            ma = masks[a]
            for j in range(i + 1, len(free)):
                b = free[j]
                sab = sa + u[b] + c3 * ((ma >> b) & 1)
                mb = masks[b]
                for l in range(j + 1, len(free)):
                    c = free[l]
                    sabc = sab + u[c] + c3 * (((ma >> c) & 1) + ((mb >> c) & 1))
                    mc = masks[c]
                    for e in free[l + 1:]:
                        nodes += 1
                        got = sabc + u[e] + c3 * (((ma >> e) & 1) + ((mb >> e) & 1) + ((mc >> e) & 1))
                        if best is None or got > best:
                            best, best_set = got, (a, b, c, e)
    else:
        for combo in combinations(free, need):
            nodes += 1
            got = base
            chosen = 0
            for v in combo:
                got += u[v] + c3 * (masks[v] & chosen).bit_count()
                chosen |= 1 << v
            if best is None or got > best:
                best, best_set = got, combo
    if best is None:
        return SolveResult(False, None, None, "brute", nodes)
    best_value = ev.frac(sign * best)
    decision = best_value >= inst.t if inst.variant == MAX else best_value <= inst.t
    witness = tuple(sorted(best_set + inst.t_vertices())) if decision else None
    return SolveResult(decision, witness, best_value, "brute", nodes)


# ---------------------------------------------------------------------------
# Degrading branching over high-contribution vertices
# ---------------------------------------------------------------------------

def branch_degrading(
    inst: AnnotatedInstance,
    d: int,
    node_budget: int = 500_000,
    use_shortcut: bool = True,
) -> SolveResult:
    """Search tree over L = {v : contribution(v, T) meets t'/k'}; depth <= k.

    The decision run may accept early through an independent subset of L
    (attempted once |L| >= d*k, guaranteed from (d+1)*k' on, value verified).
    A second run rooted at the best achieved value revisits every set at
    least that good, so the reported optimum and witness are exact whenever
    the answer is yes; sub-threshold optima are outside this solver's scope.
    """
    if inst.variant == MAX:
        if not inst.alpha > THIRD:
            raise GuardViolation("branch_degrading (max) needs alpha > 1/3")
    else:
        if not (0 < inst.alpha < THIRD):
            raise GuardViolation("branch_degrading (min) needs alpha in (0, 1/3)")
    state = {"nodes": 0, "budget": node_budget, "decision_nodes": 0}
    found = _branch_decide(inst, d, state, use_shortcut)
    state["decision_nodes"] = state["nodes"]
    if found is None:
        return SolveResult(False, None, None, "branch", state["nodes"])
    value0 = inst.val(found)
    rerun = replace(inst, t=value0)
    best: dict = {"value": None, "witness": None}
    _branch_optimum(rerun, inst, d, state, best)
    value, witness = best["value"], best["witness"]
    assert value is not None, "optimum rerun lost the certified solution"
    return SolveResult(True, witness, value, "branch", state["nodes"])


def branch_decision_nodes(inst: AnnotatedInstance, d: int, node_budget: int = 500_000) -> int:
    """Node count of the decision phase alone (for the search-tree bound)."""
    state = {"nodes": 0, "budget": node_budget}
    _branch_decide(inst, d, state, True)
    return state["nodes"]


def _branch_candidates(inst: AnnotatedInstance) -> list[int]:
    thr = inst.t_prime() / inst.k_prime
    return [
        v
        for v in inst.free_vertices()
        if inst.better_cmp(inst.contribution(v, inst.tmask), thr)
    ]


def _meets(inst: AnnotatedInstance, value: Fraction) -> bool:
    return value >= inst.t if inst.variant == MAX else value <= inst.t


def _branch_decide(inst, d, state, use_shortcut) -> tuple[int, ...] | None:
    state["nodes"] += 1
    if state["nodes"] > state["budget"]:
        raise BudgetExceeded("branching node budget exceeded")
    if inst.n_alive < inst.k:
        return None
    if inst.t_size == inst.k:
        return inst.t_vertices() if _meets(inst, inst.val(inst.tmask)) else None
    cand = _branch_candidates(inst)
    if not cand:
        return None
    if use_shortcut and len(cand) >= d * inst.k:
        picked = _independent_inside(inst, cand, inst.k_prime)
        if picked is not None:
            witness = tuple(sorted(inst.t_vertices() + picked))
            if _meets(inst, inst.val(witness)):
                return witness
    for v in cand:
        got = _branch_decide(inst.include(v), d, state, use_shortcut)
        if got is not None:
            return got
    return None


def _branch_optimum(cur, orig, d, state, best) -> None:
    state["nodes"] += 1
    if state["nodes"] > state["budget"]:
        raise BudgetExceeded("branching node budget exceeded")
    if cur.n_alive < cur.k:
        return
    if cur.t_size == cur.k:
        if not _meets(cur, cur.val(cur.tmask)):
            return
        witness = cur.t_vertices()
        value = orig.val(witness)
        prev = best["value"]
        improved = prev is None or (value > prev if orig.variant == MAX else value < prev)
        if improved or (value == prev and witness < best["witness"]):
            best["value"] = value
            best["witness"] = witness
        return
    for v in _branch_candidates(cur):
        _branch_optimum(cur.include(v), orig, d, state, best)


def _independent_inside(inst: AnnotatedInstance, pool: list[int], size: int) -> tuple[int, ...] | None:
    """Greedy peeling-order independent set of the requested size inside pool."""
    if size <= 0:
        return ()
    sub, back = inst.graph.induced(pool)
    order, _ = degeneracy_ordering(sub)
    alive = set(range(sub.n))
    picked: list[int] = []
    for v in order:
        if v not in alive:
            continue
        picked.append(v)
        alive.discard(v)
        alive.difference_update(sub.neighbors(v))
        if len(picked) == size:
            return tuple(sorted(back[i] for i in picked))
    return None


# ---------------------------------------------------------------------------
# Boundary case alpha = 1/3: greedy on deg+ is exact
# ---------------------------------------------------------------------------

def solve_third(inst: AnnotatedInstance) -> SolveResult:
    """At alpha = 1/3 contributions are prefix-independent, so top-k' greedy is exact."""
    if inst.alpha != THIRD:
        raise GuardViolation("solve_third requires alpha = 1/3")
    need = inst.k - inst.t_size
    free = inst.free_vertices()
    if need < 0 or need > len(free):
        return SolveResult(False, None, None, "third", 0)
    if inst.variant == MAX:
        ranked = sorted(free, key=lambda v: (-inst.deg_bonus(v), v))
    else:
        ranked = sorted(free, key=lambda v: (inst.deg_bonus(v), v))
    witness = tuple(sorted(inst.t_vertices() + tuple(ranked[:need])))
    value = inst.val(witness)
    decision = _meets(inst, value)
    return SolveResult(decision, witness if decision else None, value, "third", len(free))


# ---------------------------------------------------------------------------
# Component-wise enumeration for bounded-degree residual instances
# ---------------------------------------------------------------------------

def solve_bounded_degree(inst: AnnotatedInstance, budget: int = DEFAULT_SUBSET_BUDGET) -> SolveResult:
    """Exact optimum by per-component subset tables combined over cardinality.

    With no cross-component edges the value is additive over components, so a
    (component x cardinality) table of per-size optima suffices.  The budget
    guards the per-component enumerations.
    """
    if inst.n_alive < inst.k or inst.k < inst.t_size:
        return SolveResult(False, None, None, "bounded-degree", 0)
    sign = 1 if inst.variant == MAX else -1
    total_work = 0
    nodes = 0
    tables: list[dict[int, tuple[Fraction, tuple[int, ...]]]] = []
    for comp in _components(inst):
        forced = [v for v in comp if (inst.tmask >> v) & 1]
        free = [v for v in comp if not (inst.tmask >> v) & 1]
        lo = len(forced)
        hi = min(len(comp), inst.k)
        total_work += sum(math.comb(len(free), j - lo) for j in range(lo, hi + 1))
        if total_work > budget:
            raise BudgetExceeded("component enumeration exceeds the subset budget")
        table: dict[int, tuple[Fraction, tuple[int, ...]]] = {}
        for j in range(lo, hi + 1):
            best = None
            best_set: tuple[int, ...] = ()
            for combo in combinations(free, j - lo):
                nodes += 1
                chosen = tuple(sorted(forced + list(combo)))
                value = inst.val(chosen)
                if best is None or sign * (value - best) > 0:
                    best = value
                    best_set = chosen
            if best is not None:
                table[j] = (best, best_set)
        tables.append(table)

    acc: dict[int, tuple[Fraction, tuple[int, ...]]] = {0: (Fraction(0), ())}
    for table in tables:
        nxt: dict[int, tuple[Fraction, tuple[int, ...]]] = {}
        for have, (hv, hs) in acc.items():
            for j, (jv, js) in table.items():
                tot = have + j
                if tot > inst.k:
                    continue
                cand = (hv + jv, tuple(sorted(hs + js)))
                cur = nxt.get(tot)
                if cur is None or sign * (cand[0] - cur[0]) > 0:
                    nxt[tot] = cand
        acc = nxt
        if not acc:
            break
    if inst.k not in acc:
        return SolveResult(False, None, None, "bounded-degree", nodes)
    value, witness = acc[inst.k]
    decision = _meets(inst, value)
    return SolveResult(decision, witness if decision else None, value, "bounded-degree", nodes)


def _components(inst: AnnotatedInstance) -> list[list[int]]:
    seen = 0
    comps = []
    for start in iter_mask(inst.alive):
        if (seen >> start) & 1:
            continue
        frontier = 1 << start
        comp_mask = 0
        while frontier:
            comp_mask |= frontier
            grow = 0
            for v in iter_mask(frontier):
                grow |= inst.graph.masks[v] & inst.alive
            frontier = grow & ~comp_mask
        seen |= comp_mask
        comps.append(sorted(iter_mask(comp_mask)))
    return comps


# ---------------------------------------------------------------------------
# FPT branching over the high-degree vertices (Max, alpha < 1/3)
# ---------------------------------------------------------------------------

def hindex_fpt_max(
    inst: AnnotatedInstance,
    h: int,
    branch_budget: int = 200_000,
    subset_budget: int = DEFAULT_SUBSET_BUDGET,
) -> SolveResult:
    """Branch on S cap V_{>h}, fold the chosen hubs away, solve the low-degree rest.

    Folding a chosen hub u pays t down by bonus(u) + (1-a)|N(u) cap T_rem| +
    a|N(u) minus T_rem| and credits 1-2a to each remaining low neighbor, so
    every branch's residual instance preserves value-minus-threshold exactly.
    """
    if inst.variant != MAX:
        raise GuardViolation("hindex_fpt_max requires the maximization variant")
    if not inst.alpha < THIRD:
        raise GuardViolation("hindex_fpt_max requires alpha < 1/3")
    high = [v for v in inst.alive_vertices() if inst.degree(v) >= h + 1]
    forced_high = [v for v in high if (inst.tmask >> v) & 1]
    open_high = [v for v in high if not (inst.tmask >> v) & 1]
    max_extra = min(len(open_high), inst.k - inst.t_size)
    if max_extra < 0:
        return SolveResult(False, None, None, "hindex-fpt", 0)
    branches = sum(math.comb(len(open_high), j) for j in range(0, max_extra + 1))
    if branches > branch_budget:
        raise BudgetExceeded(f"{branches} hub subsets exceed the branch budget")
    best: Fraction | None = None
    best_witness: tuple[int, ...] | None = None
    nodes = 0
    for j in range(0, max_extra + 1):
        for extra in combinations(open_high, j):
            nodes += 1
            chosen = tuple(sorted(forced_high + list(extra)))
            residual = _fold_hubs(inst, high, chosen)
            if residual is None:
                continue
            sub = solve_bounded_degree(residual, budget=subset_budget)
            if sub.best_value is None:
                continue
            paid = inst.t - residual.t
            total = sub.best_value + paid
            witness = tuple(sorted(chosen + sub.witness)) if sub.witness is not None else None
            if best is None or total > best:
                best = total
                best_witness = witness
            elif total == best and witness is not None and (best_witness is None or witness < best_witness):
                best_witness = witness
    if best is None:
        return SolveResult(False, None, None, "hindex-fpt", nodes)
    decision = best >= inst.t
    return SolveResult(decision, best_witness if decision else None, best, "hindex-fpt", nodes)


def _fold_hubs(inst: AnnotatedInstance, high: list[int], chosen: tuple[int, ...]) -> AnnotatedInstance | None:
    """Branch-restricted residual: unchosen hubs excluded, chosen hubs folded.

    Preserves val(S) - t for every S with S cap V_{>h} = chosen; returns
    None when the branch is infeasible by cardinality.
    """
    cur = inst
    for v in high:
        if v not in chosen:
            cur = cur.exclude(v)
    for v in chosen:
        if not (cur.tmask >> v) & 1:
            cur = cur.include(v)
    remaining = list(chosen)
    alpha = inst.alpha
    credit = 1 - 2 * alpha
    for u in chosen:
        remaining.remove(u)
        rem_mask = _mask(remaining)
        nbrs = cur.graph.masks[u] & cur.alive
        hub_nbrs = (nbrs & rem_mask).bit_count()
        low_nbrs = list(iter_mask(nbrs & ~rem_mask))
        new_t = cur.t - ((1 - alpha) * hub_nbrs + alpha * len(low_nbrs)) - cur.bonus[u]
        bonus = list(cur.bonus)
        bonus[u] = Fraction(0)
        for w in low_nbrs:
            if (cur.tmask >> w) & 1:
                new_t -= credit  # forced neighbor: the edge is internal for sure
            else:
                bonus[w] += credit
        cur = AnnotatedInstance(
            graph=cur.graph,
            alive=cur.alive ^ (1 << u),
            tmask=cur.tmask ^ (1 << u),
            bonus=tuple(bonus),
            k=cur.k - 1,
            t=new_t,
            alpha=cur.alpha,
            variant=cur.variant,
        )
    if cur.k < cur.t_size or cur.k > cur.n_alive or cur.k < 0:
        return None
    return cur


# ---------------------------------------------------------------------------
# Densest k-subgraph with a vertex cover (alpha = 0, Max)
# ---------------------------------------------------------------------------

def densest_vc(inst: AnnotatedInstance, cover: tuple[int, ...], budget: int = DEFAULT_SUBSET_BUDGET) -> SolveResult:
    """2^vc enumeration: fix S cap cover, fill greedily from the independent set.

    At alpha = 0 only internal edges count, and independent-set vertices
    contribute exactly their edges into the chosen cover part, so a greedy
    fill by that count is optimal per cover subset.
    """
    if inst.variant != MAX or inst.alpha != 0:
        raise GuardViolation("densest_vc requires max variant with alpha = 0")
    if inst.tmask != 0 or any(inst.bonus[v] != 0 for v in inst.alive_vertices()):
        raise GuardViolation("densest_vc needs a plain instance")
    cover = tuple(v for v in cover if (inst.alive >> v) & 1)
    cmask = _mask(cover)
    for v in inst.alive_vertices():
        if not (cmask >> v) & 1 and inst.graph.masks[v] & inst.alive & ~cmask:
            raise GuardViolation("invalid vertex cover: an edge is uncovered")
    if 2 ** len(cover) > budget:
        raise BudgetExceeded(f"2^{len(cover)} cover subsets exceed the budget")
    iset = [v for v in inst.alive_vertices() if not (cmask >> v) & 1]
    best: Fraction | None = None
    best_witness: tuple[int, ...] | None = None
    nodes = 0
    for r in range(0, min(len(cover), inst.k) + 1):
        fill = inst.k - r
        if fill > len(iset):
            continue
        for sub in combinations(cover, r):
            nodes += 1
            amask = _mask(sub)
            inner, _ = inst.graph.edge_counts(amask)
            ranked = sorted(iset, key=lambda v: (-(inst.graph.masks[v] & amask).bit_count(), v))
            chosen = ranked[:fill]
            value = Fraction(inner + sum((inst.graph.masks[v] & amask).bit_count() for v in chosen))
            witness = tuple(sorted(sub + tuple(chosen)))
            if best is None or value > best or (value == best and witness < best_witness):
                best = value
                best_witness = witness
    if best is None:
        return SolveResult(False, None, None, "densest-vc", nodes)
    decision = best >= inst.t
    return SolveResult(decision, best_witness if decision else None, best, "densest-vc", nodes)


# ---------------------------------------------------------------------------
# Routing
# ---------------------------------------------------------------------------

def solve_auto(inst: AnnotatedInstance, profile=None, budget: int = DEFAULT_SUBSET_BUDGET) -> SolveResult:
    """Dispatch on alpha/variant/parameters; falls back to brute force.

    Raises :class:`UndecidedWithinBudget` when every applicable route blows
    its budget; a wrong answer is never returned.
    """
    from .graph import compute_profile
    from .rules import DECIDED_YES, kernel_degeneracy_min

    if profile is None:
        sub, _ = inst.graph.induced(inst.alive_vertices())
        profile = compute_profile(sub, want_vc=(inst.alpha == 0 and inst.variant == MAX))

    plainish = inst.tmask == 0 and all(inst.bonus[v] == 0 for v in inst.alive_vertices())
    route = "brute"
    try:
        if inst.alpha == THIRD:
            return _tag(solve_third(inst), "auto:third")
        if (
            inst.variant == MIN
            and inst.alpha < THIRD
            and plainish
            and inst.n_alive >= inst.k
            and inst.t >= profile.degeneracy * inst.k
        ):
            outcome = kernel_degeneracy_min(inst, profile.degeneracy)
            if outcome.status == DECIDED_YES:
                value = inst.val(outcome.witness)
                return SolveResult(True, outcome.witness, value, "auto:min-trivial", 0)
        if (inst.variant == MAX and inst.alpha > THIRD) or (
            inst.variant == MIN and 0 < inst.alpha < THIRD
        ):
            route = "branch"
            return _tag(branch_degrading(inst, profile.degeneracy, node_budget=budget), "auto:branch")
        if inst.variant == MAX and inst.alpha == 0 and plainish and profile.vertex_cover is not None:
            route = "densest-vc"
            return _tag(densest_vc(inst, profile.vertex_cover, budget=budget), "auto:densest-vc")
        if inst.variant == MAX and inst.alpha < THIRD:
            route = "hindex"
            return _tag(hindex_fpt_max(inst, profile.h_index, subset_budget=budget), "auto:hindex")
        route = "brute"
        return _tag(brute_force(inst, budget=budget), "auto:brute")
    except BudgetExceeded:
        if route == "brute":
            raise UndecidedWithinBudget("brute-force budget exceeded") from None
        try:
            return _tag(brute_force(inst, budget=budget), "auto:brute")
        except BudgetExceeded as exc:
            raise UndecidedWithinBudget(f"route {route} and brute force both exceeded budgets") from exc


def _tag(res: SolveResult, solver_id: str) -> SolveResult:
    return SolveResult(res.decision, res.witness, res.best_value, solver_id, res.nodes_explored)
