"""Reduction-rule catalog and the kernelization pipelines composing them.

Every rule is an answer-preserving transformation of an annotated instance;
pipelines string them together, short-circuit to a decision whenever
|T| = k or fewer than k vertices remain, and finish by removing the
annotations.  Each primitive application is logged into a replayable
:class:`RuleTrace`.

Tie-breaking is smallest vertex index everywhere, so identical inputs give
identical traces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import ramsey
from .graph import iter_mask
from .instance import (
    MAX,
    MIN,
    AnnotatedInstance,
    Deannotation,
    GuardViolation,
    deannotate_identity,
    deannotate_max,
    deannotate_min,
)
from .ramsey import ExtractionPreconditionError

ZERO = Fraction(0)

KERNELIZED = "kernelized"
DECIDED_YES = "decided_yes"
DECIDED_NO = "decided_no"


class RuleInternalError(AssertionError):
    """A rule's verified postcondition failed; implementation bug."""


@dataclass(frozen=True)
class TraceEntry:
    rule: str
    op: str  # include | exclude | shift | decide
    verts: tuple[int, ...]
    dt: Fraction
    dk: int
    note: str = ""

    def to_line(self) -> str:
        verts = ",".join(map(str, self.verts))
        return f"entry rule={self.rule} op={self.op} verts={verts} dt={self.dt} dk={self.dk} note={self.note}"


@dataclass(frozen=True)
class InstanceSummary:
    n: int
    m: int
    k: int
    t: Fraction
    gamma: int | None
    delta_tbar: int

    def to_line(self, tag: str) -> str:
        gamma = "-" if self.gamma is None else str(self.gamma)
        return f"{tag} n={self.n} m={self.m} k={self.k} t={self.t} gamma={gamma} delta_tbar={self.delta_tbar}"


def summarize(inst: AnnotatedInstance) -> InstanceSummary:
    m2 = sum(inst.degree(v) for v in iter_mask(inst.alive))
    try:
        gamma = inst.gamma()
    except GuardViolation:
        gamma = None
    return InstanceSummary(
        n=inst.n_alive, m=m2 // 2, k=inst.k, t=inst.t, gamma=gamma, delta_tbar=inst.delta_tbar()
    )


@dataclass
class RuleTrace:
    """Ordered, replayable log of rule applications."""

    pipeline: str
    initial: InstanceSummary | None = None
    final: InstanceSummary | None = None
    entries: list[TraceEntry] = field(default_factory=list)
    audits: dict[str, str] = field(default_factory=dict)
    deann: Deannotation | None = None

    def log(self, rule: str, op: str, verts: tuple[int, ...], dt: Fraction, note: str = "") -> None:
        self.entries.append(TraceEntry(rule=rule, op=op, verts=verts, dt=dt, dk=0, note=note))

    def audit(self, key: str, value) -> None:
        self.audits[key] = str(value)

    def to_text(self) -> str:
        lines = [f"# fcgp rule trace pipeline={self.pipeline}"]
        if self.initial is not None:
            lines.append(self.initial.to_line("initial"))
        lines.extend(e.to_line() for e in self.entries)
        if self.final is not None:
            lines.append(self.final.to_line("final"))
        for key in sorted(self.audits):
            lines.append(f"audit {key}={self.audits[key]}")
        if self.deann is not None:
            d = self.deann
            lines.append(f"deann kind={d.kind} ell={d.ell} n={d.plain.graph.n} m={d.plain.graph.m}")
            lines.append("origin " + ",".join(map(str, d.origin)))
            lines.append("anchor " + ",".join(map(str, d.anchor)))
        return "\n".join(lines) + "\n"

    def replay(self, initial: AnnotatedInstance) -> AnnotatedInstance:
        """Re-apply every primitive op; asserts the logged t-deltas match."""
        inst = initial
        for e in self.entries:
            before_t = inst.t
            if e.op == "include":
                inst = inst.include(e.verts[0])
            elif e.op == "exclude":
                inst = inst.exclude(e.verts[0])
            elif e.op == "shift":
                amount = Fraction(e.note.split("=", 1)[1])
                inst = inst.shift_bonus(amount)
            elif e.op == "decide":
                continue
            else:
                raise ValueError(f"unknown op {e.op!r}")
            if inst.t - before_t != e.dt:
                raise RuleInternalError(f"replay t-delta mismatch at {e}")
        return inst


@dataclass(frozen=True)
class KernelOutcome:
    status: str  # kernelized | decided_yes | decided_no
    plain: "object | None"  # PlainInstance when kernelized
    witness: tuple[int, ...] | None
    trace: RuleTrace

    @property
    def decided(self) -> bool:
        return self.status != KERNELIZED


def _require_degrading(inst: AnnotatedInstance, rule: str, allow_alpha_zero: bool = False) -> None:
    if inst.variant == MAX:
        if not inst.alpha > Fraction(1, 3):
            raise GuardViolation(f"{rule} requires degrading variant: max needs alpha>1/3, got {inst.alpha}")
    else:
        if not inst.alpha < Fraction(1, 3):
            raise GuardViolation(f"{rule} requires degrading variant: min needs alpha<1/3, got {inst.alpha}")
        if not allow_alpha_zero and inst.alpha == 0:
            raise GuardViolation(f"{rule} requires alpha > 0")


def _shortcircuit(inst: AnnotatedInstance):
    """Decision forced by cardinality: the solution set is over- or fully
    determined (too few vertices, T full, or every survivor needed)."""
    if inst.n_alive < inst.k or inst.k < inst.t_size:
        return (DECIDED_NO, None)
    if inst.t_size == inst.k or inst.n_alive == inst.k:
        forced = inst.tmask if inst.t_size == inst.k else inst.alive
        value = inst.val(forced)
        ok = value >= inst.t if inst.variant == MAX else value <= inst.t
        witness = tuple(iter_mask(forced))
        return ((DECIDED_YES, witness) if ok else (DECIDED_NO, None))
    return None


# ---------------------------------------------------------------------------
# Degree-bounded rules (maximum-degree kernel machinery)
# ---------------------------------------------------------------------------

def rr_delta_better(inst: AnnotatedInstance, trace: RuleTrace | None = None) -> AnnotatedInstance:
    """Exclude any vertex dominated by (Delta_Tbar+1)(k-1)+1 better vertices.

    "Better" is contribution w.r.t. T in the variant's direction; ties count,
    the vertex itself does not.  Contributions are recomputed after every
    single exclusion since exclusions shift bonuses.
    """
    _require_degrading(inst, "rr_delta_better")
    while True:
        free = inst.free_vertices()
        bound = (inst.delta_tbar() + 1) * (inst.k - 1) + 1
        contrib = {v: inst.contribution(v, inst.tmask) for v in free}
        excluded = False
        for v in free:
            better = sum(1 for u in free if u != v and inst.better_cmp(contrib[u], contrib[v]))
            if better >= bound:
                before = inst.t
                inst = inst.exclude(v)
                if trace is not None:
                    trace.log("delta:better", "exclude", (v,), inst.t - before, f"better={better} bound={bound}")
                excluded = True
                break
        if not excluded:
            if trace is not None:
                trace.audit("delta_better_free", len(free))
                trace.audit("delta_better_bound", bound)
            return inst


def _satisfactory_threshold(inst: AnnotatedInstance) -> Fraction:
    return inst.t_prime() / inst.k_prime + (3 * inst.alpha - 1) * (inst.k - 1)


def _find_satisfactory(inst: AnnotatedInstance) -> int | None:
    thr = _satisfactory_threshold(inst)
    for v in inst.free_vertices():
        if inst.better_cmp(inst.contribution(v, inst.tmask), thr):
            return v
    return None


def rr_include_satisfactory(inst: AnnotatedInstance, trace: RuleTrace | None = None):
    """Repeatedly include vertices whose contribution clears t'/k' by the
    (3a-1)(k-1) margin.

    Returns the new instance, or a ``(status, witness, instance)`` decision
    triple once |T| reaches k (or too few vertices remain).
    """
    _require_degrading(inst, "rr_include_satisfactory")
    while True:
        sc = _shortcircuit(inst)
        if sc is not None:
            return sc + (inst,)
        v = _find_satisfactory(inst)
        if v is None:
            return inst
        before = inst.t
        inst = inst.include(v)
        if trace is not None:
            trace.log("general:include-high", "include", (v,), inst.t - before, "satisfactory")


def rr_exclude_needless(inst: AnnotatedInstance, trace: RuleTrace | None = None) -> AnnotatedInstance:
    """Exclude vertices far below t'/k' (above, for Min).

    Must start at the satisfactory fixpoint; stops early as soon as an
    exclusion creates a satisfactory vertex so the caller can alternate.
    """
    _require_degrading(inst, "rr_exclude_needless")
    if inst.k_prime <= 0:
        return inst
    if _find_satisfactory(inst) is not None:
        raise GuardViolation("rr_exclude_needless requires the satisfactory-rule fixpoint")
    while True:
        if inst.n_alive < inst.k:
            return inst
        thr = inst.t_prime() / inst.k_prime - (3 * inst.alpha - 1) * (inst.k - 1) ** 2
        target = None
        for v in inst.free_vertices():
            c = inst.contribution(v, inst.tmask)
            if (c < thr) if inst.variant == MAX else (c > thr):
                target = v
                break
        if target is None:
            return inst
        before = inst.t
        inst = inst.exclude(target)
        if trace is not None:
            trace.log("general:exclude-low", "exclude", (target,), inst.t - before, "needless")
        if _find_satisfactory(inst) is not None:
            return inst


def rr_counter_shift(inst: AnnotatedInstance, trace: RuleTrace | None = None) -> AnnotatedInstance:
    """Lower all non-T bonuses by their minimum so some counter reaches zero."""
    free = inst.free_vertices()
    if not free:
        return inst
    amount = min(inst.bonus[v] for v in free)
    if amount <= 0:
        return inst
    before = inst.t
    inst = inst.shift_bonus(amount)
    if trace is not None:
        trace.log("general:no-zero-counter", "shift", (), inst.t - before, f"amount={amount}")
    return inst


def counter_bound_audit(inst: AnnotatedInstance) -> bool:
    """Explicit counter bound after the include/exclude/shift fixpoint:

    bonus(v) <= alpha*deg(u) + |3a-1| * (k(k-1) + k) for a zero-bonus vertex
    u outside T (the minimum-degree one gives the strongest check).
    """
    free = inst.free_vertices()
    if not free:
        return True
    zero = [v for v in free if inst.bonus[v] == 0]
    if not zero:
        return False
    deg_u = min(inst.degree(u) for u in zero)
    cap = inst.alpha * deg_u + abs(3 * inst.alpha - 1) * (inst.k * (inst.k - 1) + inst.k)
    return all(inst.bonus[v] <= cap for v in free)


# ---------------------------------------------------------------------------
# c-closure rules
# ---------------------------------------------------------------------------

def _closure_better_threshold(c: int, k: int) -> int:
    # (c-1)(k-1) suffices for the exchange argument for c >= 2 and also kills
    # cliques of (c-1)k+1 vertices; for c = 1 the sound threshold is k-1.
    return max(k - 1, (c - 1) * (k - 1))


def rr_closure_better(inst: AnnotatedInstance, c: int, trace: RuleTrace | None = None) -> AnnotatedInstance:
    """Exclude v once too many of its neighbors are better (w.r.t. the empty set)."""
    _require_degrading(inst, "rr_closure_better", allow_alpha_zero=True)
    if c < 1:
        raise GuardViolation("c must be >= 1")
    thr = _closure_better_threshold(c, inst.k)
    while True:
        excluded = False
        for v in inst.free_vertices():
            mine = inst.deg_bonus(v)
            x_v = sum(
                1
                for u in iter_mask(inst.graph.masks[v] & inst.alive)
                if inst.better_cmp(inst.deg_bonus(u), mine)
            )
            if x_v > thr:
                before = inst.t
                inst = inst.exclude(v)
                if trace is not None:
                    trace.log("closure:better", "exclude", (v,), inst.t - before, f"xv={x_v} thr={thr}")
                excluded = True
                break
        if not excluded:
            return inst


def closure_xi_degree_bound(c: int, k: int) -> int:
    """Degree threshold at which the X/I extraction is guaranteed to work."""
    return ramsey.rc_bound((c - 1) * k + 1, (k + 1) * k ** (c - 1), c)


def find_closure_XI(inst: AnnotatedInstance, c: int, trace: RuleTrace | None = None) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Greedy common-neighborhood descent around a max-degree vertex.

    Returns (X, I) with I an independent set inside the common neighborhood
    of X, |I| >= (k+1)k^(c-i) for i = |X| <= c-1, and every vertex outside X
    having at most (k+1)k^(c-i-1) neighbors in I.  Both properties are
    verified before returning.
    """
    k = inst.k
    if c < 2:
        raise GuardViolation("X/I extraction needs c >= 2")
    if k < 1:
        raise GuardViolation("X/I extraction needs k >= 1")
    need = closure_xi_degree_bound(c, k)
    free = inst.free_vertices()
    v = max(free, key=lambda u: (inst.degree(u), -u), default=None)
    if v is None or inst.degree(v) < need:
        raise ExtractionPreconditionError(f"no free vertex of degree >= {need}")
    sub, back = inst.graph.induced(iter_mask(inst.graph.masks[v] & inst.alive))
    witness = ramsey.cclosed_ramsey(sub, (c - 1) * k + 1, (k + 1) * k ** (c - 1), c)
    if witness.kind == ramsey.CLIQUE:
        raise ExtractionPreconditionError(
            f"clique of size {(c - 1) * k + 1} in a neighborhood; closure-better rule not at fixpoint"
        )
    i_cur = set(back[i] for i in witness.vertices)
    xs = [v]
    while True:
        i = len(xs)
        tau = (k + 1) * k ** (c - i - 1)
        cand = None
        for u in inst.alive_vertices():
            if u in xs:
                continue
            hits = sum(1 for w in i_cur if inst.graph.has_edge(u, w))
            if hits > tau:
                cand = u
                break
        if cand is None:
            break
        if i == c - 1:
            raise ExtractionPreconditionError("common-neighborhood growth exceeds c-1; graph not c-closed for this c")
        xs.append(cand)
        i_cur = {w for w in i_cur if inst.graph.has_edge(cand, w)}
    i = len(xs)
    iset = tuple(sorted(i_cur))
    if len(iset) < (k + 1) * k ** (c - i):
        raise RuleInternalError("extracted I below its size property")
    tau = (k + 1) * k ** (c - i - 1)
    for u in inst.alive_vertices():
        if u not in xs and sum(1 for w in iset if inst.graph.has_edge(u, w)) > tau:
            raise RuleInternalError("a vertex outside X sees too much of I")
    if not inst.graph.is_independent_set(iset):
        raise RuleInternalError("extracted I is not independent")
    if any(not inst.graph.has_edge(x, w) for x in xs for w in iset):
        raise RuleInternalError("I is not in the common neighborhood of X")
    if trace is not None:
        trace.audit("closure_xi", f"x={len(xs)} i={len(iset)}")
    return tuple(xs), iset


def _worst_of(inst: AnnotatedInstance, vertices) -> int:
    """Vertex every other one is better than: min deg-bonus for Max, max for Min."""
    if inst.variant == MAX:
        return min(vertices, key=lambda v: (inst.deg_bonus(v), v))
    return max(vertices, key=lambda v: (inst.deg_bonus(v), -v))


def rr_closure_independent_set(
    inst: AnnotatedInstance, xs: tuple[int, ...], iset: tuple[int, ...], trace: RuleTrace | None = None
) -> AnnotatedInstance:
    """Exclude the worst vertex of the extracted independent set (k >= 2)."""
    if inst.k < 2:
        raise GuardViolation("closure independent-set rule needs k >= 2")
    candidates = [v for v in iset if not (inst.tmask >> v) & 1]
    if not candidates:
        raise GuardViolation("independent set lies inside T")
    v = _worst_of(inst, candidates)
    before = inst.t
    inst = inst.exclude(v)
    if trace is not None:
        trace.log("closure:independent-set", "exclude", (v,), inst.t - before, f"|I|={len(iset)}")
    return inst


# ---------------------------------------------------------------------------
# Biclique-free rules (degeneracy kernel machinery)
# ---------------------------------------------------------------------------

def bcfree_xi_degree_bound(a: int, b: int, k: int, degeneracy: int | None = None) -> int:
    target = b * k ** (a - 1) + 1
    if degeneracy is not None:
        return (degeneracy + 1) * target
    return ramsey.bcfree_ramsey_bound(a, b, target)


def find_bcfree_XI(
    inst: AnnotatedInstance,
    a: int,
    b: int,
    degeneracy: int | None = None,
    trace: RuleTrace | None = None,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """X/I extraction in K_{a,b}-free graphs, mirroring the c-closed one.

    Returns (X, I) with |X| = i <= a-1, |I| >= b*k^(a-i) + 1 and every vertex
    outside X having at most b*k^(a-i-1) neighbors in I; verified.
    """
    k = inst.k
    if a < 2:
        raise GuardViolation("X/I extraction needs a >= 2")
    target = b * k ** (a - 1) + 1
    need = bcfree_xi_degree_bound(a, b, k, degeneracy)
    free = inst.free_vertices()
    v = max(free, key=lambda u: (inst.degree(u), -u), default=None)
    if v is None or inst.degree(v) < need:
        raise ExtractionPreconditionError(f"no free vertex of degree >= {need}")
    sub, back = inst.graph.induced(iter_mask(inst.graph.masks[v] & inst.alive))
    if degeneracy is not None:
        picked = ramsey.degenerate_independent_set(sub, degeneracy, target)
    else:
        picked = ramsey.bcfree_independent_set(sub, a, b, target)
    i_cur = set(back[i] for i in picked)
    xs = [v]
    while True:
        i = len(xs)
        tau = b * k ** (a - i - 1)
        cand = None
        for u in inst.alive_vertices():
            if u in xs:
                continue
            hits = sum(1 for w in i_cur if inst.graph.has_edge(u, w))
            if hits > tau:
                cand = u
                break
        if cand is None:
            break
        if i == a - 1:
            raise ExtractionPreconditionError("growth exceeds a-1; graph contains K_{a,b}")
        xs.append(cand)
        i_cur = {w for w in i_cur if inst.graph.has_edge(cand, w)}
    i = len(xs)
    iset = tuple(sorted(i_cur))
    if len(iset) < b * k ** (a - i) + 1:
        raise RuleInternalError("extracted I below its size property")
    tau = b * k ** (a - i - 1)
    for u in inst.alive_vertices():
        if u not in xs and sum(1 for w in iset if inst.graph.has_edge(u, w)) > tau:
            raise RuleInternalError("a vertex outside X sees too much of I")
    if not inst.graph.is_independent_set(iset):
        raise RuleInternalError("extracted I is not independent")
    if trace is not None:
        trace.audit("bcfree_xi", f"x={len(xs)} i={len(iset)}")
    return tuple(xs), iset


def rr_bcfree_independent_set(
    inst: AnnotatedInstance, xs: tuple[int, ...], iset: tuple[int, ...], trace: RuleTrace | None = None
) -> AnnotatedInstance:
    candidates = [v for v in iset if not (inst.tmask >> v) & 1]
    if not candidates:
        raise GuardViolation("independent set lies inside T")
    v = _worst_of(inst, candidates)
    before = inst.t
    inst = inst.exclude(v)
    if trace is not None:
        trace.log("bc-free:independent-set", "exclude", (v,), inst.t - before, f"|I|={len(iset)}")
    return inst


# ---------------------------------------------------------------------------
# Pipelines
# ---------------------------------------------------------------------------

def _decided(trace: RuleTrace, inst: AnnotatedInstance, status: str, witness=None) -> KernelOutcome:
    trace.log("pipeline", "decide", tuple(witness) if witness else (), ZERO, status)
    trace.final = summarize(inst)
    return KernelOutcome(status=status, plain=None, witness=tuple(witness) if witness else None, trace=trace)


def _finish_degrading(inst: AnnotatedInstance, trace: RuleTrace) -> KernelOutcome:
    """Shared tail: satisfactory/needless to a joint fixpoint, counter shift,
    counter audit, the degree-bounded better rule, then de-annotation."""
    while True:
        sc = _shortcircuit(inst)
        if sc is not None:
            return _decided(trace, inst, *sc)
        got = rr_include_satisfactory(inst, trace)
        if isinstance(got, tuple):
            status, witness, final = got
            return _decided(trace, final, status, witness)
        inst = got
        nxt = rr_exclude_needless(inst, trace)
        if nxt is inst:
            break
        inst = nxt
        if _find_satisfactory(inst) is None and _shortcircuit(inst) is None:
            break
    sc = _shortcircuit(inst)
    if sc is not None:
        return _decided(trace, inst, *sc)
    inst = rr_counter_shift(inst, trace)
    audit_ok = counter_bound_audit(inst)
    trace.audit("counter_bound_ok", audit_ok)
    if not audit_ok:
        raise RuleInternalError("counter bound audit failed after rule fixpoint")
    inst = rr_delta_better(inst, trace)
    sc = _shortcircuit(inst)
    if sc is not None:
        return _decided(trace, inst, *sc)
    deann = deannotate_max(inst) if inst.variant == MAX else deannotate_min(inst)
    return _emit_kernel(trace, inst, deann)


def _emit_kernel(trace: RuleTrace, inst: AnnotatedInstance, deann: Deannotation) -> KernelOutcome:
    trace.final = summarize(inst)
    trace.deann = deann
    trace.audit("kernel_n", deann.plain.graph.n)
    trace.audit("kernel_m", deann.plain.graph.m)
    if deann.kind == "trivial-no":
        return KernelOutcome(status=DECIDED_NO, plain=None, witness=None, trace=trace)
    return KernelOutcome(status=KERNELIZED, plain=deann.plain, witness=None, trace=trace)


def _start(inst: AnnotatedInstance, name: str) -> RuleTrace:
    trace = RuleTrace(pipeline=name)
    trace.initial = summarize(inst)
    return trace


def kernel_delta(inst: AnnotatedInstance, trace: RuleTrace | None = None) -> KernelOutcome:
    """(Delta + k)-polynomial kernel for the degrading cases with alpha > 0."""
    _require_degrading(inst, "pipeline=delta")
    if trace is None:
        trace = _start(inst, "delta")
    return _finish_degrading(inst, trace)


def kernel_closure(inst: AnnotatedInstance, c: int, trace: RuleTrace | None = None) -> KernelOutcome:
    """k^O(c) kernel: trim by the closure better rule and X/I extraction, then delta."""
    _require_degrading(inst, "pipeline=closure")
    if c < 1:
        raise GuardViolation("pipeline=closure requires c >= 1")
    if trace is None:
        trace = _start(inst, "closure")
    trace.audit("closure_c", c)
    while True:
        sc = _shortcircuit(inst)
        if sc is not None:
            return _decided(trace, inst, *sc)
        inst = rr_closure_better(inst, c, trace)
        sc = _shortcircuit(inst)
        if sc is not None:
            return _decided(trace, inst, *sc)
        if c >= 2 and inst.k >= 2 and inst.delta_tbar() >= closure_xi_degree_bound(c, inst.k):
            xs, iset = find_closure_XI(inst, c, trace)
            inst = rr_closure_independent_set(inst, xs, iset, trace)
            continue
        break
    trace.audit("closure_delta_tbar", inst.delta_tbar())
    return _finish_degrading(inst, trace)


def kernel_degeneracy_max(inst: AnnotatedInstance, d: int, trace: RuleTrace | None = None) -> KernelOutcome:
    """k^O(d) kernel for degrading Max via the biclique-free extraction."""
    if inst.variant != MAX:
        raise GuardViolation("pipeline=degeneracy (max) requires the maximization variant")
    _require_degrading(inst, "pipeline=degeneracy")
    if d < 0:
        raise GuardViolation("degeneracy must be >= 0")
    if trace is None:
        trace = _start(inst, "degeneracy-max")
    a = b = d + 1
    while d >= 1:
        sc = _shortcircuit(inst)
        if sc is not None:
            return _decided(trace, inst, *sc)
        if inst.delta_tbar() < bcfree_xi_degree_bound(a, b, inst.k, d):
            break
        xs, iset = find_bcfree_XI(inst, a, b, degeneracy=d, trace=trace)
        inst = rr_bcfree_independent_set(inst, xs, iset, trace)
    trace.audit("bcfree_delta_tbar", inst.delta_tbar())
    return _finish_degrading(inst, trace)


def kernel_degeneracy_min(inst: AnnotatedInstance, d: int, trace: RuleTrace | None = None) -> KernelOutcome:
    """(d + k)-polynomial kernel for Min with alpha < 1/3 (alpha = 0 included)."""
    if inst.variant != MIN:
        raise GuardViolation("pipeline=degeneracy (min) requires the minimization variant")
    if inst.alpha >= Fraction(1, 3):
        raise GuardViolation(f"pipeline=degeneracy (min) needs alpha<1/3, got {inst.alpha}")
    if trace is None:
        trace = _start(inst, "degeneracy-min")
    sc = _shortcircuit(inst)
    if sc is not None:
        return _decided(trace, inst, *sc)

    if inst.tmask == 0 and inst.t >= d * inst.k:
        witness = _degeneracy_prefix(inst, inst.k)
        if inst.val(witness) <= inst.t:
            trace.audit("min_trivial", f"t={inst.t} dk={d * inst.k}")
            return _decided(trace, inst, DECIDED_YES, witness)

    if inst.alpha == 0:
        if inst.tmask != 0 or any(inst.bonus[v] != 0 for v in inst.alive_vertices()):
            raise GuardViolation("alpha=0 minimization pipeline needs a plain instance (empty T, zero counters)")
        if inst.t < 0:
            return _decided(trace, inst, DECIDED_NO)
        if inst.n_alive >= (d + 1) * inst.k:
            sub, back = inst.graph.induced(inst.alive_vertices())
            picked = ramsey.degenerate_independent_set(sub, d, inst.k)
            witness = tuple(sorted(back[i] for i in picked))
            if inst.val(witness) > inst.t:
                raise RuleInternalError("independent-set witness has positive value")
            return _decided(trace, inst, DECIDED_YES, witness)
        return _emit_kernel(trace, inst, deannotate_identity(inst))

    # alpha in (0, 1/3): high deg+ vertices cannot appear in any solution
    while True:
        target = None
        for v in inst.free_vertices():
            if inst.deg_bonus(v) >= inst.t + inst.k:
                target = v
                break
        if target is None:
            break
        before = inst.t
        inst = inst.exclude(target)
        if trace is not None:
            trace.log("min:high-degplus", "exclude", (target,), inst.t - before, "t+k bound")
        sc = _shortcircuit(inst)
        if sc is not None:
            return _decided(trace, inst, *sc)
    inst = rr_delta_better(inst, trace)
    sc = _shortcircuit(inst)
    if sc is not None:
        return _decided(trace, inst, *sc)
    return _emit_kernel(trace, inst, deannotate_min(inst))


def _degeneracy_prefix(inst: AnnotatedInstance, k: int) -> tuple[int, ...]:
    from .graph import degeneracy_ordering

    sub, back = inst.graph.induced(inst.alive_vertices())
    order, _ = degeneracy_ordering(sub)
    return tuple(sorted(back[i] for i in order[:k]))


def _margin_trim_counters(inst: AnnotatedInstance, trace: RuleTrace):
    """Bound the counters via strictly-better exchanges.

    Exclude u once k-|T| vertices are strictly better than it; include u once
    all but at most k-|T|-1 others are strictly worse.  Interleaved with the
    counter shift this caps every bonus near the zero-counter degree level.
    """
    margin = abs((1 - 3 * inst.alpha) * inst.k)
    while True:
        sc = _shortcircuit(inst)
        if sc is not None:
            return sc + (inst,)
        inst = rr_counter_shift(inst, trace)
        free = inst.free_vertices()
        slots = inst.k_prime
        db = {v: inst.deg_bonus(v) for v in free}

        def strictly_better(w: int, v: int) -> bool:
            if inst.variant == MAX:
                return db[w] >= db[v] + margin
            return db[w] <= db[v] - margin

        acted = False
        for v in free:
            if sum(1 for w in free if w != v and strictly_better(w, v)) >= slots:
                before = inst.t
                inst = inst.exclude(v)
                trace.log("hindex:counter-trim", "exclude", (v,), inst.t - before, "dominated")
                acted = True
                break
        if acted:
            continue
        for v in free:
            not_worse = sum(1 for w in free if w != v and not strictly_better(v, w))
            if not_worse <= slots - 1:
                before = inst.t
                inst = inst.include(v)
                trace.log("hindex:counter-trim", "include", (v,), inst.t - before, "dominating")
                acted = True
                break
        if not acted:
            return inst


def kernel_hindex_max(inst: AnnotatedInstance, h: int, trace: RuleTrace | None = None) -> KernelOutcome:
    """Two-case h-index kernel for Max with alpha > 0.

    Case 1 (at least k vertices of deg+ >= x): every low-deg+ vertex can be
    excluded, then counters are trimmed by exchanges.  Case 2 (alpha > 1/3):
    all very-high-deg+ vertices join T, then the degree-bounded tail runs.
    """
    if inst.variant != MAX:
        raise GuardViolation("pipeline=hindex requires the maximization variant")
    if inst.alpha == 0:
        raise GuardViolation("pipeline=hindex requires alpha > 0")
    if inst.tmask != 0:
        raise GuardViolation("pipeline=hindex starts from an empty partial solution")
    if trace is None:
        trace = _start(inst, "hindex-max")
    sc = _shortcircuit(inst)
    if sc is not None:
        return _decided(trace, inst, *sc)
    margin = abs((1 - 3 * inst.alpha) * inst.k)  # alpha-scaled
    x = h + 1 + abs((1 - 3 * inst.alpha) * inst.k / inst.alpha)
    vx = [v for v in inst.alive_vertices() if inst.deg_bonus(v) >= inst.alpha * x]
    trace.audit("hindex_x", x)
    trace.audit("hindex_vx", len(vx))

    if len(vx) >= inst.k:
        trace.audit("hindex_case", 1)
        cutoff = inst.alpha * x - margin
        for v in [u for u in inst.free_vertices() if inst.deg_bonus(u) < cutoff]:
            before = inst.t
            inst = inst.exclude(v)
            trace.log("hindex:exclude-low", "exclude", (v,), inst.t - before, "below V_x window")
        got = _margin_trim_counters(inst, trace)
        if isinstance(got, tuple):
            status, witness, final = got
            return _decided(trace, final, status, witness)
        inst = got
        sc = _shortcircuit(inst)
        if sc is not None:
            return _decided(trace, inst, *sc)
        return _emit_kernel(trace, inst, deannotate_max(inst))

    trace.audit("hindex_case", 2)
    if not inst.alpha > Fraction(1, 3):
        raise GuardViolation(
            f"pipeline=hindex case 2 requires alpha>1/3, got {inst.alpha} (fewer than k high-degree vertices)"
        )
    cutoff = inst.alpha * x + margin
    while True:
        sc = _shortcircuit(inst)
        if sc is not None:
            return _decided(trace, inst, *sc)
        target = None
        for v in inst.free_vertices():
            if inst.deg_bonus(v) >= cutoff:
                target = v
                break
        if target is None:
            break
        before = inst.t
        inst = inst.include(target)
        trace.log("hindex:include-high", "include", (target,), inst.t - before, "above V_{x+M}")
    return _finish_degrading(inst, trace)


def _check_cover(inst: AnnotatedInstance, cover: tuple[int, ...]) -> tuple[int, ...]:
    cmask = 0
    for v in cover:
        if not (inst.alive >> v) & 1:
            continue
        cmask |= 1 << v
    for v in inst.alive_vertices():
        if (cmask >> v) & 1:
            continue
        if inst.graph.masks[v] & inst.alive & ~cmask:
            raise GuardViolation(f"vertex cover leaves an edge at vertex {v} uncovered")
    return tuple(v for v in cover if (inst.alive >> v) & 1)


def kernel_vc_max(inst: AnnotatedInstance, cover: tuple[int, ...], trace: RuleTrace | None = None) -> KernelOutcome:
    """Vertex-cover kernel for Max, all alpha > 0."""
    if inst.variant != MAX:
        raise GuardViolation("pipeline=vc (max) requires the maximization variant")
    if inst.alpha == 0:
        raise GuardViolation("pipeline=vc (max) requires alpha > 0")
    if inst.tmask != 0:
        raise GuardViolation("pipeline=vc starts from an empty partial solution")
    if trace is None:
        trace = _start(inst, "vc-max")
    cover = _check_cover(inst, cover)
    sc = _shortcircuit(inst)
    if sc is not None:
        return _decided(trace, inst, *sc)
    vc = len(cover)
    margin = abs((1 - 3 * inst.alpha) * inst.k)
    x = vc + abs((1 - 3 * inst.alpha) * inst.k / inst.alpha)
    vx = [v for v in inst.alive_vertices() if inst.deg_bonus(v) >= inst.alpha * x]
    trace.audit("vc_x", x)
    trace.audit("vc_vx", len(vx))

    if len(vx) >= inst.k:
        trace.audit("vc_case", 1)
        cutoff = inst.alpha * x - margin
        for v in [u for u in inst.free_vertices() if inst.deg_bonus(u) < cutoff]:
            before = inst.t
            inst = inst.exclude(v)
            trace.log("vc:exclude-low", "exclude", (v,), inst.t - before, "below V_x window")
        got = _margin_trim_counters(inst, trace)
        if isinstance(got, tuple):
            status, witness, final = got
            return _decided(trace, final, status, witness)
        inst = got
        sc = _shortcircuit(inst)
        if sc is not None:
            return _decided(trace, inst, *sc)
        return _emit_kernel(trace, inst, deannotate_max(inst))

    trace.audit("vc_case", 2)
    cutoff = inst.alpha * x + margin
    while True:
        sc = _shortcircuit(inst)
        if sc is not None:
            return _decided(trace, inst, *sc)
        target = None
        for v in inst.free_vertices():
            if inst.deg_bonus(v) >= cutoff:
                target = v
                break
        if target is None:
            break
        before = inst.t
        inst = inst.include(target)
        trace.log("vc:include-high", "include", (target,), inst.t - before, "above V_{x+M}")
    sc = _shortcircuit(inst)
    if sc is not None:
        return _decided(trace, inst, *sc)
    cset = set(cover)
    # independent-set vertices whose every alive neighbor already sits in T
    fixed = [
        v
        for v in inst.free_vertices()
        if v not in cset and not (inst.graph.masks[v] & inst.alive & ~inst.tmask)
    ]
    if len(fixed) > inst.k:
        ranked = sorted(fixed, key=lambda v: (-inst.contribution(v, inst.tmask), v))
        for v in ranked[inst.k:]:
            before = inst.t
            inst = inst.exclude(v)
            trace.log("vc:prune-fixed", "exclude", (v,), inst.t - before, "fixed contribution")
    sc = _shortcircuit(inst)
    if sc is not None:
        return _decided(trace, inst, *sc)
    return _emit_kernel(trace, inst, deannotate_max(inst))


def kernel_vc_min(inst: AnnotatedInstance, cover: tuple[int, ...], trace: RuleTrace | None = None) -> KernelOutcome:
    """Vertex-cover kernel for Min; alpha = 0 is decided outright when possible."""
    if inst.variant != MIN:
        raise GuardViolation("pipeline=vc (min) requires the minimization variant")
    if inst.tmask != 0:
        raise GuardViolation("pipeline=vc starts from an empty partial solution")
    if trace is None:
        trace = _start(inst, "vc-min")
    cover = _check_cover(inst, cover)
    sc = _shortcircuit(inst)
    if sc is not None:
        return _decided(trace, inst, *sc)
    cset = set(cover)
    iset = [v for v in inst.alive_vertices() if v not in cset]

    if inst.alpha == 0:
        if any(inst.bonus[v] != 0 for v in inst.alive_vertices()):
            raise GuardViolation("alpha=0 vc pipeline needs zero counters")
        if inst.t < 0:
            return _decided(trace, inst, DECIDED_NO)
        if len(iset) >= inst.k:
            witness = tuple(sorted(iset)[: inst.k])
            if inst.val(witness) > inst.t:
                raise RuleInternalError("independent witness has positive value")
            return _decided(trace, inst, DECIDED_YES, witness)
        return _emit_kernel(trace, inst, deannotate_identity(inst))

    vc = len(cover)
    margin = abs((1 - 3 * inst.alpha) * inst.k)
    x = vc + abs((1 - 3 * inst.alpha) * inst.k / inst.alpha)
    trace.audit("vc_x", x)
    while True:
        free = inst.free_vertices()
        db = {v: inst.deg_bonus(v) for v in free}
        target = None
        for v in free:
            if db[v] >= inst.alpha * x:
                better = sum(1 for w in free if w != v and db[w] <= db[v] - margin)
                if better >= inst.k_prime:
                    target = v
                    break
        if target is None:
            break
        before = inst.t
        inst = inst.exclude(target)
        trace.log("vc:exclude-vx", "exclude", (target,), inst.t - before, "I beats V_x")
        sc = _shortcircuit(inst)
        if sc is not None:
            return _decided(trace, inst, *sc)
    isolated = [v for v in inst.free_vertices() if inst.degree(v) == 0]
    if len(isolated) > inst.k:
        ranked = sorted(isolated, key=lambda v: (inst.bonus[v], v))
        for v in ranked[inst.k:]:
            before = inst.t
            inst = inst.exclude(v)
            trace.log("vc:prune-isolated", "exclude", (v,), inst.t - before, "fixed contribution")
    sc = _shortcircuit(inst)
    if sc is not None:
        return _decided(trace, inst, *sc)
    return _emit_kernel(trace, inst, deannotate_min(inst))


# ---------------------------------------------------------------------------
# Pipeline selection
# ---------------------------------------------------------------------------

def select_pipeline(inst: AnnotatedInstance, profile) -> str:
    """Degrading/non-degrading dispatch on the smallest applicable parameter."""
    third = Fraction(1, 3)
    if inst.variant == MAX:
        if inst.alpha == 0:
            raise GuardViolation("pipeline=auto: no kernelization route for max with alpha=0")
        if inst.alpha > third:
            candidates = [
                (profile.degeneracy, 0, "degeneracy"),
                (profile.c_closure, 1, "closure"),
                (profile.h_index, 2, "hindex"),
            ]
            if profile.vc is not None:
                candidates.append((profile.vc, 3, "vc"))
            candidates.append((profile.max_degree, 4, "delta"))
            return min(candidates)[2]
        # 0 < alpha <= 1/3: only the h-index case-1 route or the vc route apply
        margin = abs((1 - 3 * inst.alpha) * inst.k)
        x = profile.h_index + 1 + abs((1 - 3 * inst.alpha) * inst.k / inst.alpha)
        vx = sum(1 for v in inst.alive_vertices() if inst.deg_bonus(v) >= inst.alpha * x)
        if vx >= inst.k and (profile.vc is None or profile.h_index <= profile.vc):
            return "hindex"
        if profile.vc is not None:
            return "vc"
        if vx >= inst.k:
            return "hindex"
        raise GuardViolation(
            "pipeline=auto: max with alpha<=1/3 needs the h-index case or an exact vertex cover"
        )
    if inst.alpha < third:
        candidates = [(profile.degeneracy, 0, "degeneracy")]
        if inst.alpha > 0 and profile.vc is not None:
            candidates.append((profile.vc, 1, "vc"))
        return min(candidates)[2]
    if profile.vc is None:
        raise GuardViolation("pipeline=auto: min with alpha>=1/3 needs an exact vertex cover")
    return "vc"


def run_pipeline(inst: AnnotatedInstance, name: str, profile=None, param_override: int | None = None) -> KernelOutcome:
    """Run one named pipeline; parameters come from the profile unless overridden."""
    from .graph import compute_profile

    if profile is None:
        sub, _ = inst.graph.induced(inst.alive_vertices())
        profile = compute_profile(sub, want_vc=(name in ("vc", "auto")))
    if name == "auto":
        name = select_pipeline(inst, profile)
    if name == "delta":
        return kernel_delta(inst)
    if name == "closure":
        c = param_override if param_override is not None else profile.c_closure
        return kernel_closure(inst, c)
    if name == "degeneracy":
        d = param_override if param_override is not None else profile.degeneracy
        if inst.variant == MAX:
            return kernel_degeneracy_max(inst, d)
        return kernel_degeneracy_min(inst, d)
    if name == "hindex":
        h = param_override if param_override is not None else profile.h_index
        return kernel_hindex_max(inst, h)
    if name == "vc":
        if profile.vertex_cover is None:
            raise GuardViolation("pipeline=vc requires an exact vertex cover (within the vc budget)")
        if inst.variant == MAX:
            return kernel_vc_max(inst, profile.vertex_cover)
        return kernel_vc_min(inst, profile.vertex_cover)
    raise GuardViolation(f"unknown pipeline {name!r}")


PIPELINES = ("auto", "delta", "closure", "degeneracy", "hindex", "vc")
