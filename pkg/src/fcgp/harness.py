"""Seeded instance generation and the oracle-equivalence test driver.

Generators are pure functions of their seeds (Mersenne Twister via
``random.Random``), so instance streams are reproducible across runs.
Equivalence checking recomputes everything from raw instances; it trusts
neither the rules nor the solvers.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .graph import Graph
from .instance import MAX, AnnotatedInstance, GuardViolation, PlainInstance
from .rules import DECIDED_NO, DECIDED_YES, KERNELIZED, KernelOutcome
from .solve import BudgetExceeded, brute_force


def gen_gnp(n: int, p_num: int, p_den: int, seed: int) -> Graph:
    """G(n, p) with p = p_num/p_den; each pair is an edge independently."""
    if n < 0 or p_den <= 0 or not (0 <= p_num <= p_den):
        raise ValueError("need n >= 0 and 0 <= p_num/p_den <= 1")
    rng = random.Random(seed)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.randrange(p_den) < p_num:
                edges.append((u, v))
    return Graph.from_edges(n, edges)


def gen_degenerate(n: int, d: int, seed: int) -> Graph:
    """Random graph of degeneracy <= d: each new vertex picks <= d back-edges."""
    if n < 0 or d < 0:
        raise ValueError("need n >= 0 and d >= 0")
    rng = random.Random(seed)
    edges = []
    for v in range(1, n):
        cnt = rng.randint(0, min(v, d))
        for u in sorted(rng.sample(range(v), cnt)):
            edges.append((u, v))
    return Graph.from_edges(n, edges)


def gen_annotated(
    g: Graph,
    seed: int,
    alpha: Fraction,
    variant: str,
    k_range: tuple[int, int],
    counter_range: tuple[int, int] = (0, 0),
    allow_t: bool = True,
) -> AnnotatedInstance:
    """Random annotated instance whose threshold sits near the true optimum.

    T is small and possibly empty, counters are integers (zero on T), and
    t is the brute-force optimum shifted by a random rational in [-2, 2],
    so yes- and no-instances both occur with substantial frequency.
    """
    rng = random.Random(seed)
    lo, hi = k_range
    k = rng.randint(lo, hi)
    if not (1 <= k <= g.n):
        raise ValueError(f"infeasible k={k} for n={g.n}")
    t_size = rng.choice((0, 0, 0, 1, 1, 2)) if allow_t else 0
    t_size = min(t_size, k - 1, g.n)
    tset = sorted(rng.sample(range(g.n), t_size)) if t_size else []
    tmask = 0
    for v in tset:
        tmask |= 1 << v
    bonus = [Fraction(0)] * g.n
    c_lo, c_hi = counter_range
    for v in range(g.n):
        if not (tmask >> v) & 1 and c_hi > 0:
            bonus[v] = alpha * rng.randint(c_lo, c_hi)
    inst = AnnotatedInstance(
        graph=g,
        alive=(1 << g.n) - 1 if g.n else 0,
        tmask=tmask,
        bonus=tuple(bonus),
        k=k,
        t=Fraction(0),
        alpha=Fraction(alpha),
        variant=variant,
    )
    opt = brute_force(inst).best_value
    if opt is None:
        raise ValueError("instance has no candidate solution")
    shift = Fraction(rng.randint(-8, 8), 4)
    return AnnotatedInstance(
        graph=inst.graph,
        alive=inst.alive,
        tmask=inst.tmask,
        bonus=inst.bonus,
        k=inst.k,
        t=opt + shift,
        alpha=inst.alpha,
        variant=inst.variant,
    )


@dataclass(frozen=True)
class EquivalenceReport:
    status: str  # "match" | "mismatch" | "skipped"
    before_decision: bool | None = None
    after_decision: bool | None = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "match"


def check_equivalence(before: AnnotatedInstance, after, budget: int = 2_000_000) -> EquivalenceReport:
    """Compare brute-force decisions before and after a transformation.

    ``after`` may be an annotated instance, a plain instance, or a
    :class:`KernelOutcome`; decided outcomes additionally have their witness
    re-evaluated on the *before* instance.
    """
    try:
        res_before = brute_force(before, budget=budget)
    except BudgetExceeded as exc:
        return EquivalenceReport("skipped", detail=f"oracle budget: {exc}")

    if isinstance(after, KernelOutcome):
        if after.status == DECIDED_YES:
            after_dec = True
            witness = after.witness
            if witness is not None:
                value = before.val(witness)
                meets = value >= before.t if before.variant == MAX else value <= before.t
                contains_t = not (before.tmask & ~_as_mask(witness))
                if not (meets and len(witness) == before.k and contains_t):
                    return EquivalenceReport(
                        "mismatch",
                        res_before.decision,
                        True,
                        f"decided_yes witness {witness} invalid on the original (value {value} vs t {before.t})",
                    )
        elif after.status == DECIDED_NO:
            after_dec = False
        elif after.status == KERNELIZED:
            after_dec = _plain_decision(after.plain, budget)
            if after_dec is None:
                return EquivalenceReport("skipped", detail="kernel too large for the oracle budget")
        else:
            return EquivalenceReport("skipped", detail=f"unknown outcome status {after.status}")
    elif isinstance(after, PlainInstance):
        after_dec = _plain_decision(after, budget)
        if after_dec is None:
            return EquivalenceReport("skipped", detail="plain instance too large for the oracle budget")
    elif isinstance(after, AnnotatedInstance):
        try:
            after_dec = brute_force(after, budget=budget).decision
        except BudgetExceeded as exc:
            return EquivalenceReport("skipped", detail=f"oracle budget: {exc}")
    else:
        raise TypeError(f"cannot check equivalence against {type(after)!r}")

    if res_before.decision == after_dec:
        return EquivalenceReport("match", res_before.decision, after_dec)
    return EquivalenceReport(
        "mismatch",
        res_before.decision,
        after_dec,
        f"before optimum {res_before.best_value} vs t {before.t}",
    )


def _plain_decision(plain: PlainInstance, budget: int) -> bool | None:
    try:
        return brute_force(plain.annotate(), budget=budget).decision
    except BudgetExceeded:
        return None


def _as_mask(vertices) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


# ---------------------------------------------------------------------------
# Test manifests (battery input)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ManifestRow:
    generator: str
    params: dict[str, str]
    seed: int
    count: int
    alpha: Fraction
    variant: str
    pipeline: str

    def instances(self):
        """Yield (seed, AnnotatedInstance) pairs for this row."""
        k_lo, k_hi = _parse_range(self.params.get("k", "1:3"))
        c_lo, c_hi = _parse_range(self.params.get("counter", "0:0"))
        allow_t = self.params.get("T", "") != "none"
        for seed in range(self.seed, self.seed + self.count):
            g = self.build_graph(seed)
            try:
                yield seed, gen_annotated(
                    g, seed, self.alpha, self.variant, (k_lo, min(k_hi, max(1, g.n))),
                    (c_lo, c_hi), allow_t=allow_t,
                )
            except ValueError:
                continue

    def build_graph(self, seed: int) -> Graph:
        if self.generator == "gnp":
            n = int(self.params["n"])
            p = Fraction(self.params.get("p", "1/2"))
            return gen_gnp(n, p.numerator, p.denominator, seed)
        if self.generator == "degenerate":
            return gen_degenerate(int(self.params["n"]), int(self.params["d"]), seed)
        raise ValueError(f"unknown generator {self.generator!r}")


def _parse_range(text: str) -> tuple[int, int]:
    if ":" in text:
        lo, hi = text.split(":", 1)
        return int(lo), int(hi)
    return int(text), int(text)


def parse_manifest(text: str) -> list[ManifestRow]:
    """One row per line: ``<generator> key=value ...``; ``#`` comments."""
    rows = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        params = {}
        for tok in tokens[1:]:
            if "=" not in tok:
                raise ValueError(f"manifest line {no}: bad token {tok!r}")
            key, val = tok.split("=", 1)
            params[key] = val
        try:
            rows.append(
                ManifestRow(
                    generator=tokens[0],
                    params=params,
                    seed=int(params.get("seed", "0")),
                    count=int(params.get("count", "1")),
                    alpha=Fraction(params["alpha"]),
                    variant=params["variant"],
                    pipeline=params.get("pipeline", "auto"),
                )
            )
        except KeyError as exc:
            raise ValueError(f"manifest line {no}: missing field {exc}") from None
    return rows


@dataclass
class BatterySummary:
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    failures: list[tuple[ManifestRow, int, str]] = None

    def __post_init__(self):
        if self.failures is None:
            self.failures = []


def run_battery(rows: list[ManifestRow], budget: int = 2_000_000) -> BatterySummary:
    """Run every manifest row through its pipeline and the equivalence oracle."""
    from .rules import run_pipeline

    summary = BatterySummary()
    for row in rows:
        for seed, inst in row.instances():
            try:
                outcome = run_pipeline(inst, row.pipeline)
            except GuardViolation as exc:
                summary.skipped += 1
                continue
            except BudgetExceeded:
                summary.skipped += 1
                continue
            report = check_equivalence(inst, outcome, budget=budget)
            if report.status == "match":
                summary.passed += 1
            elif report.status == "skipped":
                summary.skipped += 1
            else:
                summary.failed += 1
                summary.failures.append((row, seed, report.detail))
    return summary
