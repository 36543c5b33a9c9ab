"""Command-line front end: params, kernelize, solve, verify, battery.

Every numeric value printed is an exact integer or fraction ``p/q``; alpha
and t are accepted only in that form.  Exit codes are a stable contract:

    0  decided and consistent          3  guard violation
    1  decided no (solve mode)         4  budget exceeded
    2  usage or parse error            5  verification mismatch
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

from .graph import GraphFormatError, compute_profile, parse_graph, sniff_format
from .harness import parse_manifest, run_battery
from .instance import (
    MAX,
    MIN,
    AnnotatedInstance,
    GuardViolation,
    PlainInstance,
    lift_witness,
    LiftError,
)
from .rules import DECIDED_NO, DECIDED_YES, PIPELINES, run_pipeline
from .solve import (
    BudgetExceeded,
    UndecidedWithinBudget,
    branch_degrading,
    brute_force,
    densest_vc,
    hindex_fpt_max,
    solve_auto,
    solve_third,
)

EXIT_OK = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_BUDGET = 4
EXIT_MISMATCH = 5

_FRACTION_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


class UsageError(ValueError):
    pass


def parse_fraction(text: str) -> Fraction:
    """Fractions 'p/q' or integers only; decimals are rejected outright."""
    if not _FRACTION_RE.match(text.strip()):
        raise UsageError(f"expected an integer or fraction 'P/Q', got {text!r}")
    return Fraction(text.strip())


def _read_graph(path: str, fmt: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read graph file {path}: {exc}") from None
    if text.startswith("fcgp "):
        # kernel files are self-describing: drop the header, keep the edge list
        text = text.split("\n", 1)[1] if "\n" in text else ""
    if fmt == "auto":
        fmt = sniff_format(text)
    return parse_graph(text, fmt)


def _value_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--alpha", required=True, help="alpha as P/Q or integer")
    sub.add_argument("--k", required=True, type=int)
    sub.add_argument("--t", required=True, help="threshold as P/Q or integer")
    sub.add_argument("--variant", required=True, choices=(MAX, MIN))
    sub.add_argument("--format", default="auto", choices=("auto", "edgelist", "dimacs"))


def _plain_from_args(args) -> PlainInstance:
    g = _read_graph(args.graph, args.format)
    return PlainInstance(
        graph=g, k=args.k, t=parse_fraction(args.t), alpha=parse_fraction(args.alpha), variant=args.variant
    )


def _profile_dict(profile) -> dict:
    return {
        "delta": profile.max_degree,
        "degeneracy": profile.degeneracy,
        "hindex": profile.h_index,
        "closure": profile.c_closure,
        "vc": profile.vc if profile.vc is not None else "-",
    }


def _emit_report(args, report: dict, started: float) -> None:
    if getattr(args, "timings", False):
        report["timings"] = {"total_ms": int((time.monotonic() - started) * 1000)}
    if getattr(args, "json", False):
        print(json.dumps(report, indent=2, default=str))


def kernel_file_text(plain: PlainInstance) -> str:
    lines = [plain.header_line(), f"{plain.graph.n} {plain.graph.m}"]
    lines.extend(f"{u} {v}" for u, v in plain.graph.edges())
    return "\n".join(lines) + "\n"


def parse_kernel_file(text: str) -> PlainInstance:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("fcgp "):
        raise UsageError("kernel file must start with an 'fcgp ...' header line")
    toks = lines[0].split()
    if len(toks) != 5 or toks[1] not in (MAX, MIN):
        raise UsageError(f"malformed kernel header {lines[0]!r}")
    fields = dict(tok.split("=", 1) for tok in toks[2:])
    g = parse_graph("\n".join(lines[1:]), "edgelist")
    return PlainInstance(
        graph=g,
        k=int(fields["k"]),
        t=parse_fraction(fields["t"]),
        alpha=parse_fraction(fields["alpha"]),
        variant=toks[1],
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_params(args) -> int:
    started = time.monotonic()
    g = _read_graph(args.graph, args.format)
    profile = compute_profile(g, want_vc=not args.no_vc, vc_budget=args.vc_budget)
    d = _profile_dict(profile)
    print(" ".join(f"{key}={val}" for key, val in d.items()))
    if profile.vertex_cover is not None:
        print("vertex_cover=" + ",".join(map(str, profile.vertex_cover)))
    print("degeneracy_ordering=" + ",".join(map(str, profile.degeneracy_ordering)))
    _emit_report(args, {"command": "params", "inputs": {"graph": args.graph}, "profile": d, "result": d}, started)
    return EXIT_OK


def cmd_kernelize(args) -> int:
    started = time.monotonic()
    plain = _plain_from_args(args)
    inst = plain.annotate()
    profile = compute_profile(plain.graph, want_vc=True, vc_budget=args.vc_budget)
    outcome = run_pipeline(inst, args.pipeline, profile=profile, param_override=args.param)
    trace_text = outcome.trace.to_text()
    if args.trace:
        Path(args.trace).write_text(trace_text)
    report = {
        "command": "kernelize",
        "inputs": {
            "graph": args.graph,
            "alpha": str(plain.alpha),
            "k": plain.k,
            "t": str(plain.t),
            "variant": plain.variant,
            "pipeline": args.pipeline,
        },
        "profile": _profile_dict(profile),
        "trace_summary": {
            "pipeline": outcome.trace.pipeline,
            "entries": len(outcome.trace.entries),
            "audits": outcome.trace.audits,
        },
    }
    if outcome.status == DECIDED_YES:
        witness = ",".join(map(str, outcome.witness)) if outcome.witness else ""
        print(f"decided: YES witness={witness}")
        report["result"] = {"status": "decided_yes", "witness": witness}
        _emit_report(args, report, started)
        return EXIT_OK
    if outcome.status == DECIDED_NO:
        print("decided: NO")
        report["result"] = {"status": "decided_no"}
        _emit_report(args, report, started)
        return EXIT_OK
    text = kernel_file_text(outcome.plain)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    kp = outcome.plain
    print(f"kernelized: n={kp.graph.n} m={kp.graph.m} k={kp.k} t={kp.t}", file=sys.stderr)
    report["result"] = {
        "status": "kernelized",
        "n": kp.graph.n,
        "m": kp.graph.m,
        "k": kp.k,
        "t": str(kp.t),
    }
    _emit_report(args, report, started)
    return EXIT_OK


def cmd_solve(args) -> int:
    started = time.monotonic()
    plain = _plain_from_args(args)
    inst = plain.annotate()
    profile = compute_profile(plain.graph, want_vc=True, vc_budget=args.vc_budget)
    solver = args.solver
    if solver == "auto":
        res = solve_auto(inst, profile=profile, budget=args.budget)
    elif solver == "brute":
        res = brute_force(inst, budget=args.budget)
    elif solver == "branch":
        res = branch_degrading(inst, profile.degeneracy)
    elif solver == "third":
        res = solve_third(inst)
    elif solver == "hindex":
        res = hindex_fpt_max(inst, profile.h_index, subset_budget=args.budget)
    elif solver == "densest-vc":
        if profile.vertex_cover is None:
            raise GuardViolation("densest-vc needs an exact vertex cover within the vc budget")
        res = densest_vc(inst, profile.vertex_cover, budget=args.budget)
    else:
        raise UsageError(f"unknown solver {solver!r}")
    decision = "YES" if res.decision else "NO"
    value = "-" if res.best_value is None else str(res.best_value)
    witness = ",".join(map(str, res.witness)) if res.witness else ""
    print(f"decision={decision} value={value} witness={witness} solver={res.solver_id} nodes={res.nodes_explored}")
    _emit_report(
        args,
        {
            "command": "solve",
            "inputs": {
                "graph": args.graph,
                "alpha": str(plain.alpha),
                "k": plain.k,
                "t": str(plain.t),
                "variant": plain.variant,
                "solver": solver,
            },
            "profile": _profile_dict(profile),
            "result": {
                "decision": decision,
                "value": value,
                "witness": witness,
                "solver": res.solver_id,
                "nodes": res.nodes_explored,
            },
        },
        started,
    )
    return EXIT_OK if res.decision else EXIT_NO


def cmd_verify(args) -> int:
    started = time.monotonic()
    plain = _plain_from_args(args)
    inst = plain.annotate()
    profile = compute_profile(plain.graph, want_vc=True, vc_budget=args.vc_budget)
    outcome = run_pipeline(inst, args.pipeline, profile=profile, param_override=args.param)

    def fail(msg: str) -> int:
        print(f"MISMATCH: {msg}")
        return EXIT_MISMATCH

    if outcome.status in (DECIDED_YES, DECIDED_NO):
        my_decision = outcome.status == DECIDED_YES
        if my_decision:
            value = inst.val(outcome.witness)
            meets = value >= inst.t if inst.variant == MAX else value <= inst.t
            if not meets or len(outcome.witness) != inst.k:
                return fail(f"decided witness evaluates to {value} vs t {inst.t}")
        lifted = outcome.witness
    else:
        regenerated = kernel_file_text(outcome.plain)
        kernel_text = Path(args.kernel).read_text() if args.kernel else regenerated
        file_plain = parse_kernel_file(kernel_text)
        res_file = brute_force(file_plain.annotate(), budget=args.budget)
        res_mine = (
            res_file
            if kernel_text == regenerated
            else brute_force(outcome.plain.annotate(), budget=args.budget)
        )
        if res_file.decision != res_mine.decision:
            return fail(
                f"kernel file decision {res_file.decision} != regenerated kernel decision {res_mine.decision}"
            )
        if args.trace:
            if Path(args.trace).read_text() != outcome.trace.to_text():
                return fail("trace file does not match the regenerated trace")
        my_decision = res_mine.decision
        lifted = None
        if my_decision:
            try:
                lifted = lift_witness(outcome.trace.deann, _final_annotated(inst, outcome), res_mine.witness)
            except LiftError as exc:
                return fail(f"witness lifting failed: {exc}")
            value = inst.val(lifted)
            meets = value >= inst.t if inst.variant == MAX else value <= inst.t
            if not meets:
                return fail(f"lifted witness evaluates to {value} vs t {inst.t}")

    if args.oracle:
        res = brute_force(inst, budget=args.budget)
        if res.decision != my_decision:
            return fail(f"oracle decision {res.decision} != pipeline decision {my_decision}")

    witness = ",".join(map(str, lifted)) if lifted else ""
    print(f"verified: decision={'YES' if my_decision else 'NO'} witness={witness}")
    _emit_report(
        args,
        {
            "command": "verify",
            "inputs": {"graph": args.graph, "pipeline": args.pipeline},
            "profile": _profile_dict(profile),
            "trace_summary": {"entries": len(outcome.trace.entries), "audits": outcome.trace.audits},
            "result": {"decision": "YES" if my_decision else "NO", "witness": witness},
        },
        started,
    )
    return EXIT_OK


def _final_annotated(initial: AnnotatedInstance, outcome) -> AnnotatedInstance:
    return outcome.trace.replay(initial)


def cmd_battery(args) -> int:
    started = time.monotonic()
    try:
        rows = parse_manifest(Path(args.manifest).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read manifest {args.manifest}: {exc}") from None
    summary = run_battery(rows, budget=args.budget)
    print(f"pass={summary.passed} fail={summary.failed} skip={summary.skipped}")
    if summary.failures:
        outdir = Path(args.fail_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        for idx, (row, seed, detail) in enumerate(summary.failures):
            path = outdir / f"failure-{idx:03d}.txt"
            body = f"# {row.generator} seed={seed} pipeline={row.pipeline} detail={detail}\n"
            for inst_seed, inst in row.instances():
                if inst_seed == seed:
                    body += inst.to_text()
                    break
            path.write_text(body)
        print(f"wrote {len(summary.failures)} failing instances to {outdir}")
    _emit_report(
        args,
        {
            "command": "battery",
            "inputs": {"manifest": args.manifest},
            "result": {"pass": summary.passed, "fail": summary.failed, "skip": summary.skipped},
        },
        started,
    )
    return EXIT_OK if summary.failed == 0 else EXIT_MISMATCH


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fcgp", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="compute structural parameters of a graph")
    p.add_argument("graph")
    p.add_argument("--format", default="auto", choices=("auto", "edgelist", "dimacs"))
    p.add_argument("--no-vc", action="store_true", help="skip the exact vertex cover search")
    p.add_argument("--vc-budget", type=int, default=25)
    p.add_argument("--json", action="store_true")
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("kernelize", help="run a kernelization pipeline")
    p.add_argument("graph")
    _value_flags(p)
    p.add_argument("--pipeline", default="auto", choices=PIPELINES)
    p.add_argument("--param", type=int, default=None, help="override the structural parameter value")
    p.add_argument("--out", default=None, help="kernel output file (default: stdout)")
    p.add_argument("--trace", default=None, help="rule trace output file")
    p.add_argument("--vc-budget", type=int, default=25)
    p.add_argument("--json", action="store_true")
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=cmd_kernelize)

    p = sub.add_parser("solve", help="solve an instance exactly")
    p.add_argument("graph")
    _value_flags(p)
    p.add_argument("--solver", default="auto", choices=("auto", "brute", "branch", "third", "hindex", "densest-vc"))
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--vc-budget", type=int, default=25)
    p.add_argument("--json", action="store_true")
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="round-trip kernelize/solve/lift and cross-check")
    p.add_argument("graph")
    _value_flags(p)
    p.add_argument("--pipeline", default="auto", choices=PIPELINES)
    p.add_argument("--param", type=int, default=None)
    p.add_argument("--kernel", default=None, help="kernel file to check (default: regenerate)")
    p.add_argument("--trace", default=None, help="trace file to check against the regenerated trace")
    p.add_argument("--oracle", action="store_true", help="also brute-force the original instance")
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--vc-budget", type=int, default=25)
    p.add_argument("--json", action="store_true")
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("battery", help="run a manifest of seeded equivalence checks")
    p.add_argument("manifest")
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--fail-dir", default="battery-failures")
    p.add_argument("--json", action="store_true")
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=cmd_battery)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except GuardViolation as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except UndecidedWithinBudget as exc:
        print(f"undecided within budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, GraphFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
