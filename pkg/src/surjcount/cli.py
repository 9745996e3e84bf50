"""Command-line interface: ``surjcount <command> [options]``.

Exit codes: 0 success, 1 verification failure or other error, 2 malformed
input, 3 precondition violated, 4 enumeration budget exceeded, 5 no
tractable route, 6 inconsistent oracle answers, 7 distinguisher search
exhausted.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
import time
from fractions import Fraction

from . import decomposition, graph
from .approx import as_fraction, mc_estimate_comp
from .brute import ListAssignment, count_comp, count_sur, set_budget
from .classifier import FPRAS, METHODS, PROBLEMS, classify_approx, classify_exact, count_problem
from .decomposition import WeightedGraphSet, build_table
from .errors import NotTractableError, PreconditionError, SurjcountError
from .graph import Graph, read_graph
from .interpolation import (
    ReductionTrace,
    component_replacement_count,
    hom_via_z_search,
    recover_hom_via_comp,
    recover_hom_via_sur,
    strip_size1_interpolation,
)
from .verify import SUITES, run_suite

SCHEMA = "surjcount/1"
REDUCTIONS = ("strip-size1", "hom-via-comp", "hom-via-sur", "component-replacement", "hom-via-z")


def _anchors(text: str | None):
    if text is None:
        return None
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise PreconditionError(f"anchors must be comma-separated integers, got {text!r}") from None


def _lists(path: str | None, G: Graph):
    if path is None:
        return None
    with open(path, encoding="utf-8") as fh:
        return ListAssignment.from_json(fh.read(), G.n)


def cmd_count(args) -> dict:
    H = read_graph(args.target)
    G = read_graph(args.input)
    lists = _lists(args.lists, G)
    anchors = _anchors(args.anchors)
    methods = args.method.split(",")
    results = []
    for m in methods:
        value, used = count_problem(args.problem, G, H, lists, anchors, m.strip())
        results.append((used, value))
    out = {
        "problem": args.problem,
        "method": results[0][0],
        "count": str(results[0][1]),
        "citations": [classify_exact(H).citations[args.problem]],
    }
    if len(results) > 1:
        out["cross_check"] = [{"method": m, "count": str(v)} for m, v in results]
        out["agree"] = len({v for _, v in results}) == 1
        if not out["agree"]:
            out["exit_code"] = 1
    return out


def cmd_classify(args) -> dict:
    H = read_graph(args.target)
    rep = classify_exact(H)
    return dict(rep.to_dict(), target=H.to_dict())


def cmd_decompose(args) -> dict:
    H = read_graph(args.target)
    table = build_table(H, args.bound)
    return dict(table.to_dict(), text=table.to_text(),
                citations=["subgraph-decomposition"])


def cmd_approx(args) -> dict:
    H = read_graph(args.target)
    G = read_graph(args.input)
    label = classify_approx(H)
    if label != FPRAS:
        raise NotTractableError(f"no approximation scheme offered: target is {label}")
    seed = args.seed
    generated = seed is None
    if generated:
        seed = secrets.randbits(63)
        print(f"surjcount: no --seed given, using {seed}", file=sys.stderr)
    eps = as_fraction(args.epsilon)
    runs = []
    for i in range(args.runs):
        t0 = time.perf_counter()
        r = mc_estimate_comp(G, H, eps, args.delta, seed + i)
        d = r.to_dict()
        d["seconds"] = round(time.perf_counter() - t0, 3)
        runs.append(d)
    out = {
        "seed": seed,
        "seed_generated": generated,
        "estimate": runs[0]["value"],
        "estimate_float": runs[0]["value_float"],
        "method": "monte-carlo-" + runs[0]["case"],
        "citations": ["approximate-compaction-dichotomy"],
    }
    if args.runs > 1:
        out["runs"] = runs
        try:
            truth = count_comp(G, H)
        except SurjcountError:
            truth = None
        out["truth"] = None if truth is None else str(truth)
        if truth is not None:
            inside = sum(
                1 for d in runs if abs(Fraction(d["value"]) - truth) <= eps * truth
            )
            out["within_epsilon_rate"] = inside / len(runs)
    else:
        out["run"] = runs[0]
    return out


def cmd_reduce(args) -> dict:
    H = read_graph(args.target)
    G = read_graph(args.input)
    tr = ReductionTrace()
    extra = {}
    if args.name == "strip-size1":
        value = strip_size1_interpolation(G, H, count_comp, tr)
    elif args.name == "hom-via-comp":
        value = recover_hom_via_comp(G, H, count_comp, tr)
    elif args.name == "hom-via-sur":
        value = recover_hom_via_sur(G, H, count_sur, tr)
    elif args.name == "component-replacement":
        J, value = component_replacement_count(G, H, count_comp, tr)
        extra["component"] = J.to_dict()
    else:
        if args.member is None:
            raise PreconditionError("hom-via-z needs --member, the graph whose hom count is recovered")
        member = read_graph(args.member)
        ws = WeightedGraphSet.from_table(build_table(H, args.bound))
        value, d = hom_via_z_search(
            G, args.vertex, ws, member, lambda X: count_comp(X, H), args.max_n, tr,
        )
        extra["distinguisher"] = {"graph": d.g.to_dict(), "root": d.v, "scores": list(d.scores)}
    return dict(
        {"reduction": args.name, "count": str(value), "oracle_calls": tr.count(),
         "trace": tr.to_dict(), "method": args.name},
        **extra,
    )


def cmd_verify(args) -> dict:
    res = run_suite(args.suite, args.max_n, args.seed)
    out = res.to_dict()
    out["method"] = "verify"
    if not res.passed:
        out["exit_code"] = 1
    return out


def _text(command: str, out: dict) -> str:
    if command == "decompose":
        return out["text"]
    if command == "verify":
        lines = [f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}"
                 + (f"  ({c['detail']})" if c["detail"] else "") for c in out["checks"]]
        lines.append(f"suite {out['suite']}: {'pass' if out['passed'] else 'FAIL'}")
        return "\n".join(lines) + "\n"
    if command == "classify":
        lines = [f"{p}: {out['labels'][p]}" for p in PROBLEMS]
        lines.append(f"approx: {out['approx']}")
        for c in out["inventory"]:
            lines.append(f"component {c['vertices']}: {c['kind']}")
        return "\n".join(lines) + "\n"
    if command == "approx":
        s = f"{out['estimate_float']:.6g} ({out['estimate']}) seed {out['seed']}\n"
        if "within_epsilon_rate" in out:
            s += f"within epsilon: {out['within_epsilon_rate']:.3f} of {len(out['runs'])} runs\n"
        return s
    s = out["count"] + "\n"
    if "cross_check" in out:
        s += "".join(f"  {c['method']}: {c['count']}\n" for c in out["cross_check"])
    return s


COMMANDS = {
    "count": cmd_count,
    "classify": cmd_classify,
    "decompose": cmd_decompose,
    "approx": cmd_approx,
    "reduce": cmd_reduce,
    "verify": cmd_verify,
}


def _global_flags(parser: argparse.ArgumentParser, top: bool) -> None:
    # subcommands accept the flags too, without clobbering values given earlier
    dflt = (lambda v: v) if top else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--format", choices=("json", "text"), default=dflt("json"))
    parser.add_argument("--budget", type=int, default=dflt(None), help="enumeration node budget")
    parser.add_argument("--bound", type=int, default=dflt(None),
                        help="vertex bound for canonical forms and decomposition tables")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, top=False)

    p = argparse.ArgumentParser(prog="surjcount",
                                description="Exact and approximate counting of graph homomorphisms, "
                                            "surjections, compactions and retractions.")
    _global_flags(p, top=True)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", parents=[common], help="exact count")
    c.add_argument("--problem", required=True, choices=PROBLEMS)
    c.add_argument("--target", required=True, help="target graph H")
    c.add_argument("--input", required=True, help="input graph G")
    c.add_argument("--lists", help='JSON file {"lists": {"v": [targets]}}')
    c.add_argument("--anchors", help="comma-separated anchor vertices (ret)")
    c.add_argument("--method", default="auto",
                   help="auto, a method name, or two names separated by a comma to cross-check; "
                        + "; ".join(f"{k}: {', '.join(v)}" for k, v in METHODS.items()))

    c = sub.add_parser("classify", parents=[common], help="complexity labels for a target")
    c.add_argument("--target", required=True)

    c = sub.add_parser("decompose", parents=[common], help="subgraph decomposition table")
    c.add_argument("--target", required=True)

    c = sub.add_parser("approx", parents=[common], help="randomized compaction estimate")
    c.add_argument("--target", required=True)
    c.add_argument("--input", required=True)
    c.add_argument("--epsilon", default="0.2")
    c.add_argument("--delta", default="0.25")
    c.add_argument("--seed", type=int)
    c.add_argument("--runs", type=int, default=1)

    c = sub.add_parser("reduce", parents=[common], help="run an interpolation reduction")
    c.add_argument("--name", required=True, choices=REDUCTIONS)
    c.add_argument("--target", required=True)
    c.add_argument("--input", required=True)
    c.add_argument("--member", help="hom-via-z: member graph to recover")
    c.add_argument("--vertex", type=int, default=0, help="hom-via-z: gluing vertex of G")
    c.add_argument("--max-n", "--maxN", dest="max_n", type=int, default=6,
                   help="hom-via-z: distinguisher search bound")

    c = sub.add_parser("verify", parents=[common], help="run a self-check suite")
    c.add_argument("--suite", required=True, choices=SUITES)
    c.add_argument("--max-n", "--maxN", dest="max_n", type=int)
    c.add_argument("--seed", type=int, default=0)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        if args.command == "approx" and args.runs < 1:
            raise PreconditionError("--runs must be positive")
        if args.budget is not None:
            set_budget(args.budget)
        if args.bound is not None:
            graph.CANONICAL_BOUND = max(args.bound, graph.CANONICAL_BOUND)
            decomposition.DECOMPOSITION_BOUND = args.bound
        out = COMMANDS[args.command](args)
    except SurjcountError as exc:
        err = {"schema": SCHEMA, "command": argv, "error": type(exc).__name__,
               "message": str(exc), "exit_code": exc.exit_code}
        if args.format == "json":
            print(json.dumps(err), file=sys.stderr)
        else:
            print(f"surjcount: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"surjcount: {exc}", file=sys.stderr)
        return 2
    code = out.pop("exit_code", 0)
    if args.format == "json":
        out = dict({"schema": SCHEMA, "command": argv}, **out)
        out["seconds"] = round(time.perf_counter() - t0, 3)
        print(json.dumps(out, indent=2))
    else:
        sys.stdout.write(_text(args.command, out))
    return code


if __name__ == "__main__":
    sys.exit(main())
