"""Command-line entry point.

Exit codes: 0 success, 1 verification or bound failure, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from pathlib import Path

from mcut.bench import aggregate, resolve_workers, run_bench, write_reports
from mcut.decomposition import heuristic_tree_decomposition
from mcut.errors import InputError, InternalError, McutError, VerificationError
from mcut.fractional import DEFAULT_EPSILON, solve_fractional
from mcut.io import (InstanceFiles, format_cut, generate_partial_ktree, parse_cut, read_instance,
                     write_instance)
from mcut.oracle import brute_force_multicut, verify_multicut, verify_sdd
from mcut.pipeline import run_pipeline
from mcut.region import gvy_bound, gvy_multicut
from mcut.report import dumps, solve_report

log = logging.getLogger("mcut")


def _emit(text: str, dest: str | None) -> None:
    if dest:
        Path(dest).write_text(text)
    else:
        sys.stdout.write(text)


def _instance(args) -> InstanceFiles:
    return read_instance(args.graph, getattr(args, "td", None))


def _caps(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        return (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None


def _epsilon(text: str) -> float:
    eps = float(text)
    if not 0.0 < eps < 1.0:
        raise argparse.ArgumentTypeError(f"epsilon must lie in (0, 1), got {text}")
    return eps


# ----------------------------------------------------------------- commands


def cmd_solve(args) -> int:
    inst = _instance(args)
    report = solve_report(inst, epsilon=args.eps, lengths=args.lengths, oracle=args.oracle,
                          baseline=args.baseline, timings=args.timings)
    _emit(dumps(report), args.json)
    if args.cut_out:
        Path(args.cut_out).write_text(
            "".join(f"{i}\n" for i in report["algorithm"]["cut_edges"]))
    if not report["verification"]["ok"]:
        print(f"verification failed: {report['verification']}", file=sys.stderr)
        return 1
    return 0


def cmd_lp(args) -> int:
    g = _instance(args).graph
    fs, fp = solve_fractional(g, args.eps)
    out = {
        "epsilon": fs.epsilon,
        "F*": fs.cost,
        "flow": fp.total,
        "scale": fs.scale,
        "congestion": fp.congestion,
        "dropped_pairs": list(fs.dropped_pairs),
        "pair_distances": list(fs.pair_distances),
        "lengths": [fs.x[e.id] for e in g.edges],
    }
    _emit(dumps(out), args.json)
    return 0


def cmd_gvy(args) -> int:
    g = _instance(args).graph
    fs, fp = solve_fractional(g, args.eps)
    cut = gvy_multicut(g, fs)
    bound = gvy_bound(g.k, fs.cost)
    bad = verify_multicut(g, cut)
    out = {"F*": fs.cost, "flow": fp.total, "cost": cut.cost, "bound": bound,
           "cut_edges": [i + 1 for i in cut.sorted_ids()], "multicut_ok": bad is None}
    _emit(dumps(out), args.json)
    return 0 if bad is None and cut.cost <= bound + 1e-6 else 1


def cmd_exact(args) -> int:
    g = _instance(args).graph
    cut = brute_force_multicut(g, max_edges=args.max_edges)
    out = {"opt_cost": cut.cost, "cut_edges": [i + 1 for i in cut.sorted_ids()]}
    _emit(dumps(out), args.json)
    if args.cut_out:
        Path(args.cut_out).write_text(format_cut(cut.edge_ids))
    return 0


def cmd_verify(args) -> int:
    inst = _instance(args)
    g = inst.graph
    ids = parse_cut(Path(args.cut).read_text(), g)
    bad = verify_multicut(g, ids)
    out = {"multicut_ok": bad is None, "witness": str(bad) if bad else None}
    if args.sdd:
        if args.lengths == "lp":
            x = solve_fractional(g, args.eps)[0].x
        else:
            if not inst.has_lengths and g.m:
                raise InputError("the graph file carries no lengths; use --lengths lp")
            x = None
        bad_sdd = verify_sdd(g, ids, x)
        out["sdd_ok"] = bad_sdd is None
        out["sdd_witness"] = str(bad_sdd) if bad_sdd else None
        bad = bad or bad_sdd
    _emit(dumps(out), args.json)
    if bad:
        print(str(bad), file=sys.stderr)
        return 1
    return 0


def cmd_gen(args) -> int:
    out = Path(args.out)
    if args.count is None:
        inst = generate_partial_ktree(args.n, args.k, args.p, args.pairs, args.caps, args.seed,
                                      random_lengths=args.random_lengths)
        write_instance(out, inst)
        return 0
    for i in range(args.count):
        seed = args.seed + i
        inst = generate_partial_ktree(args.n, args.k, args.p, args.pairs, args.caps, seed,
                                      random_lengths=args.random_lengths)
        write_instance(out / f"{args.prefix}{seed:05d}", inst)
    return 0


def cmd_bench(args) -> int:
    if not Path(args.dir).is_dir():
        raise InputError(f"{args.dir} is not a directory")
    reports = run_bench(args.dir, parallel=args.parallel, epsilon=args.eps,
                        lengths=args.lengths, oracle=args.oracle)
    if args.out_dir:
        write_reports(reports, args.out_dir)
    agg = aggregate(reports)
    summary = {k: v for k, v in agg.items() if k != "instances"}
    summary["workers"] = resolve_workers(args.parallel)
    if args.json:
        Path(args.json).write_text(dumps(agg))
    sys.stdout.write(dumps(summary))
    return 0 if not agg["failed"] and not agg["errors"] else 1


def cmd_gap(args) -> int:
    """Sweep widths and pair counts; one CSV row per instance."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k_tree", "pairs", "seed", "width", "ln_r1", "ln_k1", "fstar", "flow",
                "cost", "gvy_cost", "cost_over_fstar", "gvy_over_fstar"])
    for kt in args.widths:
        for pairs in args.pairs:
            for i in range(args.count):
                seed = args.seed + i
                inst = generate_partial_ktree(args.n, kt, args.p, pairs, args.caps, seed)
                g = inst.graph
                run = run_pipeline(g, inst.td, epsilon=args.eps)
                gv = gvy_multicut(g, run.fs) if run.fs is not None else None
                F = run.fstar
                gc = gv.cost if gv is not None else 0.0
                w.writerow([kt, pairs, seed, run.width, f"{math.log(run.width + 1):.6f}",
                            f"{math.log(g.k + 1):.6f}", f"{F:.6f}",
                            f"{run.flow.total if run.flow else 0.0:.6f}", f"{run.cut.cost:.6f}",
                            f"{gc:.6f}", f"{run.cut.cost / F if F else 0.0:.6f}",
                            f"{gc / F if F else 0.0:.6f}"])
    _emit(buf.getvalue(), args.csv)
    return 0


def cmd_td(args) -> int:
    from mcut.decomposition import format_tree_decomposition

    g = _instance(args).graph
    _emit(format_tree_decomposition(heuristic_tree_decomposition(g)), args.out)
    return 0


# ------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mcut", description="Approximate multicuts on graphs "
                                "of bounded treewidth, with verifiers and exact oracles.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def graph_args(sp, td=False):
        sp.add_argument("--graph", required=True, help=".mcg graph file")
        if td:
            sp.add_argument("--td", help=".td tree decomposition (default: next to the graph, "
                            "else a min-fill heuristic)")
        sp.add_argument("--json", help="write JSON here instead of stdout")

    def eps_arg(sp):
        sp.add_argument("--eps", type=_epsilon, default=DEFAULT_EPSILON,
                        help="flow router accuracy (default 0.1)")

    sp = sub.add_parser("solve", help="run the three-phase algorithm and report")
    graph_args(sp, td=True)
    eps_arg(sp)
    sp.add_argument("--lengths", choices=("lp", "given"), default="lp")
    sp.add_argument("--oracle", action="store_true", help="also run the exact oracle")
    sp.add_argument("--baseline", action="store_true", help="also run the ball-growing baseline")
    sp.add_argument("--timings", action="store_true", help="include wall-clock timings")
    sp.add_argument("--cut-out", help="write the cut (1-based edge numbers) here")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("lp", help="solve the fractional relaxation")
    graph_args(sp)
    eps_arg(sp)
    sp.set_defaults(func=cmd_lp)

    sp = sub.add_parser("gvy", help="ball-growing baseline multicut")
    graph_args(sp)
    eps_arg(sp)
    sp.set_defaults(func=cmd_gvy)

    sp = sub.add_parser("exact", help="exact minimum multicut by branch and bound")
    graph_args(sp)
    sp.add_argument("--max-edges", type=int, default=24)
    sp.add_argument("--cut-out", help="write the optimal cut here")
    sp.set_defaults(func=cmd_exact)

    sp = sub.add_parser("verify", help="check a cut file")
    graph_args(sp)
    sp.add_argument("--cut", required=True, help="cut file, one edge number per line")
    sp.add_argument("--sdd", action="store_true", help="also check component diameters")
    sp.add_argument("--lengths", choices=("lp", "given"), default="given",
                    help="metric for --sdd (default: lengths in the graph file)")
    eps_arg(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("gen", help="generate random partial k-tree instances")
    sp.add_argument("--out", required=True, help="file prefix, or directory with --count")
    sp.add_argument("--n", type=int, default=30)
    sp.add_argument("--k", type=int, default=3)
    sp.add_argument("--p", type=float, default=0.7, help="edge keep probability")
    sp.add_argument("--pairs", type=int, default=5)
    sp.add_argument("--caps", type=_caps, default=(1, 1), help="capacity range LO..HI")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, help="write this many instances (seeds seed, seed+1, ...)")
    sp.add_argument("--prefix", default="inst-")
    sp.add_argument("--random-lengths", action="store_true", help="draw lengths in [0, 1)")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("bench", help="solve every .mcg in a directory")
    sp.add_argument("--dir", required=True)
    sp.add_argument("--parallel", type=int, default=1, help="worker processes "
                    "(MCUT_THREADS overrides)")
    sp.add_argument("--json", help="write the full aggregate here")
    sp.add_argument("--out-dir", help="write one report per instance here")
    sp.add_argument("--lengths", choices=("lp", "given", "auto"), default="lp")
    sp.add_argument("--oracle", action="store_true")
    eps_arg(sp)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("gap", help="tabulate cost/F* over a family of instances (CSV)")
    sp.add_argument("--n", type=int, default=30)
    sp.add_argument("--widths", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    sp.add_argument("--pairs", type=int, nargs="+", default=[2, 5, 10])
    sp.add_argument("--p", type=float, default=0.7)
    sp.add_argument("--caps", type=_caps, default=(1, 5))
    sp.add_argument("--count", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--csv", help="write CSV here instead of stdout")
    eps_arg(sp)
    sp.set_defaults(func=cmd_gap)

    sp = sub.add_parser("td", help="heuristic tree decomposition in .td format")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_td)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (VerificationError, InternalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (McutError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
