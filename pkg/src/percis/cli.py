"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or invalid
input, undefined centrality), 3 the required sample size exceeds the cap.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .bounds import DEFAULT_MAX_SAMPLES, SampleCapExceeded, percis, percis_di, unif
from .estimators import estimate_importance, estimate_uniform, exact_betweenness, exact_percolation
from .graph import EdgeListError, Graph, load_edge_list, write_edge_list
from .metrics import DEFAULT_CAP, DEFAULT_STEP, avg_error, jaccard_topk, max_error, target_error_search
from .output import align_scores, read_scores, write_metrics, write_params, write_scores
from .sampling import summarize
from .states import SETTINGS, UndefinedCentralityError, build_states, gen_states, read_states, write_states

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CAP = 0, 1, 2, 3
ALGOS = ("percis", "percis-di", "unif", "exact")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _csv_list(kind):
    def parse(text):
        try:
            return [kind(tok) for tok in text.split(",") if tok.strip()]
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad list {text!r}") from None
    return parse


def _add_graph_args(p):
    p.add_argument("graph", help="edge list, one 'u v' pair per line")
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--directed", dest="directed", action="store_true", default=True)
    kind.add_argument("--undirected", dest="directed", action="store_false")


def _add_state_args(p):
    p.add_argument("--states", help="file of 'node_id value' lines")
    p.add_argument("--gen", choices=SETTINGS, help="generate states instead of reading them")
    p.add_argument("--gen-seed", type=int, default=0, help="seed of the state generator")


def _add_run_args(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--vertex-diam-ub", type=int)
    p.add_argument("--max-samples", type=int, default=DEFAULT_MAX_SAMPLES)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="percis", description="Exact and sampled percolation centrality.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("estimate", help="approximate percolation centrality")
    _add_graph_args(p)
    _add_state_args(p)
    _add_run_args(p)
    p.add_argument("--algo", choices=ALGOS, default="percis")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--l1", type=int, help="first-phase sample size")
    p.add_argument("--samples", type=int, help="fixed sample size, skipping the bound")
    p.add_argument("--dist", choices=("importance", "uniform"), help="distribution for --samples")
    p.add_argument("-o", "--out", help="scores CSV (default stdout)")
    p.add_argument("--params", help="JSON file for the sample-size parameters")

    p = sub.add_parser("exact", help="exact percolation or betweenness centrality")
    _add_graph_args(p)
    _add_state_args(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--betweenness", action="store_true", help="plain betweenness; states not needed")
    p.add_argument("-o", "--out")

    p = sub.add_parser("gen-states", help="write generated states (and the extended graph for ic)")
    _add_graph_args(p)
    p.add_argument("--gen", "--setting", dest="gen", choices=SETTINGS, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--out", required=True, help="states file")
    p.add_argument("--graph-out", help="edge list of the returned graph (required for ic)")

    p = sub.add_parser("bench", help="error and timing against exact scores")
    _add_graph_args(p)
    _add_state_args(p)
    _add_run_args(p)
    p.add_argument("--algo", type=_csv_list(str), default=["percis"])
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--l1", type=int)
    p.add_argument("--fixed-samples", type=_csv_list(int))
    p.add_argument("--search", action="store_true", help="target-error search (needs --epsilon)")
    p.add_argument("--step", type=int, default=DEFAULT_STEP)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("-o", "--out", help="metrics CSV (default stdout)")

    p = sub.add_parser("compare", help="Jaccard similarity of two top-k sets")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--topk", type=int, default=10)
    return parser


def _load(args) -> tuple[Graph, np.ndarray | None]:
    g = load_edge_list(args.graph, args.directed)
    if getattr(args, "betweenness", False):
        return g, None
    if (args.states is None) == (args.gen is None):
        raise UsageError("give exactly one of --states and --gen")
    if args.states is not None:
        return g, read_states(args.states, g)
    return gen_states(g, args.gen, args.gen_seed)


def _out(path):
    return sys.stdout if path in (None, "-") else path


def _seeds(args):
    if args.runs < 1:
        raise UsageError("--runs must be at least 1")
    if args.workers < 1:
        raise UsageError("--workers must be at least 1")
    return [args.seed + k for k in range(args.runs)]


def _per_run(path, seed, runs):
    if path in (None, "-") or runs == 1:
        return _out(path)
    p = Path(path)
    return p.with_name(f"{p.stem}-seed{seed}{p.suffix}")


def _fixed(g, ps, ell, dist, seed, workers):
    acc = summarize(g, ps, ell, dist, seed=seed, workers=workers, stream=1)
    return estimate_importance(acc, ps) if dist == "importance" else estimate_uniform(acc, ps)


def _run_algo(g, ps, algo, args, seed, ell=None):
    """Scores and (for bound-driven runs) parameters of one algorithm run."""
    if algo == "exact":
        return exact_percolation(g, ps, args.workers), None
    if ell is not None:
        dist = "uniform" if algo == "unif" else "importance"
        return _fixed(g, ps, ell, dist, seed, args.workers), None
    common = dict(seed=seed, workers=args.workers, vertex_diam_ub=args.vertex_diam_ub,
                  max_samples=args.max_samples)
    if algo == "percis":
        return percis(g, ps, args.epsilon, args.delta, ell1=args.l1, **common)
    if algo == "percis-di":
        return percis_di(g, ps, args.epsilon, args.delta, **common)
    return unif(g, ps, args.epsilon, args.delta, **common)


def cmd_estimate(args) -> int:
    if args.samples is not None and args.epsilon is not None:
        raise UsageError("--samples and --epsilon are mutually exclusive")
    if args.dist is not None and args.samples is None:
        raise UsageError("--dist only applies with --samples")
    if args.samples is None and args.epsilon is None and args.algo != "exact":
        raise UsageError(f"--algo {args.algo} needs --epsilon (or a fixed --samples)")
    if args.samples is not None and args.algo == "exact":
        raise UsageError("--samples does not apply to --algo exact")
    if args.samples is not None and args.samples < 1:
        raise UsageError("--samples must be positive")
    seeds = _seeds(args)
    g, x = _load(args)
    ps = build_states(x, g.n)
    for seed in seeds:
        if args.samples is not None:
            dist = args.dist or ("uniform" if args.algo == "unif" else "importance")
            scores, params = _fixed(g, ps, args.samples, dist, seed, args.workers), None
        else:
            scores, params = _run_algo(g, ps, args.algo, args, seed)
        write_scores(_per_run(args.out, seed, len(seeds)), g.labels, scores)
        if params is not None and args.params:
            write_params(_per_run(args.params, seed, len(seeds)), params)
        if args.algo == "exact":
            break
    return EXIT_OK


def cmd_exact(args) -> int:
    g, x = _load(args)
    if args.betweenness:
        scores = exact_betweenness(g, args.workers)
    else:
        scores = exact_percolation(g, build_states(x, g.n), args.workers)
    write_scores(_out(args.out), g.labels, scores)
    return EXIT_OK


def cmd_gen_states(args) -> int:
    if args.gen == "ic" and not args.graph_out:
        raise UsageError("--gen ic extends the graph; pass --graph-out")
    g = load_edge_list(args.graph, args.directed)
    g2, x = gen_states(g, args.gen, args.seed)
    write_states(args.out, g2, x)
    if args.graph_out:
        write_edge_list(g2, args.graph_out)
    return EXIT_OK


def cmd_bench(args) -> int:
    unknown = [a for a in args.algo if a not in ALGOS]
    if unknown:
        raise UsageError(f"unknown algorithm {unknown[0]!r}; choose from {', '.join(ALGOS)}")
    if args.fixed_samples is not None and (args.search or args.epsilon is not None):
        raise UsageError("--fixed-samples excludes --search and --epsilon")
    if args.fixed_samples is None and args.epsilon is None:
        raise UsageError("give --fixed-samples, or --epsilon (optionally with --search)")
    if args.fixed_samples is not None and any(s < 1 for s in args.fixed_samples):
        raise UsageError("sample sizes must be positive")
    seeds = _seeds(args)
    g, x = _load(args)
    ps = build_states(x, g.n)
    exact = exact_percolation(g, ps, args.workers)
    rows = []
    sizes = args.fixed_samples if args.fixed_samples is not None else [None]
    for ell in sizes:
        for algo in args.algo:
            for seed in seeds:
                t0 = time.perf_counter()
                if args.search and algo != "exact":
                    dist = "uniform" if algo == "unif" else "importance"
                    res = target_error_search(g, ps, args.epsilon, dist, args.step, args.cap,
                                              seed, args.workers, exact)
                    row_ell, me, ae = res.ell, res.max_error, res.avg_error
                    st, bt = res.sample_time, res.bfs_time
                else:
                    scores, params = _run_algo(g, ps, algo, args, seed, ell)
                    row_ell = ell if ell is not None else (params.ell if params else 0)
                    me, ae = max_error(scores, exact), avg_error(scores, exact)
                    st, bt = scores.sample_time, scores.bfs_time
                wall = time.perf_counter() - t0
                rows.append({"ell": row_ell, "algo": algo, "seed": seed, "ME": me, "AE": ae,
                             "wall-time-ms": wall * 1e3, "sample-time-ms": st * 1e3,
                             "bfs-time-ms": bt * 1e3})
    write_metrics(_out(args.out), rows)
    return EXIT_OK


def cmd_compare(args) -> int:
    la, va = read_scores(args.first)
    lb, vb = read_scores(args.second)
    _, a, b = align_scores(la, va, lb, vb)
    if not 1 <= args.topk <= len(a):
        raise UsageError(f"--topk must lie in [1, {len(a)}]")
    print(repr(jaccard_topk(a, b, args.topk)))
    return EXIT_OK


COMMANDS = {"estimate": cmd_estimate, "exact": cmd_exact, "gen-states": cmd_gen_states,
            "bench": cmd_bench, "compare": cmd_compare}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SampleCapExceeded as exc:
        print(f"percis: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (EdgeListError, UndefinedCentralityError, ValueError, OSError) as exc:
        print(f"percis: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
