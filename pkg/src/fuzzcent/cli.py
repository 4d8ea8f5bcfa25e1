"""Command-line front end.

Exit codes: 0 success, 2 bad configuration or usage, 3 unreadable or
malformed input, 4 failure while computing.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import plotting
from .centrality import Method, NeighborMode, rank, ranking_to_csv
from .diffusion import SirParams, cached_spread_table, default_beta, spread_table, spread_table_to_csv
from .evaluation import (
    bench_to_csv,
    curve_to_csv,
    default_p_grid,
    imprecision_grid,
    imprecision_to_csv,
    robustness,
    runtime_bench,
)
from .experiment import ExperimentConfig, StageError, run_experiment
from .graphcore import EdgeListError, fuzzify, graph_stats, read_edge_list, write_edge_list

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_RUNTIME = 4

log = logging.getLogger("fuzzcent")


class ConfigError(Exception):
    pass


class InputError(Exception):
    pass


def _load(path: str):
    try:
        return read_edge_list(path)
    except (OSError, EdgeListError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _sir_params(args, graph) -> SirParams:
    beta = args.beta if args.beta is not None else default_beta(graph)
    try:
        return SirParams(beta=beta, runs=args.runs, master_seed=args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _spreads(args, graph):
    params = _sir_params(args, graph)
    if args.no_cache:
        return spread_table(graph, params, threads=args.threads)
    table, hit = cached_spread_table(graph, params, args.cache_dir, threads=args.threads)
    if hit:
        log.info("spread cache hit")
    return table


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_stats(args) -> int:
    rows = []
    for path in args.paths:
        g = _load(path)
        s = graph_stats(g)
        rows.append((Path(path).stem, s))
    print(f"{'network':<16}{'n':>8}{'m':>9}{'<k>':>7}{'<d>':>8}{'C':>8}{'r':>8}")
    for name, s in rows:
        print(f"{name:<16}{s.n:>8}{s.m:>9}{s.avg_degree:>7.1f}{s.avg_distance:>8.3f}"
              f"{s.clustering:>8.3f}{s.assortativity:>8.3f}")
    return EXIT_OK


def cmd_fuzzify(args) -> int:
    g = _load(args.path)
    src = Path(args.path)
    if args.out:
        out = Path(args.out)
    else:
        folder = Path(args.out_dir) if args.out_dir else src.parent
        out = folder / f"{src.stem}W{src.suffix}"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_edge_list(fuzzify(g, args.seed), out)
    print(out)
    return EXIT_OK


def cmd_rank(args) -> int:
    g = _load(args.path)
    result = rank(g, args.method, mode=args.nfrh_mode)
    if result.method.reconstructed:
        log.info("%s is a reconstructed baseline", result.method.value)
    _emit(ranking_to_csv(result, g.labels), args.out)
    return EXIT_OK


def cmd_spread(args) -> int:
    g = _load(args.path)
    _emit(spread_table_to_csv(_spreads(args, g)), args.out)
    return EXIT_OK


def cmd_robustness(args) -> int:
    g = _load(args.path)
    curve = robustness(g, rank(g, args.method, mode=args.nfrh_mode))
    log.info("R = %.6f", curve.r_value)
    if args.format == "svg":
        out = args.out or f"{Path(args.path).stem}_robustness_{args.method.value}.svg"
        plotting.robustness_svg({args.method.display_name: curve.lcc_fractions.tolist()}, out)
    else:
        _emit(curve_to_csv(curve), args.out)
    return EXIT_OK


def cmd_imprecision(args) -> int:
    g = _load(args.path)
    points = imprecision_grid(rank(g, args.method, mode=args.nfrh_mode), _spreads(args, g), args.p_grid)
    if args.format == "svg":
        out = args.out or f"{Path(args.path).stem}_imprecision_{args.method.value}.svg"
        plotting.imprecision_svg({args.method.display_name: [q.e_value for q in points]},
                                 args.p_grid, out)
    else:
        _emit(imprecision_to_csv(points), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    g = _load(args.path)
    records = runtime_bench(g, args.methods, args.reps, network=Path(args.path).stem)
    if args.format == "svg":
        out = args.out or f"{Path(args.path).stem}_runtime.svg"
        plotting.runtime_svg({r.method.display_name: r.median_seconds for r in records}, out)
    else:
        _emit(bench_to_csv(records), args.out)
    return EXIT_OK


def cmd_experiment(args) -> int:
    try:
        cfg = ExperimentConfig(
            network=args.path,
            out_dir=args.out_dir or f"{Path(args.path).stem}_experiment",
            seeds=args.seeds,
            methods=args.methods,
            beta=args.beta,
            runs=args.runs,
            master_seed=args.seed,
            p_grid=args.p_grid,
            bench_reps=args.reps,
            threads=args.threads,
            cache_dir=args.cache_dir,
            svg=args.format == "svg",
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    summary = run_experiment(cfg)
    print(f"{'method':<34}{'R':>10}{'E(mean)':>10}{'seconds':>12}")
    for m, s in summary.items():
        print(f"{m.display_name:<34}{s['r_value']:>10.4f}{s['mean_imprecision']:>10.4f}{s['seconds']:>12.3g}")
    print(f"outputs in {cfg.out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _method(text: str) -> Method:
    try:
        return Method.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="fuzzification seed (fuzzify) or SIR master seed (default 0)")
    common.add_argument("--beta", type=float, default=None,
                        help="SIR infection rate (default: degree-moment heuristic)")
    common.add_argument("--runs", type=_positive_int, default=1000, help="Monte Carlo runs per node")
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument("--out-dir", default=None)
    common.add_argument("--format", choices=("csv", "svg"), default="csv")
    common.add_argument("--cache-dir", default=None,
                        help="spread cache directory (default $FUZZCENT_CACHE_DIR or ~/.cache/fuzzcent)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="fuzzcent", description="Fuzzy-graph centrality toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", parents=[common], help="structural statistics of edge lists")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("fuzzify", parents=[common], help="assign Uniform(0,1) edge memberships")
    p.add_argument("path")
    p.add_argument("--out", default=None, help="output file (default <stem>W<suffix>)")
    p.set_defaults(func=cmd_fuzzify)

    method_kw = dict(type=_method, default=Method.NFDC, help="fd, frd, frh, nfdc or nfrh")
    mode_kw = dict(type=NeighborMode, choices=list(NeighborMode), default=NeighborMode.NFDC,
                   help="neighbour score used by NFRH")

    for name, func, helptext in (
        ("rank", cmd_rank, "rank nodes with one centrality"),
        ("robustness", cmd_robustness, "LCC curve under ranked node removal"),
        ("imprecision", cmd_imprecision, "imprecision against SIR spreading capability"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("path")
        p.add_argument("--method", **method_kw)
        p.add_argument("--nfrh-mode", **mode_kw)
        p.add_argument("--out", default=None)
        if name == "imprecision":
            p.add_argument("--p-grid", type=float, nargs="+", default=default_p_grid())
        p.set_defaults(func=func)

    p = sub.add_parser("spread", parents=[common], help="SIR spreading capability per node")
    p.add_argument("path")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_spread)

    p = sub.add_parser("bench", parents=[common], help="median ranking wall time per method")
    p.add_argument("path")
    p.add_argument("--methods", type=_method, nargs="+", default=list(Method))
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("experiment", parents=[common], help="full pipeline over several fuzzifications")
    p.add_argument("path")
    p.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3], help="fuzzification seeds")
    p.add_argument("--methods", type=_method, nargs="+", default=list(Method))
    p.add_argument("--p-grid", type=float, nargs="+", default=default_p_grid())
    p.add_argument("--reps", type=int, default=3, help="benchmark repetitions per method")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as exc:
        cause = exc.__cause__
        print(f"error: {exc}", file=sys.stderr)
        if exc.stage == "loading network" and isinstance(cause, (OSError, EdgeListError)):
            return EXIT_INPUT
        if exc.stage == "preparing output":
            return EXIT_CONFIG
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
