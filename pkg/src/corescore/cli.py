"""Command-line entry point: ``corescore <subcommand> ...``.

Exit codes: 0 success, 1 unreadable or malformed input, 2 invalid
configuration. Progress goes to stderr; data goes only to output files.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import warnings
from dataclasses import asdict
from importlib import metadata as importlib_metadata
from pathlib import Path

import numpy as np

from . import baselines, centrality, ingest, synth
from .annealing import AnnealSchedule
from .graph import WeightedGraph, is_connected, threshold_binarize
from .scoring import ParameterGrid, aggregate_core_scores, sweep_grid


class ConfigError(Exception):
    pass


class InputError(Exception):
    pass


def tool_version() -> str:
    try:
        return importlib_metadata.version("artifact")
    except importlib_metadata.PackageNotFoundError:
        return "unknown"


def parse_grid(spec: str) -> tuple[int, int]:
    try:
        a, b = spec.lower().split("x")
        na, nb = int(a), int(b)
    except ValueError:
        raise ConfigError(f"grid must look like 100x100, got {spec!r}") from None
    if na < 1 or nb < 1:
        raise ConfigError("grid dimensions must be positive")
    return na, nb


def build_grid(args) -> ParameterGrid:
    na, nb = parse_grid(args.grid)
    if args.alpha is not None or args.beta is not None:
        if (na, nb) != (1, 1):
            raise ConfigError("--alpha/--beta require --grid 1x1")
        if args.alpha is None or args.beta is None:
            raise ConfigError("--alpha and --beta must be given together")
        if not (0 <= args.alpha <= 1 and 0 <= args.beta <= 1):
            raise ConfigError("--alpha and --beta must lie in [0, 1]")
        return ParameterGrid.single(args.alpha, args.beta)
    return ParameterGrid.midpoints(na, nb)


def build_schedule(args) -> AnnealSchedule:
    try:
        return AnnealSchedule(
            initial_temperature=args.initial_temperature,
            stop_temperature=args.stop_temperature,
            cooling_factor=args.cooling_factor,
            max_consecutive_rejections=args.max_consecutive_rejections,
            max_tries_per_temperature=args.max_tries,
            max_successes_per_temperature=args.max_successes,
            restarts=args.restarts,
            seed=args.seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_graph(path: str) -> WeightedGraph:
    try:
        return ingest.read_edge_list(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except ingest.ParseError as exc:
        raise InputError(f"{path}: {exc}") from None


def output_dir(args) -> Path:
    out = Path(args.output)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from None
    return out


def write_metadata(out: Path, args, extra: dict | None = None) -> None:
    # settings that cannot change results stay out, so outputs match across them
    config = {k: v for k, v in vars(args).items() if k not in ("func", "jobs", "quiet", "output")}
    payload = {"tool": "corescore", "version": tool_version(), "seed": getattr(args, "seed", None),
               "config": config, **(extra or {})}
    (out / "metadata.json").write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n",
                                       encoding="utf-8")


def read_node_metadata(path: str | None) -> dict[str, dict[str, str]]:
    """CSV with a ``label`` column plus arbitrary metadata columns."""
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    if rows and "label" not in rows[0]:
        raise InputError(f"{path}: metadata needs a 'label' column")
    return {r["label"]: {k: v for k, v in r.items() if k != "label"} for r in rows}


def _progress(label: str):
    step = {"last": -1}

    def report(done: int, total: int) -> None:
        pct = 100 * done // total
        if pct != step["last"] and (pct % 5 == 0 or done == total):
            step["last"] = pct
            print(f"{label}: {done}/{total} ({pct}%)", file=sys.stderr, flush=True)

    return report


# --- score ------------------------------------------------------------------

COMPARATORS = ("minres", "strength", "closeness", "betweenness", "eigenvector")


def comparator_columns(g: WeightedGraph, methods, betweenness_threshold: float | None) -> dict[str, np.ndarray]:
    cols: dict[str, np.ndarray] = {}
    for m in methods:
        if m == "minres":
            cols[m] = baselines.minres_coreness(g).values
        elif m == "strength":
            cols[m] = g.strengths()
        elif m == "closeness":
            cols[m] = centrality.closeness(g).values
        elif m == "betweenness":
            b = threshold_binarize(g, betweenness_threshold) if betweenness_threshold is not None else g
            cols[m] = centrality.betweenness(b).values
        elif m == "eigenvector":
            if is_connected(g):
                cols[m] = centrality.eigenvector_centrality(g).values
            else:
                print("eigenvector centrality skipped: graph is disconnected", file=sys.stderr)
    return cols


def run_score(g: WeightedGraph, args, out: Path, node_meta: dict[str, dict[str, str]] | None = None) -> None:
    grid = build_grid(args)
    schedule = build_schedule(args)
    if g.n < 2:
        raise ConfigError("scoring needs at least two nodes")
    progress = None if args.quiet else _progress("sweep")
    sweep = sweep_grid(g, grid, schedule, jobs=args.jobs, warm_start=args.warm_start, progress=progress)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        result = aggregate_core_scores(sweep, g, weighted=args.weighted_neighbors)
    methods = COMPARATORS if args.methods == "all" else [m for m in args.methods.split(",") if m]
    bad = [m for m in methods if m not in COMPARATORS]
    if bad:
        raise ConfigError(f"unknown comparator(s) {bad}; choose from {COMPARATORS}")
    cols = {"core_score": result.scores, **comparator_columns(g, methods, args.betweenness_threshold)}
    meta_cols: dict[str, list[str]] = {}
    node_meta = node_meta or {}
    keys = sorted({k for rec in node_meta.values() for k in rec})
    for k in keys:
        meta_cols[k] = [node_meta.get(lab, {}).get(k, "") for lab in g.labels]
    ingest.write_scores(g.labels, cols, out / "scores.csv", meta_cols)
    ingest.write_landscape(result, out / "landscape")
    fractions = {g.labels[i]: round(float(f), 6) for i, f in enumerate(result.top_fractions) if f > 0}
    write_metadata(out, args, {"grid": {"alphas": list(grid.alphas), "betas": list(grid.betas)},
                               "schedule": asdict(schedule), "top_fractions": fractions})


def cmd_score(args) -> int:
    g = load_graph(args.input)
    node_meta = read_node_metadata(args.node_metadata)
    build_grid(args)
    build_schedule(args)
    out = output_dir(args)
    run_score(g, args, out, node_meta)
    return 0


# --- bench ------------------------------------------------------------------

def cmd_bench(args) -> int:
    if args.replicates < 1:
        raise ConfigError("--replicates must be >= 1")
    if args.k_step <= 0 or args.k_min > args.k_max:
        raise ConfigError("need k-min <= k-max and a positive k-step")
    if not 0 < args.p <= 1 or not 0 <= args.d <= 1:
        raise ConfigError("need 0 < p <= 1 and 0 <= d <= 1")
    k_bound = (1.0 / args.p) ** 0.5
    if args.k_min < 1 or args.k_max > k_bound + 1e-12:
        raise ConfigError(f"k must lie in [1, (1/p)^(1/2)] = [1, {k_bound:g}]")
    count = int(round((args.k_max - args.k_min) / args.k_step)) + 1
    k_values = [round(args.k_min + i * args.k_step, 10) for i in range(count)]
    k_values = [k for k in k_values if k <= args.k_max + 1e-12]
    methods = synth.METHODS if args.methods == "all" else [m for m in args.methods.split(",") if m]
    bad = [m for m in methods if m not in synth.METHODS]
    if bad:
        raise ConfigError(f"unknown method(s) {bad}; choose from {synth.METHODS}")
    na, nb = parse_grid(args.grid)
    schedule = build_schedule(args)
    out = output_dir(args)
    report = synth.run_benchmark(
        k_values, args.replicates, methods, schedule, args.seed, n=args.n, d=args.d, p=args.p,
        grid=ParameterGrid.midpoints(na, nb), jobs=args.jobs,
        progress=None if args.quiet else _progress("bench"),
    )
    ingest.write_benchmark(report, out / "benchmark.csv")
    write_metadata(out, args, {"k_values": k_values, "schedule": asdict(schedule)})
    return 0


# --- votes ------------------------------------------------------------------

def cmd_votes(args) -> int:
    try:
        mapping = ingest.read_vote_mapping(args.mapping)
    except OSError as exc:
        raise ConfigError(f"cannot read mapping {args.mapping}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise ConfigError(f"bad mapping {args.mapping}: {exc}") from None
    try:
        votes = ingest.read_vote_matrix(args.input, mapping)
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror or exc}") from None
    except ValueError as exc:
        raise InputError(f"{args.input}: {exc}") from None
    g = ingest.votes_to_similarity(votes)
    if args.binarize:
        if args.threshold is None:
            raise ConfigError("--binarize needs --threshold")
        g = threshold_binarize(g, args.threshold)
    out = output_dir(args)
    ingest.write_edge_list(g, out / "similarity.tsv")
    meta = {rec["name"]: {k: v for k, v in rec.items() if k != "name"} for rec in votes.legislators}
    with open(out / "legislators.csv", "w", encoding="utf-8", newline="") as fh:
        keys = sorted({k for rec in meta.values() for k in rec})
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", *keys])
        for name in votes.names:
            w.writerow([name, *(meta[name].get(k, "") for k in keys)])
    if args.score:
        run_score(g, args, out, meta)
    else:
        write_metadata(out, args)
    return 0


# --- baselines / centrality / synth -----------------------------------------

def cmd_baselines(args) -> int:
    g = load_graph(args.input)
    out = output_dir(args)
    schedule = build_schedule(args)
    report: dict = {"labels": list(g.labels)}
    mr = baselines.minres_coreness(g)
    report["minres"] = {"values": mr.values.tolist(), "residual": mr.residual,
                        "iterations": mr.iterations, "converged": mr.converged,
                        "largest_gap_core": [g.labels[i] for i in np.flatnonzero(baselines.largest_gap_core(mr.values))]}
    if g.n >= 3 and g.edge_count > 0:
        part = baselines.be_discrete(g, args.shuffles, schedule)
        report["borgatti_everett"] = {"core": [g.labels[i] for i in np.flatnonzero(part.core_mask)],
                                      "rho": part.rho, "z_score": part.z_score}
    if is_connected(g) and g.n > 1:
        h = baselines.holme_coefficient(g, args.ensemble_size, 10, args.seed)
        report["holme"] = {"coefficient": h.coefficient, "best_k": h.best_k,
                           "core": sorted((g.labels[i] for i in h.core_nodes), key=g.index),
                           "observed_ratio": h.observed_ratio,
                           "null_mean": float(np.mean(h.null_samples)),
                           "null_std": float(np.std(h.null_samples, ddof=1)) if len(h.null_samples) > 1 else 0.0}
    else:
        report["holme"] = None
    if g.n >= 2:
        cap = baselines.core_coefficient(g)
        report["da_silva"] = {"capacity": cap.capacity, "core_coefficient": cap.core_coefficient,
                              "removal_order": [g.labels[i] for i in cap.removal_order],
                              "capacity_trace": cap.capacity_trace}
    (out / "baselines.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    write_metadata(out, args)
    return 0


def cmd_centrality(args) -> int:
    g = load_graph(args.input)
    out = output_dir(args)
    cols = comparator_columns(g, [m for m in COMPARATORS if m != "minres"], args.betweenness_threshold)
    ingest.write_scores(g.labels, cols, out / "centrality.csv")
    write_metadata(out, args)
    return 0


def cmd_synth(args) -> int:
    out = output_dir(args)
    try:
        if args.model == "cp":
            planted = synth.generate_cp(synth.CPEnsembleParams(args.n, args.d, args.p, args.k), args.seed,
                                        shuffle=args.shuffle)
        else:
            planted = synth.sample_preset(synth.preset(args.model, args.block_size, k=args.k), args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    ingest.write_edge_list(planted.graph, out / "graph.tsv")
    (out / "truth.txt").write_text("".join(f"{planted.graph.labels[i]}\n" for i in sorted(planted.true_core)),
                                   encoding="utf-8")
    write_metadata(out, args)
    return 0


# --- parser -----------------------------------------------------------------

def _add_schedule(p: argparse.ArgumentParser) -> None:
    d = AnnealSchedule()
    g = p.add_argument_group("annealing schedule")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--restarts", type=int, default=d.restarts)
    g.add_argument("--initial-temperature", type=float, default=d.initial_temperature)
    g.add_argument("--stop-temperature", type=float, default=d.stop_temperature)
    g.add_argument("--cooling-factor", type=float, default=d.cooling_factor)
    g.add_argument("--max-consecutive-rejections", type=int, default=d.max_consecutive_rejections)
    g.add_argument("--max-tries", type=int, default=d.max_tries_per_temperature)
    g.add_argument("--max-successes", type=int, default=d.max_successes_per_temperature)


def _add_score_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid", default="100x100", help="alpha x beta cell counts (midpoint grid)")
    p.add_argument("--alpha", type=float, help="single alpha (requires --grid 1x1)")
    p.add_argument("--beta", type=float, help="single beta (requires --grid 1x1)")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--methods", default="all", help=f"comparators: 'all' or subset of {','.join(COMPARATORS)}")
    p.add_argument("--betweenness-threshold", type=float, default=None,
                   help="binarize at this weight before betweenness")
    p.add_argument("--warm-start", action="store_true", help="first restart starts from strength order")
    p.add_argument("--weighted-neighbors", action="store_true",
                   help="weight the neighbor sum by edge weight when aggregating")
    p.add_argument("--quiet", action="store_true")
    _add_schedule(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="corescore", description="Core-periphery analysis of weighted networks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="Core Score sweep, comparators, landscapes")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default="corescore-out")
    p.add_argument("--node-metadata", help="CSV with a label column and extra columns")
    _add_score_options(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bench", help="recovery benchmark on CP(n, d, p, k)")
    p.add_argument("--output", default="bench-out")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--d", type=float, default=0.5)
    p.add_argument("--p", type=float, default=0.25)
    p.add_argument("--k-min", type=float, default=1.0)
    p.add_argument("--k-max", type=float, default=2.0)
    p.add_argument("--k-step", type=float, default=0.1)
    p.add_argument("--replicates", type=int, default=100)
    p.add_argument("--methods", default="all")
    p.add_argument("--grid", default="100x100")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--quiet", action="store_true")
    _add_schedule(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("votes", help="roll-call matrix to similarity network")
    p.add_argument("--input", required=True)
    p.add_argument("--mapping", required=True, help="JSON map from vote codes to yea/nay/absent")
    p.add_argument("--output", default="votes-out")
    p.add_argument("--threshold", type=float)
    p.add_argument("--binarize", action="store_true")
    p.add_argument("--score", action="store_true", help="also run the score pipeline")
    _add_score_options(p)
    p.set_defaults(func=cmd_votes)

    p = sub.add_parser("baselines", help="Borgatti-Everett, minres, Holme, Da Silva")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default="baselines-out")
    p.add_argument("--shuffles", type=int, default=1000)
    p.add_argument("--ensemble-size", type=int, default=100)
    _add_schedule(p)
    p.set_defaults(func=cmd_baselines)

    p = sub.add_parser("centrality", help="strength, closeness, betweenness, eigenvector")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default="centrality-out")
    p.add_argument("--betweenness-threshold", type=float, default=None)
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("synth", help="generate a planted graph")
    p.add_argument("--model", default="cp", choices=("cp", *synth.PRESETS))
    p.add_argument("--output", default="synth-out")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--d", type=float, default=0.5)
    p.add_argument("--p", type=float, default=0.25)
    p.add_argument("--k", type=float, default=1.5)
    p.add_argument("--block-size", type=int, default=10)
    p.add_argument("--shuffle", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
            raise ConfigError("--jobs must be >= 1")
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
