"""Command-line audits: one subcommand per analysis, plot-ready CSV out.

All tabular output is comma-separated with a header row, six fractional
digits, and LF line endings, so fixed seeds give byte-identical files.
The environment variable RN_AUDIT_THREADS caps sweep parallelism
(0 = auto, default 1); results never depend on it.

Exit codes: 0 success, 2 input error, 3 degenerate analysis,
4 infeasible generator config.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from contextlib import contextmanager

from .diversity import diversity_report
from .errors import (
    DegenerateBinningError,
    InfeasibleConfigError,
    RnAuditError,
)
from .graph import degree_stats
from .ingest import DatasetManifest, load_dataset
from .segregation import run_segregation_experiment, select_top_indegree
from .structure import (
    BinningScheme,
    assign_bins,
    assortativity,
    contingency,
    normalize_centrality,
    pagerank,
    row_normalized,
)
from .synth import SynthConfig, generate, write_dataset
from .walker import SurferPolicy, WalkConfig, simulate_walk, entropy_sweep, walk_length_sweep

#: Master seed used when --seed is not given; documented for reproducibility.
DEFAULT_SEED = 42

DEFAULT_TP_GRID = tuple(i / 10 for i in range(11))


def _threads() -> int:
    raw = os.environ.get("RN_AUDIT_THREADS", "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        return 1
    if value == 0:
        return os.cpu_count() or 1
    return max(1, value)


def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.6f}"


@contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _write_rows(fh, header, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _load(args):
    manifest = DatasetManifest(args.nodes, args.edges, args.name)
    return load_dataset(manifest)


def _parse_policy(token: str) -> SurferPolicy:
    token = token.strip()
    if token == "0.0*":
        return SurferPolicy.top_ranked()
    return SurferPolicy.stochastic(float(token))


def _parse_tp_grid(text: str) -> list[SurferPolicy]:
    if text.strip() == "default":
        return [SurferPolicy.top_ranked()] + [
            SurferPolicy.stochastic(tp) for tp in DEFAULT_TP_GRID
        ]
    return [_parse_policy(tok) for tok in text.split(",")]


def _parse_float_grid(text: str) -> list[float]:
    if text.strip() == "default":
        return list(DEFAULT_TP_GRID)
    return [float(tok) for tok in text.split(",")]


def _build_binning(rn, scheme_name: str, damping: float, tol: float, max_iter: int):
    scheme = BinningScheme(scheme_name)
    if scheme is BinningScheme.GENRE:
        return assign_bins(rn, scheme)
    if scheme is BinningScheme.INDEGREE:
        values = rn.in_degree_array().astype(float)
    else:
        values = pagerank(rn, damping=damping, tol=tol, max_iter=max_iter).scores
    return assign_bins(rn, scheme, normalize_centrality(values))


# -- subcommands ---------------------------------------------------------


def cmd_stats(args) -> int:
    rn, report = _load(args)
    stats = degree_stats(rn)
    _write_rows(
        sys.stdout,
        ["metric", "value"],
        [
            ["name", args.name],
            ["nodes", stats.nodes],
            ["edges", stats.edges],
            ["avg_degree", _fmt(stats.avg_out_degree)],
            ["reciprocating_edges", stats.reciprocating_edges],
            ["reciprocating_pct", _fmt(stats.reciprocating_pct)],
        ],
    )
    if args.report:
        with _open_out(args.report) as fh:
            fh.write(report.to_text() + "\n")
    else:
        print(report.to_text())
    return 0


def cmd_diversity(args) -> int:
    rn, _ = _load(args)
    rep = diversity_report(rn)
    means = rep.means()
    _write_rows(
        sys.stdout,
        ["measure", "value"],
        [
            ["intra_list_diversity", _fmt(means["intra_list"])],
            ["long_tail_novelty", _fmt(means["novelty"])],
            ["avg_unexpectedness", _fmt(means["unexpectedness"])],
            ["source_list_diversity", _fmt(means["source_list"])],
        ],
    )
    if args.per_node:
        import numpy as np

        with _open_out(args.per_node) as fh:
            rows = []
            for i, item_id in enumerate(rep.ids):
                rows.append(
                    [
                        item_id,
                        "" if np.isnan(rep.intra_list[i]) else _fmt(rep.intra_list[i]),
                        _fmt(rep.novelty[i]),
                        "" if np.isnan(rep.unexpectedness[i]) else _fmt(rep.unexpectedness[i]),
                        "" if np.isnan(rep.source_list[i]) else _fmt(rep.source_list[i]),
                    ]
                )
            _write_rows(
                fh, ["id", "intra_list", "novelty", "unexpectedness", "source_list"], rows
            )
    return 0


def cmd_assort(args) -> int:
    rn, _ = _load(args)
    schemes = (
        ["genre", "indegree", "pagerank"] if args.bin_by == "all" else [args.bin_by]
    )
    if args.matrix and len(schemes) != 1:
        raise ValueError("--matrix needs a single --bin-by scheme")
    rows = []
    for name in schemes:
        binning = _build_binning(rn, name, args.damping, args.tol, args.max_iter)
        cm = contingency(rn, binning)
        rows.append([name, _fmt(assortativity(cm))])
        if args.matrix:
            matrix = row_normalized(cm) if args.row_normalized else cm.matrix
            with _open_out(args.matrix) as fh:
                _write_rows(
                    fh,
                    ["bin", *cm.labels],
                    [
                        [label, *(_fmt(v) for v in matrix[i])]
                        for i, label in enumerate(cm.labels)
                    ],
                )
    _write_rows(sys.stdout, ["scheme", "assortativity"], rows)
    return 0


def cmd_walk(args) -> int:
    rn, _ = _load(args)
    if args.trace:
        if not args.start:
            raise ValueError("--trace needs --start")
        policy = _parse_policy(args.tp)
        trace = simulate_walk(
            rn, WalkConfig(args.start, policy, args.steps, args.seed)
        )
        with _open_out(args.trace) as fh:
            rows = [[trace.visits[0], "start"]]
            rows += [
                [item, kind] for item, kind in zip(trace.visits[1:], trace.step_kinds)
            ]
            _write_rows(fh, ["item", "step"], rows)
        return 0

    if args.tp_grid and args.n_grid:
        raise ValueError("--tp-grid and --n-grid are mutually exclusive")
    binning = _build_binning(rn, args.bin_by, args.damping, args.tol, args.max_iter)
    threads = _threads()
    if args.n_grid:
        lengths = [int(tok) for tok in args.n_grid.split(",")]
        points = walk_length_sweep(
            rn, binning, float(args.tp), lengths, seed=args.seed, threads=threads
        )
    else:
        policies = _parse_tp_grid(args.tp_grid or "default")
        points = entropy_sweep(
            rn, binning, policies, args.steps, seed=args.seed, threads=threads
        )
    with _open_out(args.out) as fh:
        _write_rows(
            fh,
            ["policy", "steps", "mean_entropy", "stddev", "num_walks"],
            [
                [p.policy.label, p.steps, _fmt(p.mean_entropy), _fmt(p.stddev), p.num_walks]
                for p in points
            ],
        )
    return 0


def cmd_segregate(args) -> int:
    rn, _ = _load(args)
    spec = args.starts.strip()
    if spec.startswith("top-indegree:"):
        k = int(spec.split(":", 1)[1])
        starts = select_top_indegree(rn, k)
        print(f"# starts (top-indegree:{k}): {','.join(starts)}", file=sys.stderr)
    else:
        starts = [tok.strip() for tok in spec.split(",") if tok.strip()]
    tps = _parse_float_grid(args.tp_grid)
    report = run_segregation_experiment(
        rn,
        starts,
        tps,
        members=args.members,
        steps=args.steps,
        seed=args.seed,
        threads=_threads(),
    )
    with _open_out(args.out) as fh:
        _write_rows(
            fh,
            ["tp", "mean_evenness", "mean_concentration", "num_groups"],
            [
                [str(float(s.teleport_prob)), _fmt(s.mean_evenness), _fmt(s.mean_concentration), s.num_groups]
                for s in report.per_tp
            ],
        )
    if args.per_group:
        with _open_out(args.per_group) as fh:
            _write_rows(
                fh,
                ["start", "tp", "evenness", "concentration"],
                [
                    [g.start, str(float(g.teleport_prob)), _fmt(g.evenness), _fmt(g.concentration)]
                    for g in report.groups
                ],
            )
    return 0


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        num_nodes=args.num_nodes,
        genre_labels=tuple(tok.strip() for tok in args.genres.split(",")),
        genre_probs=(
            tuple(float(tok) for tok in args.genre_probs.split(","))
            if args.genre_probs
            else None
        ),
        multi_genre_prob=args.multi_genre_prob,
        out_degree=args.out_degree,
        p_same=args.p_same,
        popularity_skew=args.popularity_skew,
        seed=args.seed,
    )
    items, edges, stats = generate(cfg)
    write_dataset(items, edges, args.out_nodes, args.out_edges)
    _write_rows(
        sys.stdout,
        ["metric", "value"],
        [
            ["nodes", len(items)],
            ["edges", len(edges)],
            ["fallback_count", stats.fallback_count],
            ["max_in_degree", stats.max_in_degree],
        ],
    )
    return 0


# -- parser ---------------------------------------------------------------


def _add_dataset_args(sub):
    sub.add_argument("--nodes", required=True, help="JSONL nodes file")
    sub.add_argument("--edges", required=True, help="CSV edges file (src,dst,rank)")
    sub.add_argument("--name", default="dataset", help="dataset label for reports")


def _add_pagerank_args(sub):
    sub.add_argument("--damping", type=float, default=0.85)
    sub.add_argument("--tol", type=float, default=1e-10)
    sub.add_argument("--max-iter", type=int, default=200)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rn-audit",
        description="Audit recommendation networks for diversity and information segregation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="node/edge/degree/reciprocity statistics")
    _add_dataset_args(p)
    p.add_argument("--report", help="write the validation report here instead of stdout")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("diversity", help="static diversity measures")
    _add_dataset_args(p)
    p.add_argument("--per-node", help="write a per-node measure table here")
    p.set_defaults(func=cmd_diversity)

    p = sub.add_parser("assort", help="assortativity coefficients and contingency matrices")
    _add_dataset_args(p)
    p.add_argument(
        "--bin-by",
        choices=["genre", "indegree", "pagerank", "all"],
        default="all",
    )
    _add_pagerank_args(p)
    p.add_argument("--matrix", help="write the contingency matrix here (single scheme)")
    p.add_argument("--row-normalized", action="store_true",
                   help="normalize each matrix row by its outward edge mass")
    p.set_defaults(func=cmd_assort)

    p = sub.add_parser("walk", help="entropy sweeps of simulated surfers")
    _add_dataset_args(p)
    p.add_argument("--bin-by", choices=["genre", "indegree", "pagerank"], default="genre")
    _add_pagerank_args(p)
    p.add_argument("--tp-grid", help="'default' (0.0* plus 0.0..1.0) or comma-separated t_p values; '0.0*' allowed")
    p.add_argument("--n-grid", help="comma-separated walk lengths (uses --tp)")
    p.add_argument("--tp", default="0.0", help="teleport probability for --n-grid or --trace")
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", help="write the sweep table here (default stdout)")
    p.add_argument("--trace", help="dump a single walk trace here instead of sweeping")
    p.add_argument("--start", help="start item for --trace")
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("segregate", help="evenness/concentration over simulated user groups")
    _add_dataset_args(p)
    p.add_argument(
        "--starts",
        default="top-indegree:10",
        help="comma-separated item ids, or 'top-indegree:K'",
    )
    p.add_argument("--tp-grid", default="default", help="'default' (0.0..1.0) or comma-separated values")
    p.add_argument("--members", type=int, default=10)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", help="write the per-t_p table here (default stdout)")
    p.add_argument("--per-group", help="write the unaveraged per-group table here")
    p.set_defaults(func=cmd_segregate)

    p = sub.add_parser("synth", help="generate a synthetic dataset in dump format")
    p.add_argument("--num-nodes", type=int, required=True)
    p.add_argument("--genres", required=True, help="comma-separated genre labels")
    p.add_argument("--genre-probs", help="comma-separated probabilities (default uniform)")
    p.add_argument("--multi-genre-prob", type=float, default=0.0)
    p.add_argument("--out-degree", type=int, default=4)
    p.add_argument("--p-same", type=float, default=0.5)
    p.add_argument("--popularity-skew", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out-nodes", required=True)
    p.add_argument("--out-edges", required=True)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DegenerateBinningError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InfeasibleConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (RnAuditError, FileNotFoundError, IsADirectoryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
