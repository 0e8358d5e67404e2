"""Command line front end.

Subcommands: synthetic, real, distance, consistency, summarize.
Exit codes: 0 success, 1 config/validation error, 2 IO error,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from .errors import (
    DegeneracyError,
    GapViolationError,
    NumericError,
    ValidationError,
)
from .experiments import (
    ExperimentConfig,
    canon_gso,
    consistency_defaults,
    read_csv,
    real_defaults,
    run_consistency,
    run_real,
    run_synthetic,
    summarize,
    synthetic_defaults,
    write_csv,
)
from .filters import FilterSpec
from .graph import load_communities, load_edge_list
from .spectral import eigh
from .stability import stability_bound

log = logging.getLogger("gfstab")


def _load_config(args, default_factory) -> ExperimentConfig:
    if args.config:
        cfg = ExperimentConfig.from_json_file(args.config)
    else:
        cfg = default_factory()
        log.info("no --config given; using built-in protocol defaults")
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
    return cfg


def _cmd_synthetic(args) -> int:
    cfg = _load_config(args, synthetic_defaults)
    if args.quick:
        cfg = cfg.quick()
    table = run_synthetic(cfg, threads=args.threads)
    write_csv(table, args.out)
    log.info("wrote %d rows to %s", len(table), args.out)
    return 0


def _cmd_real(args) -> int:
    cfg = _load_config(args, real_defaults)
    edges_path = args.edges or cfg.edges_path
    communities_path = args.communities or cfg.communities_path
    if not edges_path or not communities_path:
        raise ValidationError("real mode needs --edges and --communities paths")
    g = load_edge_list(edges_path, dedupe=True)
    membership = load_communities(communities_path, g.n)
    table = run_real(cfg, g, membership, threads=args.threads)
    write_csv(table, args.out)
    log.info("wrote %d rows to %s", len(table), args.out)
    return 0


def _cmd_consistency(args) -> int:
    cfg = _load_config(args, consistency_defaults)
    table = run_consistency(cfg, threads=args.threads)
    write_csv(table, args.out)
    log.info("wrote %d rows to %s", len(table), args.out)
    return 0


def _cmd_summarize(args) -> int:
    table = read_csv(args.in_path)
    write_csv(summarize(table), args.out)
    return 0


def _cmd_distance(args) -> int:
    from .graph import normalized_laplacian, unnormalized_laplacian

    try:
        spec = FilterSpec.from_dict(json.loads(args.filter))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"--filter is not valid JSON: {exc}") from exc
    gso = canon_gso(args.gso)
    build = unnormalized_laplacian if gso == "unnormalized" else normalized_laplacian
    g1 = load_edge_list(args.edges, dedupe=True)
    g2 = load_edge_list(args.edges2, dedupe=True)
    if g1.n != g2.n:
        raise ValidationError(
            f"graphs have different node counts ({g1.n} vs {g2.n})"
        )
    bb = stability_bound(
        spec, eigh(build(g1)), eigh(build(g2)), args.k, args.eta_mode
    )
    print(f"filter    {spec.label}")
    print(f"gso       {gso}")
    print(f"distance  {bb.distance:.12g}")
    print(f"bound     {bb.total:.12g}")
    print(f"  leakage   {bb.leakage:.12g}")
    print(f"  eig_term  {bb.eig_term:.12g}")
    print(f"  vec_term  {bb.vec_term:.12g}")
    print(f"cutoff    {bb.cutoff:.12g}  (k={bb.k}, gap_ok={str(bb.gap_ok).lower()})")
    print(f"eta       {bb.eta:.12g}  ({bb.eta_used})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gfstab",
        description="Stability of spectral graph filters under edge rewiring.",
    )
    parser.add_argument("--seed", type=int, default=None, help="override master seed")
    parser.add_argument("--threads", type=int, default=1, help="worker process count")
    parser.add_argument("--verbose", action="store_true", help="chatty logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthetic", help="planted-partition Monte Carlo sweep")
    p.add_argument("--config", default=None)
    p.add_argument("--quick", action="store_true", help="20 trials, n capped at 1000")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synthetic)

    p = sub.add_parser("real", help="count-preserving rewiring of an input graph")
    p.add_argument("--config", default=None)
    p.add_argument("--edges", default=None)
    p.add_argument("--communities", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_real)

    p = sub.add_parser("distance", help="distance and bound for two edge lists")
    p.add_argument("--edges", required=True)
    p.add_argument("--edges2", required=True)
    p.add_argument("--gso", choices=["unnorm", "norm"], required=True)
    p.add_argument("--filter", required=True, help="filter spec as JSON")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--eta-mode", choices=["empirical", "interval"], default="empirical")
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("consistency", help="bottom-k drift terms across n")
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_consistency)

    p = sub.add_parser("summarize", help="per-configuration summary statistics")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_summarize)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, GapViolationError, DegeneracyError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
