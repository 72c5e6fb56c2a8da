"""Command-line interface.

Subcommands:
  run            sweep methods/parameters over an edge-list dataset
  ssbm           same sweep over a generated signed block model
  eigs           precompute eigenbasis cache files
  balance-check  report the smallest signed-ratio eigenvalue

Flag values may also come from a YAML key-value config file (--config);
explicit flags win on conflict.  Exit code is 0 on success, 1 on any
fatal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from .data import (
    EdgeListFormat,
    SSBMParams,
    generate_ssbm,
    graph_digest,
    load_labels,
    load_signed_edge_list,
    ssbm_label_data,
    write_signed_edge_list,
)
from .graph import largest_connected_component
from .harness import METHODS, ExperimentSpec, emit_csv, run_experiment
from .laplacians import OperatorKind, build_operator
from .spectral import eigenbasis_cache_file, save_eigenbasis, smallest_eigs

_CONFIG_KEYS = (
    "dataset", "labels", "methods", "fractions", "neigs", "omega0", "epsilon",
    "runs", "seed", "out", "cache_dir", "delimiter", "header", "alpha", "tau",
    "max_iter", "tol",
)


def _parse_list(value, cast):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return [cast(v) for v in value]
    return [cast(v) for v in str(value).split(",") if str(v).strip()]


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if not getattr(args, "config", None):
        return args
    with open(args.config, encoding="utf-8") as fh:
        cfg = yaml.safe_load(fh) or {}
    if not isinstance(cfg, dict):
        raise ValueError(f"{args.config}: config must be a flat key-value mapping")
    for key, value in cfg.items():
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{args.config}: unknown config key {key!r}")
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def _edge_format(args) -> EdgeListFormat:
    return EdgeListFormat(
        delimiter=args.delimiter or "whitespace",
        header=bool(args.header),
    )


def _build_spec(args, dataset_name: str) -> ExperimentSpec:
    methods = _parse_list(args.methods, str)
    if not methods:
        raise ValueError(f"--methods is required (choose from {', '.join(METHODS)})")
    return ExperimentSpec(
        methods=methods,
        fractions=_parse_list(args.fractions, float) or [0.05],
        n_eigs=_parse_list(args.neigs, int) or [100],
        omega0=_parse_list(args.omega0, float) or [1000.0],
        epsilon=_parse_list(args.epsilon, float) or [0.1],
        runs=int(args.runs) if args.runs is not None else 10,
        base_seed=int(args.seed) if args.seed is not None else 0,
        dataset=dataset_name,
        alpha=float(args.alpha) if args.alpha is not None else 0.99,
        tau=float(args.tau) if args.tau is not None else 0.1,
        max_iter=int(args.max_iter) if args.max_iter is not None else 2000,
        tol=float(args.tol) if args.tol is not None else 1e-6,
    )


def _add_sweep_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--methods", help=f"comma list from: {', '.join(METHODS)}")
    p.add_argument("--fractions", help="labeled-node fractions, e.g. 0.01,0.05")
    p.add_argument("--neigs", help="eigenvector counts, e.g. 20,100")
    p.add_argument("--omega0", help="fidelity weights (default 1000)")
    p.add_argument("--epsilon", help="interface parameters (default 0.1)")
    p.add_argument("--runs", type=int, help="label resamplings per cell (default 10)")
    p.add_argument("--seed", type=int, help="base seed (default 0)")
    p.add_argument("--alpha", type=float, help="LGC mixing parameter (default 0.99)")
    p.add_argument("--tau", type=float, help="time step (default 0.1)")
    p.add_argument("--max-iter", dest="max_iter", type=int, help="iteration cap (default 2000)")
    p.add_argument("--tol", type=float, help="stopping tolerance (default 1e-6)")
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--cache-dir", dest="cache_dir", help="eigenbasis cache directory")
    p.add_argument("--timings", action="store_true", help="include wall times in the CSV")
    p.add_argument("--config", help="YAML key-value config file; flags win")


def _add_dataset_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help="signed edge-list file")
    p.add_argument("--delimiter", choices=("whitespace", "comma"))
    # default None so a config-file value can fill it in
    p.add_argument("--header", action="store_true", default=None,
                   help="skip the first data line")


def _cmd_run(args) -> int:
    args = _merge_config(args)
    if not args.dataset:
        raise ValueError("--dataset is required")
    if not args.labels:
        raise ValueError("--labels is required")
    if not args.out:
        raise ValueError("--out is required")
    g = load_signed_edge_list(args.dataset, _edge_format(args))
    labels = load_labels(args.labels, g, strict=not args.skip_missing)
    spec = _build_spec(args, dataset_name=str(args.dataset))
    result = run_experiment(g, labels, spec, cache_dir=args.cache_dir)
    emit_csv(result, args.out, include_timings=args.timings)
    print(f"wrote {args.out} ({len(result.runs)} run rows, {len(result.means)} mean rows)")
    return 0


def _cmd_ssbm(args) -> int:
    args = _merge_config(args)
    params = SSBMParams(
        n=args.n, k=args.k, p_in=args.p_in, p_out=args.p_out,
        eta=args.eta, seed=args.graph_seed,
    )
    g, blocks = generate_ssbm(params)
    labels = ssbm_label_data(blocks)
    if args.save_edges:
        write_signed_edge_list(g, args.save_edges)
        print(f"wrote {args.save_edges}")
    if args.save_labels:
        with open(args.save_labels, "w", encoding="utf-8") as fh:
            for ident, block in zip(g.node_ids, blocks):
                fh.write(f"{ident} block{block}\n")
        print(f"wrote {args.save_labels}")
    if not args.methods:
        if not (args.save_edges or args.save_labels):
            raise ValueError("nothing to do: pass --methods and/or --save-edges")
        return 0
    if not args.out:
        raise ValueError("--out is required when running a sweep")
    name = f"ssbm(n={params.n},k={params.k},p_in={params.p_in},p_out={params.p_out},eta={params.eta},seed={params.seed})"
    spec = _build_spec(args, dataset_name=name)
    result = run_experiment(g, labels, spec, cache_dir=args.cache_dir)
    emit_csv(result, args.out, include_timings=args.timings)
    print(f"wrote {args.out} ({len(result.runs)} run rows, {len(result.means)} mean rows)")
    return 0


def _cmd_eigs(args) -> int:
    args = _merge_config(args)
    if not args.dataset:
        raise ValueError("--dataset is required")
    if not args.cache_dir:
        raise ValueError("--cache-dir is required")
    g = load_signed_edge_list(args.dataset, _edge_format(args))
    kind = OperatorKind(args.operator)
    mode = {
        OperatorKind.LSYM_POS: "positive",
        OperatorKind.QSYM_NEG: "negative",
    }.get(kind, "signed")
    comp, _ = largest_connected_component(g, mode)
    digest = graph_digest(comp)
    seed = int(args.seed) if args.seed is not None else 0
    Path(args.cache_dir).mkdir(parents=True, exist_ok=True)
    for k in _parse_list(args.neigs, int) or [100]:
        k = min(k, comp.n)
        basis = smallest_eigs(build_operator(comp, kind), k=k, seed=seed)
        path = eigenbasis_cache_file(args.cache_dir, digest, kind, k)
        save_eigenbasis(path, basis)
        print(f"wrote {path} (n={comp.n}, k={k})")
    return 0


def _cmd_balance_check(args) -> int:
    args = _merge_config(args)
    if not args.dataset:
        raise ValueError("--dataset is required")
    g = load_signed_edge_list(args.dataset, _edge_format(args))
    op = build_operator(g, OperatorKind.SR)
    lam = smallest_eigs(op, k=1, seed=0).lambdas[0]
    balanced = "yes" if lam <= 1e-10 else "no"
    print(f"nodes={g.n} positive_edges={g.num_positive_edges} "
          f"negative_edges={g.num_negative_edges}")
    print(f"lambda_min(signed ratio Laplacian) = {lam:.6e}")
    print(f"2-balanced (lambda_min <= 1e-10): {balanced}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signedgl",
        description="Semi-supervised node classification on signed graphs "
        "via diffuse-interface methods.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a sweep on an edge-list dataset")
    _add_dataset_flags(p_run)
    p_run.add_argument("--labels", help="node label file")
    p_run.add_argument(
        "--skip-missing", action="store_true",
        help="skip labels whose node id is absent from the graph",
    )
    _add_sweep_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_ssbm = sub.add_parser("ssbm", help="run a sweep on a generated block model")
    p_ssbm.add_argument("--n", type=int, required=True)
    p_ssbm.add_argument("--k", type=int, default=2)
    p_ssbm.add_argument("--p-in", dest="p_in", type=float, required=True)
    p_ssbm.add_argument("--p-out", dest="p_out", type=float, required=True)
    p_ssbm.add_argument("--eta", type=float, default=0.0)
    p_ssbm.add_argument("--graph-seed", dest="graph_seed", type=int, default=0)
    p_ssbm.add_argument("--save-edges", dest="save_edges", help="export the edge list")
    p_ssbm.add_argument("--save-labels", dest="save_labels", help="export block labels")
    _add_sweep_flags(p_ssbm)
    p_ssbm.set_defaults(func=_cmd_ssbm)

    p_eigs = sub.add_parser("eigs", help="precompute eigenbasis cache files")
    _add_dataset_flags(p_eigs)
    p_eigs.add_argument(
        "--operator", required=True,
        choices=[k.value for k in OperatorKind if k not in
                 (OperatorKind.L, OperatorKind.LSYM, OperatorKind.Q, OperatorKind.QSYM)],
    )
    p_eigs.add_argument("--neigs", help="eigenvector counts, e.g. 20,100")
    p_eigs.add_argument("--seed", type=int)
    p_eigs.add_argument("--cache-dir", dest="cache_dir")
    p_eigs.add_argument("--config", help="YAML key-value config file; flags win")
    p_eigs.set_defaults(func=_cmd_eigs)

    p_bal = sub.add_parser("balance-check", help="report lambda_min of the signed ratio Laplacian")
    _add_dataset_flags(p_bal)
    p_bal.add_argument("--config", help="YAML key-value config file; flags win")
    p_bal.set_defaults(func=_cmd_balance_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
