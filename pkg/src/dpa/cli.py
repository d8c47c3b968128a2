"""Command-line interface.

Subcommands:

* ``generate``     grow a graph, write edges.csv
* ``degree-dist``  degree histogram of a generated or loaded graph, write hist.csv
* ``joint``        joint (source out-degree, target in-degree) edge counts, write joint.csv
* ``theory``       evaluate limit formulas, print JSON
* ``oracle``       build an expectation table, write it as CSV
* ``experiment``   Monte Carlo runs with theory comparison, write report.json
* ``compare``      expectation tables against their limit shapes, print JSON

Model flags are shared: --alpha --gamma (required), --beta (default
1 - alpha - gamma), --delta-in --delta-out (default 0).  A JSON file
given with --config supplies any long-flag value not set on the
command line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .core import ModelParams, SeedGraph, load_graph, save_graph, validate_params
from .generator import generate
from .stats import (
    degree_histogram,
    edge_joint_counts,
    write_histogram_csv,
    write_joint_csv,
)
from .theory import (
    DEFAULT_QUAD,
    c_X,
    c_X_asymptote,
    derive_theory,
    f_in,
    f_out,
    fbar,
    g_edge_density,
    kappa,
    tail_exponent,
)
from .oracle import dp_E_in, dp_E_out, dp_D2, dp_EX, tri_off
from .harness import RunConfig, compare_theory_vs_oracle, run_experiment


def _add_model_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--delta-in", type=float, default=None, dest="delta_in")
    sp.add_argument("--delta-out", type=float, default=None, dest="delta_out")
    sp.add_argument("--seed-graph", default=None,
                    help="edges CSV to start from (default: 1-vertex seed)")
    sp.add_argument("--config", default=None,
                    help="JSON file supplying flag values not set explicitly")


def _add_gen_flags(sp: argparse.ArgumentParser) -> None:
    _add_model_flags(sp)
    sp.add_argument("--edges", type=int, default=None,
                    help="total edge count to grow to")
    sp.add_argument("--seed", type=int, default=None,
                    help="RNG master seed (default 0)")
    sp.add_argument("--out-dir", default=None, dest="out_dir")


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        for key, value in doc.items():
            attr = key.replace("-", "_")
            if hasattr(args, attr) and getattr(args, attr) is None:
                setattr(args, attr, value)
    return args


def _params_from_args(args: argparse.Namespace) -> ModelParams:
    if args.alpha is None or args.gamma is None:
        raise SystemExit("error: --alpha and --gamma are required "
                         "(directly or via --config)")
    alpha, gamma = args.alpha, args.gamma
    beta = args.beta if args.beta is not None else 1.0 - alpha - gamma
    return ModelParams(
        alpha=alpha, beta=beta, gamma=gamma,
        delta_in=args.delta_in or 0.0, delta_out=args.delta_out or 0.0,
    )


def _seed_graph_from_args(args: argparse.Namespace) -> SeedGraph | None:
    if not getattr(args, "seed_graph", None):
        return None
    g = load_graph(args.seed_graph)
    return SeedGraph(n0=g.n, edges=tuple((int(s), int(d)) for s, d in zip(g.src, g.dst)))


def _out_path(args: argparse.Namespace, name: str) -> str:
    out_dir = args.out_dir or "."
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def _generate_graph(args: argparse.Namespace):
    params = _params_from_args(args)
    seed_graph = _seed_graph_from_args(args)
    if args.edges is None:
        raise SystemExit("error: --edges is required")
    return generate(params, seed_graph, args.edges,
                    args.seed if args.seed is not None else 0)


def _cmd_generate(args) -> int:
    graph = _generate_graph(args)
    path = _out_path(args, "edges.csv")
    save_graph(graph, path)
    print(f"wrote {path}: n={graph.n} t={graph.t}")
    return 0


def _load_or_generate(args):
    if getattr(args, "in_file", None):
        return load_graph(args.in_file)
    return _generate_graph(args)


def _cmd_degree_dist(args) -> int:
    graph = _load_or_generate(args)
    hist = degree_histogram(graph, args.side)
    path = _out_path(args, "hist.csv")
    write_histogram_csv(hist, path)
    print(f"wrote {path}: side={args.side} n={graph.n} t={graph.t}")
    return 0


def _cmd_joint(args) -> int:
    graph = _load_or_generate(args)
    joint = edge_joint_counts(graph)
    path = _out_path(args, "joint.csv")
    write_joint_csv(joint, path)
    print(f"wrote {path}: classes={len(joint.counts)} loops={joint.loop_count}")
    return 0


def _quad_err_estimate(value: float) -> float:
    q = DEFAULT_QUAD
    return max(q.abs_tol, abs(value) * q.rel_tol) * 10.0


def _cmd_theory(args) -> int:
    params = _params_from_args(args)
    out: dict = {"what": args.what}
    if args.what == "params":
        th = derive_theory(params)
        out["value"] = {
            "a": th.a,
            "cbar_in": th.cbar_in,
            "cbar_out": th.cbar_out,
            "C_in": th.C_in,
            "C_out": th.C_out,
            "regime": th.regime,
            "tail_exponent_in": tail_exponent(th, "in"),
            "tail_exponent_out": tail_exponent(th, "out"),
        }
        out["abs_err_est"] = 0.0
    elif args.what == "fbar":
        th = derive_theory(params)
        out["d"] = args.d
        out["value"] = float(fbar(args.d, th))
        out["abs_err_est"] = 0.0
    elif args.what in ("f-in", "f-out"):
        fn = f_in if args.what == "f-in" else f_out
        x = args.x if args.x is not None else params.alpha + params.gamma
        out["d"], out["x"] = args.d, x
        out["value"] = fn(args.d, x, params)
        out["abs_err_est"] = 0.0
    elif args.what == "cx":
        th = derive_theory(params)
        out["d1"], out["d2"] = args.d1, args.d2
        value = c_X(args.d1, args.d2, th)
        out["value"] = value
        out["abs_err_est"] = _quad_err_estimate(value)
    elif args.what == "cx-asymptote":
        th = derive_theory(params)
        res = c_X_asymptote(args.d1, args.d2, th, args.direction)
        out["d1"], out["d2"] = args.d1, args.d2
        out["direction"] = args.direction
        out["value"] = res.value
        out["constant_name"] = res.constant_name
        out["constant"] = res.constant
        out["profile"] = res.profile
        out["abs_err_est"] = _quad_err_estimate(res.value)
    elif args.what == "g":
        x = args.x if args.x is not None else params.alpha + params.gamma
        out["d1"], out["d2"], out["x"] = args.d1, args.d2, x
        value = g_edge_density(x, args.d1, args.d2, params)
        out["value"] = value
        out["abs_err_est"] = _quad_err_estimate(value)
    elif args.what == "kappa":
        value = kappa(args.c1, args.c2, args.r, args.x)
        out.update({"c1": args.c1, "c2": args.c2, "r": args.r, "x": args.x})
        out["value"] = value
        out["abs_err_est"] = _quad_err_estimate(value)
    else:
        raise SystemExit(f"error: unknown theory target {args.what!r}")
    print(json.dumps(out, sort_keys=True))
    return 0


def _cmd_oracle(args) -> int:
    params = _params_from_args(args)
    seed_graph = _seed_graph_from_args(args)
    kind = args.kind
    if kind in ("E_in", "E_out"):
        build = dp_E_in if kind == "E_in" else dp_E_out
        table = build(params, seed_graph, args.t_max, args.d_max)
        path = _out_path(args, f"oracle_{kind}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("T,N,d,value\n")
            for T in range(table.T_max + 1):
                off = tri_off(T)
                for N in range(T + 1):
                    col = table.values[:, off + N]
                    for d in range(col.shape[0]):
                        fh.write(f"{T},{N},{d},{float(col[d])!r}\n")
    else:
        build = dp_D2 if kind == "D2" else dp_EX
        d1, d2 = args.d1, args.d2
        table = build(params, seed_graph, args.t_max, d1, d2)
        path = _out_path(args, f"oracle_{kind}.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("T,N,value\n")
            row = table.values[d1, d2]
            for T in range(table.T_max + 1):
                off = tri_off(T)
                for N in range(T + 1):
                    fh.write(f"{T},{N},{float(row[off + N])!r}\n")
    print(f"wrote {path}")
    return 0


def _parse_pairs(specs) -> tuple[tuple[int, int], ...]:
    pairs = []
    for spec in specs or ():
        left, _, right = str(spec).partition(",")
        try:
            pairs.append((int(left), int(right)))
        except ValueError:
            raise ValueError(f"expected a degree pair D1,D2, got {spec!r}") from None
    return tuple(pairs)


def _cmd_experiment(args) -> int:
    params = _params_from_args(args)
    seed_graph = _seed_graph_from_args(args)
    if args.edges is None:
        raise SystemExit("error: --edges is required")
    cfg = RunConfig(
        params=params,
        t=args.edges,
        runs=args.runs if args.runs is not None else 1,
        master_seed=args.seed if args.seed is not None else 0,
        seed_graph=seed_graph,
        d_max=args.d_max,
        report_d_max=args.report_d_max,
        x_pairs=_parse_pairs(args.x_pair),
        sides=tuple(args.side),
        jobs=args.jobs,
        out_dir=args.out_dir,
        check_theorem2=not args.no_theorem2,
        theorem2_eps=args.eps,
        check_theorem4=not args.no_theorem4,
    )
    report = run_experiment(cfg)
    if args.out_dir:
        print(f"wrote {os.path.join(args.out_dir, 'report.json')}")
    if report.theorem2 is not None and "fraction" in report.theorem2:
        print(f"theorem2 fraction: {report.theorem2['fraction']:.4f} "
              f"over {report.theorem2['cells']} cells")
    for row in report.theorem4:
        print(f"theorem4 ({row['d1']},{row['d2']}): max_dev={row['max_dev']:.1f} "
              f"bound={row['bound']:.1f} ok={row['max_dev_ok']}")
    if not args.out_dir:
        print(report.to_json())
    return 0


def _parse_int_grid(text, default) -> tuple[int, ...]:
    if text is None:
        return default
    return tuple(int(part) for part in str(text).split(",") if part != "")


def _cmd_compare(args) -> int:
    params = _params_from_args(args)
    seed_graph = _seed_graph_from_args(args)
    table = compare_theory_vs_oracle(
        params,
        seed_graph,
        T_grid=_parse_int_grid(args.t_grid, (250, 500, 1000)),
        d_grid=_parse_int_grid(args.d_grid, (0, 1, 2, 3)),
        pairs=_parse_pairs(args.pair),
    )
    text = json.dumps(table, sort_keys=True, indent=2)
    if args.out_dir:
        path = _out_path(args, "compare.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.write("\n")
        print(f"wrote {path}")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpa",
        description="directed preferential attachment: simulation and limit formulas",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("generate", help="grow a graph and write edges.csv")
    _add_gen_flags(sp)
    sp.set_defaults(func=_cmd_generate)

    sp = sub.add_parser("degree-dist", help="degree histogram as hist.csv")
    _add_gen_flags(sp)
    sp.add_argument("--side", choices=("in", "out"), default="in")
    sp.add_argument("--in-file", default=None, dest="in_file",
                    help="existing edges CSV instead of generating")
    sp.set_defaults(func=_cmd_degree_dist)

    sp = sub.add_parser("joint", help="per-edge endpoint degree classes as joint.csv")
    _add_gen_flags(sp)
    sp.add_argument("--in-file", default=None, dest="in_file")
    sp.set_defaults(func=_cmd_joint)

    sp = sub.add_parser("theory", help="evaluate a limit formula, print JSON")
    _add_model_flags(sp)
    sp.add_argument("--what", required=True,
                    choices=("params", "fbar", "f-in", "f-out", "cx",
                             "cx-asymptote", "g", "kappa"))
    sp.add_argument("--d", type=int, default=0)
    sp.add_argument("--d1", type=int, default=1)
    sp.add_argument("--d2", type=int, default=1)
    sp.add_argument("--x", type=float, default=None)
    sp.add_argument("--c1", type=float, default=1.0)
    sp.add_argument("--c2", type=float, default=1.0)
    sp.add_argument("--r", type=float, default=1.0)
    sp.add_argument("--direction", choices=("to_zero", "to_inf"), default="to_inf")
    sp.set_defaults(func=_cmd_theory)

    sp = sub.add_parser("oracle", help="build an expectation table, write CSV")
    _add_model_flags(sp)
    sp.add_argument("--kind", choices=("E_in", "E_out", "D2", "EX"), default="E_in")
    sp.add_argument("--t-max", type=int, default=100, dest="t_max")
    sp.add_argument("--d-max", type=int, default=10, dest="d_max")
    sp.add_argument("--d1", type=int, default=1)
    sp.add_argument("--d2", type=int, default=1)
    sp.add_argument("--out-dir", default=None, dest="out_dir")
    sp.set_defaults(func=_cmd_oracle)

    sp = sub.add_parser("experiment", help="Monte Carlo runs + theory report")
    _add_gen_flags(sp)
    sp.add_argument("--runs", type=int, default=None)
    sp.add_argument("--d-max", type=int, default=512, dest="d_max")
    sp.add_argument("--report-d-max", type=int, default=20, dest="report_d_max")
    sp.add_argument("--x-pair", action="append", default=None, dest="x_pair",
                    metavar="D1,D2", help="edge class to track (repeatable)")
    sp.add_argument("--side", action="append", default=None,
                    choices=("in", "out"), help="histogram sides (repeatable)")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--eps", type=float, default=0.1,
                    help="exponent offset in the concentration bound")
    sp.add_argument("--no-theorem2", action="store_true")
    sp.add_argument("--no-theorem4", action="store_true")
    sp.set_defaults(func=_cmd_experiment)

    sp = sub.add_parser("compare", help="expectation tables vs limit shapes")
    _add_model_flags(sp)
    sp.add_argument("--t-grid", default=None, dest="t_grid", metavar="T1,T2,...")
    sp.add_argument("--d-grid", default=None, dest="d_grid", metavar="D1,D2,...")
    sp.add_argument("--pair", action="append", default=None, metavar="D1,D2")
    sp.add_argument("--out-dir", default=None, dest="out_dir")
    sp.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args = _merge_config(args)
    if args.command == "experiment":
        if args.side is None:
            args.side = ["in"]
        elif not isinstance(args.side, list):
            args.side = [args.side]
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"dpa: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
