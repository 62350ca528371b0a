"""Command-line front end for reproducible verification runs.

Exit codes: 0 all checked invariants hold, 1 an invariant was violated,
2 usage error, 3 a work or size budget was exceeded.  Every subcommand
writes a ``manifest.json`` beside its reports; identical configurations
produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bicombing import BicombingEngine, area_sweep, scan_inner_pairs
from .cocycle import (
    CocycleParams,
    l1_bound_report,
    nonvanish_check,
    omega,
    permutation_law_report,
)
from .convergence import fit_all
from .errors import (
    BudgetExceededError,
    GeodesicCapError,
    GraphFormatError,
    GraphStructureError,
    HypercombError,
    PreconditionError,
    SizeCapError,
    TrustRadiusError,
)
from .generators import DEFAULT_VERTEX_CAP, export_ball, ingest_or_family
from .hyperbolicity import fine_delta
from .ideal import check_ideal_conditions, nonzero_edge_search, q_ideal, ray_to
from .reports import manifest, write_csv, write_json

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


def _add_graph_source(p, radius_default=None):
    p.add_argument("--family", help="built-in family, e.g. free:2 or cyclic:3,3")
    p.add_argument("--graph", help="path to a graph file to ingest")
    p.add_argument("--radius", type=int, default=radius_default,
                   help="ball radius for built-in families")
    p.add_argument("--vertex-cap", type=int, default=DEFAULT_VERTEX_CAP)


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="hypercomb-out",
                   help="output directory for reports")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hypercomb",
        description="exact combing chains and boundary cocycles on "
                    "truncated hyperbolic graphs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a ball and export it")
    _add_graph_source(p)
    _add_common(p)

    p = sub.add_parser("delta", help="fine-triangle constant of a ball")
    _add_graph_source(p)
    _add_common(p)
    p.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--inner-radius", type=int, default=None)

    p = sub.add_parser("bicomb", help="combing chain and bounds for one pair")
    p.add_argument("a", help="source vertex id")
    p.add_argument("b", help="target vertex id")
    _add_graph_source(p)
    _add_common(p)
    p.add_argument("--no-trust-check", action="store_true")

    p = sub.add_parser("verify-all",
                       help="exhaustive identity and bound scan on inner pairs")
    _add_graph_source(p)
    _add_common(p)
    p.add_argument("--extended-sources", type=int, default=50)
    p.add_argument("--extended-targets", type=int, default=40)

    p = sub.add_parser("area-sweep", help="cyclic-sum norms on random triples")
    _add_graph_source(p)
    _add_common(p)
    p.add_argument("--samples", type=int, default=10_000)

    p = sub.add_parser("decay", help="certified decay envelopes")
    _add_graph_source(p)
    _add_common(p)
    p.add_argument("--samples", type=int, default=5_000)

    p = sub.add_parser("ideal", help="extended combing between two rays")
    _add_graph_source(p)
    _add_common(p)
    p.add_argument("--xi", required=True, help="rim vertex id of the first ray")
    p.add_argument("--eta", required=True, help="rim vertex id of the second ray")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--probe-x", default=None,
                   help="vertex id for the nonzero-edge search")

    p = sub.add_parser("cocycle", help="doubled cocycle on a ray triple")
    _add_graph_source(p)
    _add_common(p)
    p.add_argument("--triple", nargs=3, required=True,
                   metavar=("RIM1", "RIM2", "RIM3"))
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--param-D", type=int, default=None,
                   help="witness-search radius override")
    p.add_argument("--param-L", type=int, default=None,
                   help="flank offset override")
    p.add_argument("--param-R", type=int, default=None,
                   help="pair range override")

    p = sub.add_parser("export-dot", help="Graphviz export of a ball")
    _add_graph_source(p)
    _add_common(p)
    return parser


def _load_ball(parser, args):
    if args.graph is None and args.family is None:
        parser.error("one of --family or --graph is required")
    if args.graph is None and args.radius is None:
        parser.error("--radius is required with --family")
    minima = {"radius": 1, "samples": 1, "depth": 1, "vertex_cap": 1,
              "extended_sources": 0, "extended_targets": 0}
    for flag, lo in minima.items():
        value = getattr(args, flag, None)
        if value is not None and value < lo:
            parser.error(f"--{flag.replace('_', '-')} must be at least {lo}")
    return ingest_or_family(graph_path=args.graph, family=args.family,
                            radius=args.radius, vertex_cap=args.vertex_cap)


def _config(args):
    skip = {"command", "func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _outdir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _engine(ball):
    return BicombingEngine(ball)


def cmd_gen(parser, args):
    ball = _load_ball(parser, args)
    out = _outdir(args)
    (out / "graph.txt").write_text(export_ball(ball), encoding="utf-8")
    write_json(out / "manifest.json", manifest(
        "gen", _config(args), family=ball.family, radius=ball.radius,
        trust_radius=ball.trust_radius,
        n_vertices=ball.graph.n_vertices,
        n_geometric_edges=ball.graph.n_geometric_edges))
    print(f"wrote {out / 'graph.txt'}")
    return EXIT_OK


def cmd_delta(parser, args):
    ball = _load_ball(parser, args)
    out = _outdir(args)
    report = fine_delta(ball, mode=args.mode, samples=args.samples,
                        seed=args.seed, inner_radius=args.inner_radius)
    payload = report.to_jsonable(ball.graph)
    write_json(out / "report.json", payload)
    write_json(out / "manifest.json", manifest(
        "delta", _config(args), family=ball.family, delta=report.delta))
    print(f"delta={report.delta} mode={report.mode} "
          f"triples_scanned={report.triples_scanned}")
    return EXIT_OK


def cmd_bicomb(parser, args):
    ball = _load_ball(parser, args)
    engine = _engine(ball)
    graph = ball.graph
    a = graph.vertex_index(args.a)
    b = graph.vertex_index(args.b)
    check = False if args.no_trust_check else None
    chain = engine.qprime(a, b, check_trust=check)
    bounds = engine.verify_bounds(a, b, check_trust=check)
    out = _outdir(args)
    payload = {
        "a": args.a,
        "b": args.b,
        "chain": chain.to_json_dict(graph),
        "bounds": bounds.to_jsonable(graph),
        "ledger": engine.ledger.to_jsonable(),
    }
    write_json(out / "report.json", payload)
    write_json(out / "manifest.json", manifest(
        "bicomb", _config(args), family=ball.family,
        delta=engine.ledger.delta, ledger=engine.ledger.to_jsonable()))
    print(f"l1={bounds.rows[0].l1} ok={bounds.ok}")
    return EXIT_OK if bounds.ok else EXIT_VIOLATION


def cmd_verify_all(parser, args):
    ball = _load_ball(parser, args)
    engine = _engine(ball)
    report = scan_inner_pairs(engine, extended_sources=args.extended_sources,
                              extended_targets=args.extended_targets,
                              seed=args.seed)
    out = _outdir(args)
    payload = report.to_jsonable()
    payload["ledger"] = engine.ledger.to_jsonable()
    write_json(out / "report.json", payload)
    write_json(out / "manifest.json", manifest(
        "verify-all", _config(args), family=ball.family,
        radius=ball.radius, trust_radius=ball.trust_radius,
        delta=engine.ledger.delta, ledger=engine.ledger.to_jsonable(),
        n_pairs=report.n_pairs, n_extended_pairs=report.n_extended_pairs,
        n_violations=len(report.violations)))
    print(f"pairs={report.n_pairs} extended={report.n_extended_pairs} "
          f"violations={len(report.violations)}")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_area_sweep(parser, args):
    ball = _load_ball(parser, args)
    engine = _engine(ball)
    report, rows = area_sweep(engine, args.samples, args.seed)
    out = _outdir(args)
    write_json(out / "report.json", report)
    write_csv(out / "raw.csv", rows, columns=["a", "b", "c", "area"])
    write_json(out / "manifest.json", manifest(
        "area-sweep", _config(args), family=ball.family,
        delta=engine.ledger.delta, sup=report["sup"]))
    print(f"sup_area={report['sup']} over {args.samples} triples")
    return EXIT_OK


def cmd_decay(parser, args):
    ball = _load_ball(parser, args)
    engine = _engine(ball)
    constants, raw = fit_all(engine, args.samples, args.seed)
    out = _outdir(args)
    write_json(out / "report.json", constants.to_jsonable())
    rows = []
    for kind, kind_rows in raw.items():
        for row in kind_rows:
            flat = {"fit": kind}
            flat.update(row)
            rows.append(flat)
    write_csv(out / "raw.csv", rows)
    write_json(out / "manifest.json", manifest(
        "decay", _config(args), family=ball.family,
        delta=engine.ledger.delta, seed=args.seed))
    ok = (constants.bb.violations == 0 and constants.aa.violations == 0
          and constants.main.violations == 0
          and constants.aa_far_violations == 0)
    print(f"bb:base={constants.bb.base:.4f} aa:base={constants.aa.base:.4f} "
          f"main:base={constants.main.base:.4f} violations_ok={ok}")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_ideal(parser, args):
    ball = _load_ball(parser, args)
    engine = _engine(ball)
    graph = ball.graph
    xi = ray_to(ball, graph.vertex_index(args.xi))
    eta = ray_to(ball, graph.vertex_index(args.eta))
    report = q_ideal(engine, xi, eta, depth=args.depth)
    payload = {"q_ideal": report.to_jsonable(graph)}
    ok = True
    if not report.degenerate:
        conditions = check_ideal_conditions(engine, xi, eta, depth=args.depth)
        payload["conditions"] = conditions.to_jsonable()
        ok = conditions.ok
        if args.probe_x is not None:
            probe = nonzero_edge_search(
                engine, xi, eta, graph.vertex_index(args.probe_x),
                depth=args.depth)
            payload["nonzero_edge"] = probe.to_jsonable(graph)
            ok = ok and probe.found
    out = _outdir(args)
    write_json(out / "report.json", payload)
    write_json(out / "manifest.json", manifest(
        "ideal", _config(args), family=ball.family,
        delta=engine.ledger.delta))
    print(f"depth={report.depth_used} stabilized={report.stabilized} ok={ok}")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_cocycle(parser, args):
    ball = _load_ball(parser, args)
    engine = _engine(ball)
    graph = ball.graph
    rays = [ray_to(ball, graph.vertex_index(r)) for r in args.triple]
    params = CocycleParams.minimal(engine)
    if any(v is not None for v in (args.param_D, args.param_L, args.param_R)):
        d = params.D if args.param_D is None else args.param_D
        ell = params.L if args.param_L is None else args.param_L
        r = params.R if args.param_R is None else args.param_R
        if r == params.R:
            m = params.M
        else:
            from .cocycle import _max_edges_in_ball

            m = _max_edges_in_ball(ball, r + 1)
        params = CocycleParams(delta=params.delta, C=params.C, D=d, L=ell,
                               R=r, M=m)
    chain, depths = omega(engine, *rays, params, depth=args.depth)
    witness = nonvanish_check(engine, *rays, params, depth=args.depth)
    law = permutation_law_report(engine, *rays, params, depth=args.depth)
    norms = l1_bound_report(engine, [tuple(rays)], params, depth=args.depth)
    payload = {
        "params": params.to_jsonable(),
        "l1_norm": norms["sup_l1"],
        "witness": witness.to_jsonable(graph),
        "permutation_law": law,
        "depth": witness.depth,
        "depths": list(depths),
        "report": norms,
    }
    out = _outdir(args)
    write_json(out / "report.json", payload)
    write_json(out / "manifest.json", manifest(
        "cocycle", _config(args), family=ball.family,
        delta=engine.ledger.delta, params=params.to_jsonable(),
        depth=witness.depth))
    print(f"l1={norms['sup_l1']} witness_found={witness.found}")
    return EXIT_OK if witness.found else EXIT_VIOLATION


def cmd_export_dot(parser, args):
    ball = _load_ball(parser, args)
    graph = ball.graph
    lines = ["graph ball {"]
    for vid in graph.vertex_ids:
        lines.append(f'  "{vid}";')
    for e in graph.edge_reps():
        u = graph.vertex_ids[int(graph.edge_src[e])]
        v = graph.vertex_ids[int(graph.edge_dst[e])]
        lines.append(f'  "{u}" -- "{v}";')
    lines.append("}")
    out = _outdir(args)
    (out / "graph.dot").write_text("\n".join(lines) + "\n", encoding="utf-8")
    write_json(out / "manifest.json", manifest(
        "export-dot", _config(args), family=ball.family))
    print(f"wrote {out / 'graph.dot'}")
    return EXIT_OK


_COMMANDS = {
    "gen": cmd_gen,
    "delta": cmd_delta,
    "bicomb": cmd_bicomb,
    "verify-all": cmd_verify_all,
    "area-sweep": cmd_area_sweep,
    "decay": cmd_decay,
    "ideal": cmd_ideal,
    "cocycle": cmd_cocycle,
    "export-dot": cmd_export_dot,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = _COMMANDS[args.command]
    try:
        return handler(parser, args)
    except (SizeCapError, BudgetExceededError, GeodesicCapError) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (GraphFormatError, GraphStructureError, PreconditionError,
            TrustRadiusError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HypercombError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
