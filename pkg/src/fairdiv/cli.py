"""Command-line front door: necklace, sperner, kkm, cake, rent, serve.

Machine-readable JSON goes to stdout; solver failures exit 1, usage errors
exit 2 (argparse's default).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import io as fio
from . import necklace as nk
from .division import agent_from_spec, envy_free_division, envy_report, secret_preference_division
from .kkm import colorful_kkm, kkm_point, strong_colorful_kkm
from .rationals import format_frac, frac
from .simplicial import SpernerColoring, lower_bound, rainbow_facets


class SolverError(Exception):
    pass


def _emit(data) -> int:
    json.dump(data, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return 0


def _constraint(args, k: int) -> nk.ConstraintGraph:
    return nk.ConstraintGraph.parse(getattr(args, "constraint", "free") or "free", k)


def cmd_necklace_solve(args) -> int:
    necklace = fio.load_necklace(args.file)
    graph = _constraint(args, args.k)
    order = tuple(int(x) for x in args.order.split(",")) if args.order else None
    if args.max_cuts is not None:
        result = nk.solve_exhaustive(necklace, args.k, args.max_cuts, graph,
                                     owner_order=order, budget=args.budget)
        if result is None:
            return _emit({"result": "none"})
    elif graph.kind == "binary":
        result = nk.solve_binary_two_color(necklace, args.k)
    elif graph.kind == "cycle4":
        result = nk.solve_cyclic_k4(necklace, budget=args.budget)
    else:
        q = len(set(necklace.beads))
        result = nk.solve_exhaustive(necklace, args.k, (args.k - 1) * q, graph,
                                     owner_order=order, budget=args.budget)
        if result is None:
            return _emit({"result": "none"})
    report = nk.verify(necklace, args.k, result, graph)
    return _emit({"result": "splitting", "fair": report.fair,
                  "constraint_ok": report.constraint_ok,
                  **fio.splitting_to_json(result)})


def cmd_necklace_verify(args) -> int:
    necklace = fio.load_necklace(args.file)
    splitting = fio.load_splitting(args.splitting)
    graph = _constraint(args, args.k)
    report = nk.verify(necklace, args.k, splitting, graph)
    tallies = {str(thief): {str(t): format_frac(v) for t, v in row.items()}
               for thief, row in report.tallies.items()}
    return _emit({"fair": report.fair, "size": report.size,
                  "constraint_ok": report.constraint_ok, "tallies": tallies})


def cmd_sperner_count(args) -> int:
    complex = fio.load_complex(args.complex)
    coloring = fio.load_coloring(args.coloring)
    facets, distinct = rainbow_facets(complex, coloring)
    return _emit({"rainbow": len(facets), "distinct_color_sets": distinct,
                  "facets": [list(f) for f in facets]})


def cmd_sperner_bound(args) -> int:
    complex = fio.load_complex(args.complex)
    return _emit({"bound": format_frac(lower_bound(complex))})


def cmd_kkm_point(args) -> int:
    covers = fio.load_covers(args.cover)
    result = kkm_point(covers[min(covers)], frac(args.eps))
    return _emit({"x": fio.division_to_list(result.x),
                  "eps": format_frac(result.eps),
                  "witnesses": {str(i): fio.division_to_list(w)
                                for i, w in sorted(result.witnesses.items())}})


def cmd_kkm_colorful(args) -> int:
    covers = fio.load_covers(args.cover)
    ordered = [covers[j] for j in sorted(covers)]
    result = colorful_kkm(ordered, frac(args.eps))
    return _emit({"x": fio.division_to_list(result.x),
                  "permutation": {str(j): i for j, i in sorted(result.permutation.items())}})


def cmd_kkm_strong(args) -> int:
    covers = fio.load_covers(args.cover)
    ordered = [covers[j] for j in sorted(covers)]
    result = strong_colorful_kkm(ordered, frac(args.eps), dual=args.dual or None)
    return _emit({"x": fio.division_to_list(result.x),
                  "residual": result.residual,
                  "pick_tables": {str(i): {str(j): int(v) for j, v in sorted(t.items())}
                                  for i, t in sorted(result.pick_tables.items())}})


def _load_agents(path):
    data = json.loads(open(path).read())
    if isinstance(data, dict):
        data = data["agents"]
    return [agent_from_spec(spec) for spec in data]


def cmd_division_run(args, mode: str) -> int:
    agents = _load_agents(args.agents)
    eps = frac(args.eps)
    if args.secret:
        division, table, trace = secret_preference_division(agents, eps, mode)
        payload = {
            "division": fio.division_to_list(division.lengths),
            "pick_table": {str(p): {str(a): piece for a, piece in sorted(row.items())}
                           for p, row in sorted(table.rows.items())},
            "queries": len(trace),
        }
    else:
        division, assignment, trace = envy_free_division(agents, eps, mode)
        payload = {
            "division": fio.division_to_list(division.lengths),
            "assignment": {str(a): p for a, p in sorted(assignment.items())},
            "envy": format_frac(envy_report(division, assignment, agents, mode)),
            "queries": len(trace),
        }
    return _emit(payload)


def cmd_serve(args) -> int:
    import uvicorn

    from .service.http import create_app

    addr = args.addr or os.environ.get("ADDR", "127.0.0.1:8080")
    host, _, port = addr.rpartition(":")
    app = create_app(args.data_dir, args.max_pieces)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fairdiv")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("necklace")
    nsub = p.add_subparsers(dest="subcommand", required=True)
    solve = nsub.add_parser("solve")
    solve.add_argument("--file", required=True)
    solve.add_argument("--k", type=int, required=True)
    solve.add_argument("--max-cuts", type=int, dest="max_cuts")
    solve.add_argument("--constraint", default="free")
    solve.add_argument("--order")
    solve.add_argument("--budget", type=int, default=50_000_000)
    solve.set_defaults(func=cmd_necklace_solve)
    verify = nsub.add_parser("verify")
    verify.add_argument("--file", required=True)
    verify.add_argument("--k", type=int, required=True)
    verify.add_argument("--splitting", required=True)
    verify.add_argument("--constraint", default="free")
    verify.set_defaults(func=cmd_necklace_verify)

    p = sub.add_parser("sperner")
    ssub = p.add_subparsers(dest="subcommand", required=True)
    count = ssub.add_parser("count")
    count.add_argument("--complex", required=True)
    count.add_argument("--coloring", required=True)
    count.set_defaults(func=cmd_sperner_count)
    bound = ssub.add_parser("bound")
    bound.add_argument("--complex", required=True)
    bound.set_defaults(func=cmd_sperner_bound)

    p = sub.add_parser("kkm")
    ksub = p.add_subparsers(dest="subcommand", required=True)
    for name, fn in (("point", cmd_kkm_point), ("colorful", cmd_kkm_colorful),
                     ("strong", cmd_kkm_strong)):
        kp = ksub.add_parser(name)
        kp.add_argument("--cover", required=True)
        kp.add_argument("--eps", default="1/64")
        if name == "strong":
            kp.add_argument("--dual", action="store_true")
        kp.set_defaults(func=fn)

    for mode in ("cake", "rent"):
        p = sub.add_parser(mode)
        msub = p.add_subparsers(dest="subcommand", required=True)
        run = msub.add_parser("run")
        run.add_argument("--agents", required=True)
        run.add_argument("--eps", default="1/1000")
        run.add_argument("--secret", action="store_true")
        run.set_defaults(func=lambda args, mode=mode: cmd_division_run(args, mode))

    p = sub.add_parser("serve")
    p.add_argument("--addr")
    p.add_argument("--data-dir", dest="data_dir",
                   default=os.environ.get("DATA_DIR"))
    p.add_argument("--max-pieces", dest="max_pieces", type=int,
                   default=int(os.environ.get("MAX_PIECES", "8")))
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # solver errors: nonzero exit, JSON on stdout
        json.dump({"error": f"{type(exc).__name__}: {exc}"}, sys.stdout)
        sys.stdout.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
