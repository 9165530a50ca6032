"""Command-line entry point.

Results are line-delimited key/value records on stdout.  Exit codes:
0 success, 2 infeasible or malformed input, 3 budget refusal, 1 internal
error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from collections import deque

from .errors import BudgetError, InfeasibleInstanceError, ParseError, SpanoptError
from .graph import (INF, DemandSet, Graph, effective_bound, format_demands,
                    format_graph, parse_demands, parse_graph, verify_solution)
from .hardness import (completeness_witness_plus1, completeness_witness_plusk,
                       format_minrep, format_role_map, format_spanner_instance,
                       minrep_yes, parse_minrep, reduce_plus1, reduce_plusk)
from .oracle import exact_min_density_junction_tree, exact_min_solution
from .preserver import preserver_approx
from .steiner import dsf_approx, pairwise_spanner_approx
from . import bench


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fp:
        return fp.read()


def _solve_command(args, solver) -> int:
    g = parse_graph(_read(args.graph))
    demands = parse_demands(_read(args.demands))
    edges = solver(g, demands, epsilon=args.epsilon, seed=args.seed)
    reports = verify_solution(g, edges, demands)
    print("status ok")
    print(f"n {g.n}")
    print(f"m {g.m}")
    print(f"pairs {len(demands)}")
    print(f"edges {len(edges)}")
    for e in edges:
        u, v = g.edges[e]
        print(f"edge {u} {v}")
    for rep in reports:
        bound = "inf" if rep.required == INF else int(rep.required)
        achieved = "inf" if rep.achieved == INF else int(rep.achieved)
        print(f"pair {rep.s} {rep.t} achieved {achieved} bound {bound} "
              f"satisfied {int(rep.satisfied)}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            fp.write(format_graph(g, edges))
    return 0


def _verify_additive_text(graph_text: str, sol_text: str, k: int) -> tuple[bool, int]:
    """Undirected all-pairs +k check for emitted hardness instances."""
    g = parse_graph(graph_text)
    h = parse_graph(sol_text)
    gset = {tuple(sorted(e)) for e in g.edges}
    hset = {tuple(sorted(e)) for e in h.edges}
    extra = hset - gset
    if extra:
        raise InfeasibleInstanceError(f"solution edge {sorted(extra)[0]} not in graph")

    def rows(edges):
        adj = [[] for _ in range(g.n)]
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        all_rows = []
        for s in range(g.n):
            dist = [math.inf] * g.n
            dist[s] = 0
            q = deque([s])
            while q:
                u = q.popleft()
                for v in adj[u]:
                    if dist[v] == math.inf:
                        dist[v] = dist[u] + 1
                        q.append(v)
            all_rows.append(dist)
        return all_rows

    dg = rows(gset)
    dh = rows(hset)
    bad = 0
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if dh[u][v] > dg[u][v] + k:
                bad += 1
    return bad == 0, bad


def _verify_command(args) -> int:
    if (args.k is None) == (args.demands is None):
        raise InfeasibleInstanceError("verify needs exactly one of --k or --demands")
    if args.k is not None:
        ok, bad = _verify_additive_text(_read(args.graph), _read(args.solution), args.k)
        print(f"status {'ok' if ok else 'violated'}")
        print(f"stretch {args.k}")
        print(f"violated_pairs {bad}")
        return 0 if ok else 2
    g = parse_graph(_read(args.graph))
    sol = parse_graph(_read(args.solution))
    ids = []
    for e in sol.edges:
        if e not in g.edge_id:
            raise InfeasibleInstanceError(f"solution edge {e} not in graph")
        ids.append(g.edge_id[e])
    demands = parse_demands(_read(args.demands))
    reports = verify_solution(g, ids, demands)
    all_ok = all(r.satisfied for r in reports)
    print(f"status {'ok' if all_ok else 'violated'}")
    for rep in reports:
        bound = "inf" if rep.required == INF else int(rep.required)
        achieved = "inf" if rep.achieved == INF else int(rep.achieved)
        print(f"pair {rep.s} {rep.t} achieved {achieved} bound {bound} "
              f"satisfied {int(rep.satisfied)}")
    return 0 if all_ok else 2


def _oracle_command(args) -> int:
    g = parse_graph(_read(args.graph))
    demands = parse_demands(_read(args.demands))
    if args.root is not None:
        result = exact_min_density_junction_tree(g, demands, args.root)
        if result is None:
            print("status infeasible")
            print(f"root {args.root}")
            print("density inf")
            return 2
        density, edges, satisfied = result
        print("status ok")
        print(f"root {args.root}")
        print(f"density {density:.6f}")
        print(f"edges {len(edges)}")
        for e in edges:
            u, v = g.edges[e]
            print(f"edge {u} {v}")
        return 0
    opt, edges = exact_min_solution(g, demands)
    print("status ok")
    print(f"opt {opt}")
    for e in edges:
        u, v = g.edges[e]
        print(f"edge {u} {v}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            fp.write(format_graph(g, edges))
    return 0


def _gen_minrep_command(args) -> int:
    inst, cover = minrep_yes(args.r, args.sigma, args.d, args.seed)
    text = format_minrep(inst, cover)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fp:
            fp.write(text)
        print("status ok")
        print(f"out {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _reduce_command(args) -> int:
    if args.minrep:
        inst, cover = parse_minrep(_read(args.minrep))
    else:
        inst, cover = minrep_yes(args.r, args.sigma, args.d, args.seed)
    if args.variant == "+1":
        g = reduce_plus1(inst, args.x)
        witness = (completeness_witness_plus1(g, cover)
                   if cover is not None and args.witness else None)
    else:
        if args.k is None or args.k < 3:
            raise InfeasibleInstanceError("+k reduction needs --k >= 3")
        g = reduce_plusk(inst, args.x, args.k)
        witness = (completeness_witness_plusk(g, cover)
                   if cover is not None and args.witness else None)
    graph_text = format_spanner_instance(g)
    roles_text = format_role_map(g)
    if args.out:
        with open(args.out + ".graph", "w", encoding="utf-8") as fp:
            fp.write(graph_text)
        with open(args.out + ".roles", "w", encoding="utf-8") as fp:
            fp.write(roles_text)
        if witness is not None:
            with open(args.out + ".witness", "w", encoding="utf-8") as fp:
                fp.write(f"{g.n} {len(witness)}\n")
                fp.writelines(f"{a} {b}\n" for a, b in sorted(witness))
        print("status ok")
        print(f"n {g.n}")
        print(f"m {g.m}")
        print(f"out {args.out}.graph {args.out}.roles"
              + (f" {args.out}.witness" if witness is not None else ""))
    else:
        sys.stdout.write(graph_text)
        sys.stdout.write(roles_text)
    return 0


def _bench_command(args) -> int:
    if args.suite != "desk":
        raise InfeasibleInstanceError(f"unknown suite {args.suite!r}")
    failures = bench.run_desk_suite(args.seed, epsilon=args.epsilon)
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spanopt",
        description="Approximation algorithms for distance preservers, pairwise "
                    "spanners, and uniform-cost directed Steiner forest.")
    parser.add_argument("--trace", action="store_true",
                        help="log pipeline traces to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--graph", required=True)
        p.add_argument("--demands", required=True)
        p.add_argument("--epsilon", type=float, default=0.5)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        return p

    add_solver("solve-preserver", "exact pairwise distance preserver")
    add_solver("solve-dsf", "uniform-cost directed Steiner forest")
    add_solver("solve-spanner", "pairwise spanner with per-pair bounds")

    p = sub.add_parser("verify", help="check a solution file")
    p.add_argument("--graph", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--k", type=int, help="all-pairs additive stretch check")
    p.add_argument("--demands", help="per-demand check")

    p = sub.add_parser("oracle", help="exact brute-force optimum")
    p.add_argument("--graph", required=True)
    p.add_argument("--demands", required=True)
    p.add_argument("--root", type=int, help="junction-tree density through this root")
    p.add_argument("--out")

    p = sub.add_parser("gen-minrep", help="generate a YES Min-Rep instance")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--sigma", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("reduce", help="emit an additive-spanner hardness instance")
    p.add_argument("variant", choices=["+1", "+k"])
    p.add_argument("--minrep", help="read the Min-Rep instance from a file")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--sigma", type=int, default=2)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--x", type=int, default=2)
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--witness", action="store_true",
                   help="also emit the completeness witness")
    p.add_argument("--out", help="path prefix for .graph/.roles files")

    p = sub.add_parser("bench", help="run the deterministic desk suite")
    p.add_argument("--suite", default="desk")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=0.5)
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.trace:
        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr,
                            format="%(name)s: %(message)s")
    try:
        if args.command == "solve-preserver":
            return _solve_command(args, preserver_approx)
        if args.command == "solve-dsf":
            return _solve_command(args, dsf_approx)
        if args.command == "solve-spanner":
            return _solve_command(args, pairwise_spanner_approx)
        if args.command == "verify":
            return _verify_command(args)
        if args.command == "oracle":
            return _oracle_command(args)
        if args.command == "gen-minrep":
            return _gen_minrep_command(args)
        if args.command == "reduce":
            return _reduce_command(args)
        if args.command == "bench":
            return _bench_command(args)
        raise SpanoptError(f"unknown command {args.command!r}")  # pragma: no cover
    except (ParseError, InfeasibleInstanceError) as exc:
        print(f"status infeasible")
        print(f"error {exc}")
        return 2
    except BudgetError as exc:
        print(f"status refused")
        print(f"error {exc}")
        return 3
    except SpanoptError as exc:
        print(f"status error")
        print(f"error {exc}")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
