"""Approximation algorithms for exact pairwise distance preservers.

Three building blocks cover complementary regimes, dispatched by a
doubling guess of the optimum size:

* large optimum: LP rounding for thin pairs plus full shortest-path
  trees at a hitting set of hubs for thick pairs;
* small pair distances: the same rounding but with hub paths only to
  nearby terminals instead of full trees;
* large pair distances: repeated extraction of low-density junction
  trees over shortest-path unions through each candidate root.
"""

from __future__ import annotations

import logging
import math

from .errors import InfeasibleInstanceError, RoundingError
from .graph import (Demand, DemandSet, Graph, all_satisfied, distance_buckets,
                    classify_thickness, in_tree_edges, local_graph,
                    metric_completion, out_tree_edges, validate_demands,
                    verify_solution)
from .junction import JunctionConfig, junction_tree_density
from .lp import build_preserver_lp, solve
from .rounding import hitting_set, randomized_round, split_seed

log = logging.getLogger(__name__)


def _round_thin(g: Graph, thin: list[Demand], k: float, seed: int,
                lp_method: str = "auto") -> set[int]:
    lp = build_preserver_lp(g, DemandSet(thin))
    sol = solve(lp.model, lp_method)
    if sol.status != "optimal":  # connected exact pairs always admit x = 1
        raise InfeasibleInstanceError(f"preserver LP is {sol.status}")
    return set(randomized_round(g, lp.x_values(sol), k, thin, seed))


def algorithm1(g: Graph, demands: DemandSet, opt_guess: int, seed: int) -> tuple[int, ...]:
    """Rounding for thin pairs, full in/out shortest-path trees at a
    hitting set of hubs for thick pairs, with k = n / sqrt(opt_guess)."""
    if opt_guess < 1:
        raise ValueError("opt_guess must be >= 1")
    if not len(demands):
        return ()
    validate_demands(g, demands)
    k = g.n / math.sqrt(opt_guess)
    thick, thin = classify_thickness(g, demands, k)
    chosen: set[int] = set()
    if thin:
        chosen |= _round_thin(g, thin, k, split_seed(seed, "alg1-round"))
    if thick:
        hubs = hitting_set([local_graph(g, d.s, d.t).vertices for d in thick], k)
        for u in hubs:
            chosen.update(out_tree_edges(g, u))
            chosen.update(in_tree_edges(g, u))
    return tuple(sorted(chosen))


def algorithm2(g: Graph, bucket: DemandSet, dstar: int, opt_guess: int,
               seed: int) -> tuple[int, ...]:
    """Like algorithm1 with k = sqrt(d* n), but hubs add only shortest
    paths to/from nearby bucket terminals rather than full trees.

    opt_guess does not enter the construction (the rounding scale is
    k ln n); it is accepted so callers can dispatch uniformly.
    """
    del opt_guess
    if not len(bucket):
        return ()
    validate_demands(g, bucket)
    k = math.sqrt(dstar * g.n)
    thick, thin = classify_thickness(g, bucket, k)
    chosen: set[int] = set()
    if thin:
        chosen |= _round_thin(g, thin, k, split_seed(seed, "alg2-round", dstar))
    if thick:
        hubs = hitting_set([local_graph(g, d.s, d.t).vertices for d in thick], k)
        metric = metric_completion(g)
        to_u = {}
        from_u = {}
        for u in hubs:
            to_u[u] = g.dist_to(u)
            from_u[u] = g.dist_from(u)
        s_near = {u: sorted({d.s for d in bucket if to_u[u][d.s] < 2 * dstar})
                  for u in hubs}
        t_near = {u: sorted({d.t for d in bucket if from_u[u][d.t] < 2 * dstar})
                  for u in hubs}
        for u in hubs:
            for s in s_near[u]:
                if s != u:
                    chosen.update(g.edge_id[e] for e in metric.path_edges(s, u))
            for t in t_near[u]:
                if t != u:
                    chosen.update(g.edge_id[e] for e in metric.path_edges(u, t))
    return tuple(sorted(chosen))


def _exact_junction_instance(g: Graph, root: int, pairs: list[Demand], dstar: int):
    """Disjoint union of the shortest-path DAGs into and out of `root`,
    restricted to vertices within 2d* of it, with renamed vertices.

    Every surviving path from an in-copy source to the root, or from the
    root to an out-copy sink, is a shortest path of g, so any junction
    routing found here preserves distances exactly.  Returns the union
    graph, renamed demands, the union root, and the edge back-map.
    """
    to_r = g.dist_to(root)
    from_r = g.dist_from(root)
    lim = 2 * dstar
    in_map: dict[int, int] = {root: 0}
    out_map: dict[int, int] = {root: 0}
    nxt = 1
    for v in range(g.n):
        if v != root and to_r[v] < lim:
            in_map[v] = nxt
            nxt += 1
    for v in range(g.n):
        if v != root and from_r[v] < lim:
            out_map[v] = nxt
            nxt += 1
    edges = []
    back: dict[tuple[int, int], int] = {}
    for eid, (a, b) in enumerate(g.edges):
        if a in in_map and b in in_map and to_r[a] == to_r[b] + 1:
            key = (in_map[a], in_map[b])
            edges.append(key)
            back[key] = eid
        if a in out_map and b in out_map and from_r[b] == from_r[a] + 1:
            key = (out_map[a], out_map[b])
            edges.append(key)
            back[key] = eid
    union = Graph(nxt, edges)
    renamed = DemandSet([Demand(in_map[d.s], out_map[d.t],
                                int(to_r[d.s] + from_r[d.t])) for d in pairs])
    return union, renamed, 0, back


def algorithm3(g: Graph, bucket: DemandSet, dstar: int, epsilon: float,
               seed: int, config: JunctionConfig | None = None,
               lp_method: str = "auto") -> tuple[int, ...]:
    """Cover the bucket by repeatedly extracting the best-ratio junction
    tree over candidate roots; each iteration must satisfy >= 1 pair."""
    if not len(bucket):
        return ()
    validate_demands(g, bucket)
    remaining = list(bucket)
    chosen: set[int] = set()
    iteration = 0
    while remaining:
        best = None
        for u in range(g.n):
            pairs_u = [d for d in remaining
                       if g.dist(d.s, u) + g.dist(u, d.t) == g.dist(d.s, d.t)]
            if not pairs_u:
                continue
            union, renamed, uroot, back = _exact_junction_instance(g, u, pairs_u, dstar)
            try:
                res = junction_tree_density(
                    union, renamed, uroot, epsilon,
                    split_seed(seed, "alg3", dstar, iteration, u),
                    config=config, lp_method=lp_method)
            except (InfeasibleInstanceError, RoundingError):
                continue
            if best is None or res.density < best[0] - 1e-12:
                mapped = sorted({back[union.edges[e]] for e in res.edge_ids})
                best = (res.density, u, mapped)
        if best is None:
            raise InfeasibleInstanceError(
                f"no root advances bucket d*={dstar}; remaining {len(remaining)}")
        chosen.update(best[2])
        reports = verify_solution(g, chosen, DemandSet(remaining))
        still = [d for d, rep in zip(remaining, reports) if not rep.satisfied]
        if len(still) == len(remaining):
            raise InfeasibleInstanceError(
                f"junction tree at root {best[1]} satisfied no pair")
        remaining = still
        iteration += 1
    return tuple(sorted(chosen))


def preserver_approx(g: Graph, demands: DemandSet, epsilon: float = 0.5,
                     seed: int = 0, config: JunctionConfig | None = None,
                     lp_method: str = "auto") -> tuple[int, ...]:
    """Doubling-guess driver; returns the smallest verified preserver
    over all guesses (the full edge set is always a feasible fallback).

    Guesses at least n^(4/5) run algorithm1 (its rounding scale depends
    on the guess); smaller guesses dispatch buckets by d* <= n^(1/5) to
    algorithm2 or algorithm3, which do not depend on the guess and so
    run once.
    """
    if not len(demands):
        return ()
    validate_demands(g, demands)
    exact = DemandSet([Demand(d.s, d.t) for d in demands])
    threshold = g.n ** 0.8
    candidates: list[tuple[int, ...]] = [tuple(range(g.m))]
    guess = 1
    ran_small_guess = False
    while True:
        if guess >= threshold:
            try:
                candidates.append(algorithm1(g, exact, guess, split_seed(seed, "g", guess)))
            except RoundingError as exc:
                log.warning("algorithm1 failed at guess %d: %s", guess, exc)
        else:
            ran_small_guess = True
        if guess >= max(g.m, 1):
            break
        guess *= 2
    if ran_small_guess:
        chosen: set[int] = set()
        for dstar, bucket in distance_buckets(g, exact).items():
            if dstar <= g.n ** 0.2:
                chosen.update(algorithm2(g, bucket, dstar, 1, seed))
            else:
                chosen.update(algorithm3(g, bucket, dstar, epsilon, seed,
                                         config=config, lp_method=lp_method))
        candidates.append(tuple(sorted(chosen)))
    feasible = [c for c in candidates
                if all_satisfied(verify_solution(g, c, exact))]
    return min(feasible, key=lambda c: (len(c), c))
