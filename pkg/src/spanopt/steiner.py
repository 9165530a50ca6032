"""Uniform-cost directed Steiner forest and distance-bounded pairwise
spanners.

Both drivers share one skeleton: guess the optimum by doubling; large
guesses run a hitting-set/rounding pass over the whole demand set, and
small guesses repeatedly extract a good-density edge set (either a
bounded-hop LP settlement of the well-served pairs or the best junction
tree over all roots) from the surviving demands until none remain.
"""

from __future__ import annotations

import logging
import math

from .errors import InfeasibleInstanceError, RoundingError
from .graph import (INF, Demand, DemandSet, Graph, all_satisfied,
                    effective_bound, metric_completion, in_tree_edges,
                    out_tree_edges, validate_demands, verify_solution)
from .junction import JunctionConfig, junction_tree_density
from .lp import build_flow_lp, build_layered_lp, solve
from .preserver import algorithm1 as preserver_algorithm1
from .rounding import hitting_set, randomized_round, split_seed

log = logging.getLogger(__name__)


def algorithm1_flow_variant(g: Graph, demands: DemandSet, opt_guess: int,
                            seed: int, lp_method: str = "auto") -> tuple[int, ...]:
    """Connectivity analog of the preserver hitting-set algorithm:
    thickness is measured on the support of each pair's LP flow."""
    if opt_guess < 1:
        raise ValueError("opt_guess must be >= 1")
    if not len(demands):
        return ()
    validate_demands(g, demands)
    k = g.n / math.sqrt(opt_guess)
    lp = build_flow_lp(g, demands)
    sol = solve(lp.model, lp_method)
    if sol.status != "optimal":  # connected pairs always admit x = 1
        raise InfeasibleInstanceError(f"flow LP is {sol.status}")
    supports = [lp.pair_support(sol, i) for i in range(len(demands))]
    thin, thick = [], []
    for d, sup in zip(demands, supports):
        (thick if len(sup) >= k else thin).append((d, sup))
    chosen: set[int] = set()
    if thin:
        chosen |= set(randomized_round(
            g, lp.x_values(sol), k,
            [Demand(d.s, d.t, INF) for d, _ in thin],
            split_seed(seed, "flow-round")))
    if thick:
        hubs = hitting_set([sorted(sup) for _, sup in thick], k)
        for u in hubs:
            chosen.update(out_tree_edges(g, u))
            chosen.update(in_tree_edges(g, u))
    return tuple(sorted(chosen))


def _settle_quarter(g: Graph, lp, sol, quarter: list[int], d0: int,
                    per_pair: bool, seed: int) -> set[int]:
    """Algorithm-2 style settlement of the well-served pairs: round thin
    pairs against the layered LP capacities, route thick pairs through a
    hitting-set hub with canonical shortest paths.

    A hub settles a pair only when the detour through it meets the
    applicable bound (the per-pair bound when given, else 2 * D0); any
    vertex on the pair's flow support does, since flow paths have at
    most min(D0, bound) hops.
    """
    k = math.sqrt(d0 * g.n)
    x = lp.x_values(sol)
    thin, thick = [], []
    for i in quarter:
        sup = lp.pair_support(sol, i)
        (thick if len(sup) >= k else thin).append((i, sup))
    chosen: set[int] = set()
    if thin:
        targets = []
        for i, _ in thin:
            d = lp.demands[i]
            targets.append(Demand(d.s, d.t, int(min(d0, effective_bound(g, d)))))
        chosen |= set(randomized_round(g, x, k, targets,
                                       split_seed(seed, "quarter-round")))
    if thick:
        hubs = hitting_set([sorted(sup) for _, sup in thick], k)
        hub_set = set(hubs)
        metric = metric_completion(g)
        for i, sup in thick:
            d = lp.demands[i]
            cap = effective_bound(g, d) if per_pair else 2 * d0
            best = None
            for u in sorted(sup & hub_set):
                detour = g.dist(d.s, u) + g.dist(u, d.t)
                if detour <= cap and (best is None or detour < best[0]):
                    best = (detour, u)
            if best is None:
                log.debug("no admissible hub for pair (%d,%d)", d.s, d.t)
                continue
            u = best[1]
            if d.s != u:
                chosen.update(g.edge_id[e] for e in metric.path_edges(d.s, u))
            if d.t != u:
                chosen.update(g.edge_id[e] for e in metric.path_edges(u, d.t))
    return chosen


def algorithm4(g: Graph, demands: DemandSet, epsilon: float, seed: int,
               per_pair: bool, config: JunctionConfig | None = None,
               lp_method: str = "auto"):
    """One density round: settle pairs holding >= 1/4 unit of bounded-hop
    flow, independently find the best junction tree over all roots, and
    return whichever edge set has the smaller edges-per-satisfied-pair
    ratio.

    Returns (edge_ids, satisfied_demands).  per_pair switches the layered
    LP sinks to min(D0, bound) and makes hub routes honor each bound.
    """
    if not len(demands):
        raise ValueError("algorithm4 needs a nonempty demand set")
    validate_demands(g, demands)
    d0 = max(1, math.ceil(g.n ** 0.2))
    f0: set[int] | None = None
    ratio0 = math.inf
    lp = build_layered_lp(g, demands, d0, per_pair=per_pair)
    sol = solve(lp.model, lp_method)
    if sol.status == "optimal":
        quarter = [i for i in range(len(demands))
                   if lp.flow_value(sol, i) >= 0.25 - 1e-9]
        if quarter:
            f0 = _settle_quarter(g, lp, sol, quarter, d0, per_pair, seed)
            ratio0 = len(f0) / len(quarter)

    best_jt = None
    for u in range(g.n):
        try:
            res = junction_tree_density(g, demands, u, epsilon,
                                        split_seed(seed, "alg4", u),
                                        config=config, lp_method=lp_method)
        except (InfeasibleInstanceError, RoundingError):
            continue
        if best_jt is None or res.density < best_jt.density - 1e-12:
            best_jt = res

    if f0 is None and best_jt is None:
        raise InfeasibleInstanceError("both settlement branches came up empty")
    if f0 is not None and (best_jt is None or ratio0 <= best_jt.density):
        reports = verify_solution(g, f0, demands)
        satisfied = tuple(d for d, rep in zip(demands, reports) if rep.satisfied)
        if satisfied:
            return tuple(sorted(f0)), satisfied
    if best_jt is None:
        raise InfeasibleInstanceError("no junction tree and LP settlement satisfied nothing")
    return best_jt.edge_ids, best_jt.satisfied


def _cover_loop(g: Graph, demands: DemandSet, epsilon: float, seed: int,
                per_pair: bool, config, lp_method: str) -> tuple[int, ...]:
    remaining = list(demands)
    chosen: set[int] = set()
    iteration = 0
    while remaining:
        edge_ids, satisfied = algorithm4(
            g, DemandSet(remaining), epsilon, split_seed(seed, "cover", iteration),
            per_pair, config=config, lp_method=lp_method)
        chosen.update(edge_ids)
        reports = verify_solution(g, chosen, DemandSet(remaining))
        still = [d for d, rep in zip(remaining, reports) if not rep.satisfied]
        if len(still) == len(remaining):
            raise InfeasibleInstanceError("cover loop made no progress")
        remaining = still
        iteration += 1
    return tuple(sorted(chosen))


def _doubling_driver(g: Graph, demands: DemandSet, epsilon: float, seed: int,
                     big_guess_algorithm, per_pair: bool, config,
                     lp_method: str) -> tuple[int, ...]:
    threshold = g.n ** 0.8
    candidates: list[tuple[int, ...]] = [tuple(range(g.m))]
    guess = 1
    ran_small = False
    while True:
        if guess >= threshold:
            try:
                candidates.append(big_guess_algorithm(guess, split_seed(seed, "g", guess)))
            except RoundingError as exc:
                log.warning("large-guess algorithm failed at %d: %s", guess, exc)
        else:
            ran_small = True
        if guess >= max(g.m, 1):
            break
        guess *= 2
    if ran_small:
        candidates.append(_cover_loop(g, demands, epsilon, seed, per_pair,
                                      config, lp_method))
    feasible = [c for c in candidates
                if all_satisfied(verify_solution(g, c, demands))]
    return min(feasible, key=lambda c: (len(c), c))


def dsf_approx(g: Graph, demands: DemandSet, epsilon: float = 0.5, seed: int = 0,
               config: JunctionConfig | None = None,
               lp_method: str = "auto") -> tuple[int, ...]:
    """Uniform-cost directed Steiner forest: connect every demand pair."""
    if not len(demands):
        return ()
    reach = DemandSet([Demand(d.s, d.t, INF) for d in demands])
    validate_demands(g, reach)
    return _doubling_driver(
        g, reach, epsilon, seed,
        lambda guess, s: algorithm1_flow_variant(g, reach, guess, s, lp_method),
        per_pair=False, config=config, lp_method=lp_method)


def pairwise_spanner_approx(g: Graph, demands: DemandSet, epsilon: float = 0.5,
                            seed: int = 0, config: JunctionConfig | None = None,
                            lp_method: str = "auto") -> tuple[int, ...]:
    """Pairwise spanner with an individual distance bound per pair.

    Bounds below the graph distance are rejected up front.  Large
    guesses settle pairs exactly (exact routes honor any bound), so only
    the small-guess machinery needs the per-pair layered LP and
    bound-aware junction trees.
    """
    if not len(demands):
        return ()
    validate_demands(g, demands)
    return _doubling_driver(
        g, demands, epsilon, seed,
        lambda guess, s: preserver_algorithm1(
            g, DemandSet([Demand(d.s, d.t) for d in demands]), guess, s),
        per_pair=True, config=config, lp_method=lp_method)
