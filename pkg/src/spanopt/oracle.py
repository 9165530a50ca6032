"""Brute-force exact solvers, used as ground truth at desk scale.

Subset searches ascend by cardinality, so the first hit is optimal and
witnesses are deterministic (combinations enumerate lexicographically).
Hard edge-count budgets guard against accidental exponential blowups;
exceeding one raises BudgetError instead of grinding.
"""

from __future__ import annotations

import math
import os
from itertools import combinations
from typing import Iterable, Sequence

from .errors import BudgetError
from .graph import (INF, Demand, DemandSet, Graph, effective_bound,
                    local_graph, validate_demands)
from .hardness import SpannerInstance

DEFAULT_EDGE_BUDGET = 22
DEFAULT_DENSITY_BUDGET = 18

ENV_BUDGET = "SPANOPT_ORACLE_BUDGET"


def _edge_budget(default: int) -> int:
    raw = os.environ.get(ENV_BUDGET)
    if raw:
        return int(raw)
    return default


def _subsets_satisfying(g: Graph, demands: Sequence[Demand], check) -> tuple[int, tuple[int, ...]]:
    """Smallest edge subset passing `check`, by increasing cardinality.

    Prunes candidates missing a required terminal-incident edge: every
    source needs an out-edge and every sink an in-edge.
    """
    m = g.m
    need_masks = []
    for s in sorted({d.s for d in demands}):
        mask = 0
        for e, (u, _) in enumerate(g.edges):
            if u == s:
                mask |= 1 << e
        need_masks.append(mask)
    for t in sorted({d.t for d in demands}):
        mask = 0
        for e, (_, v) in enumerate(g.edges):
            if v == t:
                mask |= 1 << e
        need_masks.append(mask)
    lb = max(int(g.dist(d.s, d.t)) for d in demands)
    for k in range(max(lb, 1), m + 1):
        for combo in combinations(range(m), k):
            cmask = 0
            for e in combo:
                cmask |= 1 << e
            if any(cmask & need == 0 for need in need_masks):
                continue
            if check(combo):
                return k, combo
    raise AssertionError("full edge set fails its own demands")  # pragma: no cover


def _combo_adj(g: Graph, combo: Iterable[int]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for e in combo:
        u, v = g.edges[e]
        adj[u].append(v)
    return adj


def _dist_in(adj: list[list[int]], n: int, s: int) -> list[float]:
    dist = [INF] * n
    dist[s] = 0
    frontier = [s]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if dist[v] == INF:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def exact_min_solution(g: Graph, demands: DemandSet,
                       budget: int | None = None) -> tuple[int, tuple[int, ...]]:
    """Minimum-cardinality edge subset satisfying every demand (exact
    distance, finite bound, or reachability per each pair's bound)."""
    if budget is None:
        budget = _edge_budget(DEFAULT_EDGE_BUDGET)
    if g.m > budget:
        raise BudgetError(f"{g.m} edges exceed the subset-search budget {budget}")
    validate_demands(g, demands)
    if not len(demands):
        return 0, ()
    targets = [(d.s, d.t, effective_bound(g, d)) for d in demands]

    def check(combo) -> bool:
        adj = _combo_adj(g, combo)
        rows: dict[int, list[float]] = {}
        for s, t, bound in targets:
            if s not in rows:
                rows[s] = _dist_in(adj, g.n, s)
            if rows[s][t] > bound:
                return False
        return True

    return _subsets_satisfying(g, list(demands), check)


def exact_min_density_junction_tree(g: Graph, demands: DemandSet, r: int,
                                    budget: int | None = None):
    """Exact minimum of |F| / #(pairs routed s->r->t within bound) over
    nonempty edge subsets; ties prefer fewer edges.

    Evaluated as min over demand subsets S of OPT(S)/|S|, which agrees
    with the subset formulation because the satisfied set of any F is
    such an S.  Returns (density, edges, satisfied) or None when no pair
    can route through r at all.
    """
    if budget is None:
        budget = _edge_budget(DEFAULT_DENSITY_BUDGET)
    if g.m > budget:
        raise BudgetError(f"{g.m} edges exceed the density-search budget {budget}")
    validate_demands(g, demands)
    routable = [d for d in demands
                if g.dist(d.s, r) + g.dist(r, d.t) <= effective_bound(g, d)]
    if not routable:
        return None
    best = None
    for size in range(1, len(routable) + 1):
        for subset in combinations(routable, size):
            targets = [(d.s, d.t, effective_bound(g, d)) for d in subset]

            def check(combo) -> bool:
                adj = _combo_adj(g, combo)
                radj: list[list[int]] = [[] for _ in range(g.n)]
                for e in combo:
                    u, v = g.edges[e]
                    radj[v].append(u)
                to_r = _dist_in(radj, g.n, r)
                from_r = _dist_in(adj, g.n, r)
                return all(to_r[s] + from_r[t] <= bound for s, t, bound in targets)

            opt, combo = _subsets_satisfying(g, list(subset), check)
            density = opt / size
            key = (density, opt)
            if best is None or key < (best[0], best[1]):
                best = (density, opt, combo, subset)
    return best[0], best[2], best[3]


def enumerate_shortest_paths(g: Graph, s: int, t: int) -> list[tuple[int, ...]]:
    """All shortest s->t paths in lexicographic order (empty when
    unreachable)."""
    if g.dist(s, t) == INF:
        return []
    dt = g.dist_to(t)
    out: list[tuple[int, ...]] = []
    stack = [(s, (s,))]
    while stack:
        u, path = stack.pop()
        if u == t:
            out.append(path)
            continue
        for v in sorted(g.out_adj[u], reverse=True):
            if dt[v] == dt[u] - 1:
                stack.append((v, path + (v,)))
    return out


def count_walks(g: Graph, s: int, t: int, length: int) -> int:
    """Number of s->t walks with exactly `length` edges (pure DP,
    independent of any layered-graph machinery)."""
    cur = [0] * g.n
    cur[s] = 1
    for _ in range(length):
        nxt = [0] * g.n
        for u in range(g.n):
            if cur[u]:
                for v in g.out_adj[u]:
                    nxt[v] += cur[u]
        cur = nxt
    return cur[t]


def exact_min_repcover(inst) -> tuple[int, frozenset]:
    """Smallest REP-cover by subset enumeration over the inner vertices."""
    from .hardness import rep_cover_verify

    universe = range(inst.n_inner)
    for k in range(0, inst.n_inner + 1):
        for combo in combinations(universe, k):
            if rep_cover_verify(inst, combo):
                return k, frozenset(combo)
    raise AssertionError("the full vertex set always covers")  # pragma: no cover


def _mask_bfs_rows(n: int, adj_mask: list[int]) -> list[list[float]]:
    rows = []
    for s in range(n):
        dist = [math.inf] * n
        dist[s] = 0
        frontier = 1 << s
        seen = frontier
        d = 0
        while frontier:
            nxt = 0
            f = frontier
            while f:
                v = (f & -f).bit_length() - 1
                f &= f - 1
                nxt |= adj_mask[v]
            nxt &= ~seen
            d += 1
            f = nxt
            while f:
                v = (f & -f).bit_length() - 1
                f &= f - 1
                dist[v] = d
            seen |= nxt
            frontier = nxt
        rows.append(dist)
    return rows


def minimum_additive_spanners(g: SpannerInstance, k: int,
                              check_budget: int = 2_000_000):
    """All minimum +k-spanners of a (small) spanner instance.

    Works on removable edge sets, which are downward closed: level r+1
    candidates extend feasible level-r sets by larger removable edges,
    so the search is an apriori-style lattice walk.  Returns
    (opt_size, [edge sets]).  Raises BudgetError when the number of
    feasibility checks would exceed check_budget.
    """
    base_adj = [0] * g.n
    for a, b in g.edges:
        base_adj[a] |= 1 << b
        base_adj[b] |= 1 << a
    d_g = _mask_bfs_rows(g.n, base_adj)
    checks = 0

    def feasible(removed: tuple[int, ...]) -> bool:
        nonlocal checks
        checks += 1
        if checks > check_budget:
            raise BudgetError(f"spanner enumeration exceeded {check_budget} checks")
        adj = list(base_adj)
        for idx in removed:
            a, b = g.edges[idx]
            adj[a] &= ~(1 << b)
            adj[b] &= ~(1 << a)
        d_h = _mask_bfs_rows(g.n, adj)
        for u in range(g.n):
            row_g, row_h = d_g[u], d_h[u]
            for v in range(u + 1, g.n):
                if row_h[v] > row_g[v] + k:
                    return False
        return True

    singles = [i for i in range(g.m) if feasible((i,))]
    if not singles:
        return g.m, [frozenset(g.edges)]
    level: list[tuple[int, ...]] = [(i,) for i in singles]
    best_level = level
    while True:
        nxt = []
        for removed in level:
            for extra in singles:
                if extra <= removed[-1]:
                    continue
                cand = removed + (extra,)
                if feasible(cand):
                    nxt.append(cand)
        if not nxt:
            break
        level = nxt
        best_level = level
    opt = g.m - len(best_level[0])
    all_edges = list(g.edges)
    spanners = []
    seen = set()
    for removed in best_level:
        kept = frozenset(e for i, e in enumerate(all_edges) if i not in set(removed))
        if kept not in seen:
            seen.add(kept)
            spanners.append(kept)
    return opt, spanners
