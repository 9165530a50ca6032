"""Junction trees for distance-bounded demands.

To find a low-density set of edges routing demand pairs through a root
r, the graph is unrolled into a layered digraph whose negative layers
count hops into r and positive layers count hops out of r; terminal
copies (one per admissible hop count) turn the distance-bounded routing
problem into pure label-constrained connectivity.  A height-reduced
tree over that layered graph carries a label-cover LP whose rounded
solution projects back to original edges.

Label conventions: a source copy for pair (s, t) with label i stands for
"reach r from s in exactly i hops"; a sink copy with label j stands for
"reach t from r in exactly j hops"; a pair of copies is related when
i + j <= D(s, t).
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InfeasibleInstanceError, RoundingError
from .graph import (INF, Demand, DemandSet, Graph, effective_bound,
                    subgraph_out_adj, _bfs)
from .lp import LpModel, LpSolution, solve
from .rounding import (ShallowTree, gkr_round, height_reduce, project_tree,
                       split_seed)

log = logging.getLogger(__name__)


class LayeredJunctionGraph:
    """The layered unrolling G_r with terminal copies, stored in the
    root-outward orientation (negative-side arcs reversed) so that every
    junction tree becomes an out-arborescence of a DAG.

    Vertex keys: ("L", v, i) for graph vertex v at layer i (the root is
    ("L", r, 0)); ("S", p, i) for pair p's source copy at hop count i;
    ("T", p, j) for its sink copy.  Arcs carry weight 1 (layer arcs,
    back-mapped to a graph edge) or 0 (terminal attachments).
    """

    def __init__(self, g: Graph, r: int, demands: DemandSet):
        self.g = g
        self.r = r
        self.demands = demands
        n = g.n
        self.vid: dict[tuple, int] = {}
        self.verts: list[tuple] = []

        def intern(key: tuple) -> int:
            if key not in self.vid:
                self.vid[key] = len(self.verts)
                self.verts.append(key)
            return self.vid[key]

        self.root = intern(("L", r, 0))
        for layer in [i for i in range(-(n - 1), 0)] + [i for i in range(1, n)]:
            for v in range(n):
                if v != r:
                    intern(("L", v, layer))
        for p, d in enumerate(demands):
            if d.s == r:
                intern(("S", p, 0))
            else:
                for i in range(1, n):
                    intern(("S", p, i))
            if d.t == r:
                intern(("T", p, 0))
            else:
                for j in range(1, n):
                    intern(("T", p, j))

        # arcs in root-outward orientation: (tail, head, weight, g_edge or None)
        self.arcs: list[tuple[int, int, int, int | None]] = []
        self.arc_at: dict[tuple[int, int], int] = {}
        self.out: dict[int, list[int]] = {}
        self.inb: dict[int, list[int]] = {}

        def add_arc(tail: int, head: int, w: int, eid: int | None):
            aid = len(self.arcs)
            self.arcs.append((tail, head, w, eid))
            self.arc_at[(tail, head)] = aid
            self.out.setdefault(tail, []).append(aid)
            self.inb.setdefault(head, []).append(aid)

        for eid, (u, v) in enumerate(g.edges):
            # negative side (paths into r), reversed: (v,-i+1) -> (u,-i)
            for i in range(1, n):
                if u == r:
                    continue
                head = ("L", u, -i)
                tail = ("L", r, 0) if i == 1 and v == r else ("L", v, -i + 1)
                if i == 1 and v != r:
                    continue
                if i > 1 and (v == r or tail not in self.vid):
                    continue
                add_arc(self.vid[tail], self.vid[head], 1, eid)
            # positive side: (u,j) -> (v,j+1)
            for j in range(0, n - 1):
                if v == r:
                    continue
                tail = ("L", r, 0) if j == 0 and u == r else ("L", u, j)
                if j == 0 and u != r:
                    continue
                if j > 0 and (u == r or tail not in self.vid):
                    continue
                add_arc(self.vid[tail], self.vid[("L", v, j + 1)], 1, eid)
        for p, d in enumerate(demands):
            if d.s == r:
                add_arc(self.root, self.vid[("S", p, 0)], 0, None)
            else:
                for i in range(1, n):
                    add_arc(self.vid[("L", d.s, -i)], self.vid[("S", p, i)], 0, None)
            if d.t == r:
                add_arc(self.root, self.vid[("T", p, 0)], 0, None)
            else:
                for j in range(1, n):
                    add_arc(self.vid[("L", d.t, j)], self.vid[("T", p, j)], 0, None)

    def layer_vertex_count(self) -> int:
        return sum(1 for k in self.verts if k[0] == "L")

    def relation(self, p: int) -> list[tuple[int, int]]:
        """All related label pairs (i, j) for pair p, on the full graph."""
        d = self.demands[p]
        bound = effective_bound(self.g, d)
        s_labels = [0] if d.s == self.r else list(range(1, self.g.n))
        t_labels = [0] if d.t == self.r else list(range(1, self.g.n))
        return [(i, j) for i in s_labels for j in t_labels if i + j <= bound]

    def count_paths_from_root(self, target: int) -> int:
        """Number of distinct root -> target paths (the graph is a DAG,
        so this is a straight DP); equals the count under the original
        orientation."""
        memo: dict[int, int] = {self.root: 1}
        # iterative evaluation to dodge recursion limits
        stack = [target]
        while stack:
            v = stack[-1]
            if v in memo:
                stack.pop()
                continue
            pending = [self.arcs[aid][0] for aid in self.inb.get(v, ())
                       if self.arcs[aid][0] not in memo]
            if pending:
                stack.extend(pending)
            else:
                memo[v] = sum(memo[self.arcs[aid][0]] for aid in self.inb.get(v, ()))
                stack.pop()
        return memo[target]

    def source_copy(self, p: int, i: int) -> int | None:
        return self.vid.get(("S", p, i))

    def sink_copy(self, p: int, j: int) -> int | None:
        return self.vid.get(("T", p, j))


class RestrictedLayeredGraph:
    """The useful core of a LayeredJunctionGraph: vertices lying on some
    root -> admissible-terminal-copy path, with arcs re-indexed.

    Keeps, per pair, the surviving source/sink labels and the related
    label pairs.  Path counts to surviving copies are unchanged because
    only vertices off every such path are dropped.
    """

    def __init__(self, full: LayeredJunctionGraph):
        self.g = full.g
        self.r = full.r
        self.demands = full.demands
        reach = _arc_reach(full, full.root, forward=True)
        # labels whose copies are reachable at all
        raw_s: dict[int, list[int]] = {}
        raw_t: dict[int, list[int]] = {}
        for p, d in enumerate(full.demands):
            s_labels = [0] if d.s == full.r else range(1, full.g.n)
            t_labels = [0] if d.t == full.r else range(1, full.g.n)
            raw_s[p] = [i for i in s_labels if full.vid[("S", p, i)] in reach]
            raw_t[p] = [j for j in t_labels if full.vid[("T", p, j)] in reach]
        self.s_labels: dict[int, list[int]] = {}
        self.t_labels: dict[int, list[int]] = {}
        self.relation: dict[int, list[tuple[int, int]]] = {}
        useful_copies: list[int] = []
        for p, d in enumerate(full.demands):
            bound = effective_bound(full.g, d)
            rel = [(i, j) for i in raw_s[p] for j in raw_t[p] if i + j <= bound]
            self.relation[p] = rel
            self.s_labels[p] = sorted({i for i, _ in rel})
            self.t_labels[p] = sorted({j for _, j in rel})
            useful_copies.extend(full.vid[("S", p, i)] for i in self.s_labels[p])
            useful_copies.extend(full.vid[("T", p, j)] for j in self.t_labels[p])
        co_reach = _arc_reach(full, useful_copies, forward=False)
        keep = sorted(reach & co_reach | {full.root})
        self.old_id = keep
        remap = {old: new for new, old in enumerate(keep)}
        self.n = len(keep)
        self.root = remap[full.root]
        self.verts = [full.verts[old] for old in keep]
        self.arcs: list[tuple[int, int, int, int | None]] = []
        self.arc_at: dict[tuple[int, int], int] = {}
        self.out: dict[int, list[int]] = {}
        self.inb: dict[int, list[int]] = {}
        for tail, head, w, eid in full.arcs:
            if tail in remap and head in remap:
                t2, h2 = remap[tail], remap[head]
                aid = len(self.arcs)
                self.arcs.append((t2, h2, w, eid))
                self.arc_at[(t2, h2)] = aid
                self.out.setdefault(t2, []).append(aid)
                self.inb.setdefault(h2, []).append(aid)
        self.copy_vid: dict[tuple[str, int, int], int] = {}
        for p in range(len(full.demands)):
            for i in self.s_labels[p]:
                self.copy_vid[("S", p, i)] = remap[full.vid[("S", p, i)]]
            for j in self.t_labels[p]:
                self.copy_vid[("T", p, j)] = remap[full.vid[("T", p, j)]]

    def routable_pairs(self) -> list[int]:
        return [p for p, rel in self.relation.items() if rel]


def _arc_reach(ljg, starts, forward: bool) -> set[int]:
    if isinstance(starts, int):
        starts = [starts]
    seen = set(starts)
    queue = deque(starts)
    adj = ljg.out if forward else ljg.inb
    pick = (lambda arc: arc[1]) if forward else (lambda arc: arc[0])
    while queue:
        v = queue.popleft()
        for aid in adj.get(v, ()):
            w = pick(ljg.arcs[aid])
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


class LayeredMetric:
    """Lazy metric completion of a RestrictedLayeredGraph under the 0/1
    arc weights, with lexicographic witness paths."""

    def __init__(self, rg: RestrictedLayeredGraph):
        self.rg = rg
        self._from: dict[int, list[float]] = {}
        self._to: dict[int, list[float]] = {}

    def vertex_ids(self):
        return range(self.rg.n)

    def _row(self, cache, source, adj, pick):
        row = cache.get(source)
        if row is None:
            row = [math.inf] * self.rg.n
            row[source] = 0
            dq = deque([source])
            while dq:
                v = dq.popleft()
                for aid in adj.get(v, ()):
                    arc = self.rg.arcs[aid]
                    w = pick(arc)
                    nd = row[v] + arc[2]
                    if nd < row[w]:
                        row[w] = nd
                        if arc[2] == 0:
                            dq.appendleft(w)
                        else:
                            dq.append(w)
            cache[source] = row
        return row

    def row_from(self, u: int):
        return self._row(self._from, u, self.rg.out, lambda a: a[1])

    def row_to(self, v: int):
        return self._row(self._to, v, self.rg.inb, lambda a: a[0])

    def weight(self, u: int, v: int) -> float:
        return self.row_from(u)[v]

    def path(self, u: int, v: int):
        if self.weight(u, v) == math.inf:
            return None
        to_v = self.row_to(v)
        seq = [u]
        cur = u
        while cur != v:
            best = None
            for aid in self.rg.out.get(cur, ()):  # lexicographic head tie-break
                _, head, w, _ = self.rg.arcs[aid]
                if to_v[head] == to_v[cur] - w:
                    if best is None or head < best:
                        best = head
            seq.append(best)
            cur = best
        return seq


@dataclass
class PairPrune:
    """Median-pruned representatives for one pair (exact arithmetic)."""

    gamma: Fraction
    s_reps: list[tuple[int, int]]  # (tree vertex, label), sorted by label
    t_reps: list[tuple[int, int]]
    mu_s: int
    mu_t: int

    @property
    def s_tilde(self) -> list[int]:
        return [v for v, _ in self.s_reps[: self.mu_s]]

    @property
    def t_tilde(self) -> list[int]:
        return [v for v, _ in self.t_reps[: self.mu_t]]


@dataclass
class PrunedReps:
    pairs: dict[int, PairPrune] = field(default_factory=dict)


class LabelCoverLp:
    """LP over a shallow tree: pick related representative pairs (y),
    connection masses per representative (z), and tree-edge capacities
    (x) supporting each z along its root path."""

    def __init__(self, tree: ShallowTree, reps_s: Mapping[int, list[tuple[int, int]]],
                 reps_t: Mapping[int, list[tuple[int, int]]],
                 bounds: Mapping[int, float]):
        self.tree = tree
        self.reps_s = reps_s
        self.reps_t = reps_t
        self.model = LpModel("label_cover")
        self.x_var = {v: self.model.add_var(f"x_{v}", obj=tree.wt[v])
                      for v in range(1, len(tree))}
        self.z_var: dict[int, int] = {}
        self.y_var: dict[tuple[int, int, int], int] = {}
        for p in sorted(reps_s):
            for v, _ in reps_s[p] + reps_t[p]:
                if v not in self.z_var:
                    self.z_var[v] = self.model.add_var(f"z_{v}")
        norm = []
        row_s: dict[tuple[int, int], list[tuple[int, float]]] = {}
        row_t: dict[tuple[int, int], list[tuple[int, float]]] = {}
        for p in sorted(reps_s):
            bound = bounds[p]
            for sv, si in reps_s[p]:
                for tv, tj in reps_t[p]:
                    if si + tj <= bound:
                        idx = self.model.add_var(f"y_{p}_{sv}_{tv}")
                        self.y_var[(p, sv, tv)] = idx
                        norm.append((idx, 1.0))
                        row_s.setdefault((p, sv), []).append((idx, 1.0))
                        row_t.setdefault((p, tv), []).append((idx, 1.0))
        self.model.add_constraint(norm, "==", 1.0)
        for p in sorted(reps_s):
            for sv, _ in reps_s[p]:
                row = row_s.get((p, sv))
                if row:
                    self.model.add_constraint(row + [(self.z_var[sv], -1.0)], "<=", 0.0)
            for tv, _ in reps_t[p]:
                row = row_t.get((p, tv))
                if row:
                    self.model.add_constraint(row + [(self.z_var[tv], -1.0)], "<=", 0.0)
        for v, zidx in sorted(self.z_var.items()):
            for anc in self.tree.root_path(v):
                if anc != 0:
                    self.model.add_constraint(
                        [(zidx, 1.0), (self.x_var[anc], -1.0)], "<=", 0.0)

    def x_values(self, sol: LpSolution) -> dict[int, float]:
        return {v: sol.value_of(idx) for v, idx in self.x_var.items()}

    def y_values(self, sol: LpSolution) -> dict[tuple[int, int, int], float]:
        return {key: sol.value_of(idx) for key, idx in self.y_var.items()}


def solve_label_cover_lp(tree: ShallowTree, reps_s, reps_t, bounds,
                         method: str = "auto"):
    lp = LabelCoverLp(tree, reps_s, reps_t, bounds)
    sol = solve(lp.model, method)
    if sol.status != "optimal":
        raise InfeasibleInstanceError(
            f"label cover LP is {sol.status}; some pair has an empty relation")
    return lp, sol


def median_prune(y: Mapping[tuple[int, int, int], float],
                 reps_s: Mapping[int, list[tuple[int, int]]],
                 reps_t: Mapping[int, list[tuple[int, int]]]) -> PrunedReps:
    """Keep each terminal's representatives up to the weighted median.

    All mass arithmetic is exact (floats convert to Fractions), so the
    gamma/2 threshold comparisons cannot suffer ties from rounding.
    Pairs with zero mass are excluded.
    """
    out = PrunedReps()
    yfrac = {k: Fraction(max(0.0, v)) for k, v in y.items()}
    for p in sorted(reps_s):
        srow = {sv: Fraction(0) for sv, _ in reps_s[p]}
        trow = {tv: Fraction(0) for tv, _ in reps_t[p]}
        gamma = Fraction(0)
        for (pp, sv, tv), val in yfrac.items():
            if pp != p:
                continue
            gamma += val
            srow[sv] += val
            trow[tv] += val
        if gamma == 0:
            continue
        half = gamma / 2

        def median_index(reps, row) -> int:
            acc = Fraction(0)
            for k, (v, _) in enumerate(reps, start=1):
                acc += row[v]
                if acc >= half:
                    return k
            return len(reps)  # pragma: no cover - total mass is gamma >= half

        mu_s = median_index(reps_s[p], srow)
        mu_t = median_index(reps_t[p], trow)
        out.pairs[p] = PairPrune(gamma, list(reps_s[p]), list(reps_t[p]), mu_s, mu_t)
    return out


def bucket_and_scale(pruned: PrunedReps, x: Mapping[int, float]):
    """Bucket pairs by gamma into dyadic ranges, take the heaviest
    bucket (ties to the smaller index), and rescale capacities by
    2^(i*+2), capped at one."""
    if not pruned.pairs:
        raise ValueError("no pairs with positive mass")
    n_pairs = len(pruned.pairs)
    max_i = max(0, math.ceil(math.log2(n_pairs))) if n_pairs > 1 else 0
    mass: dict[int, Fraction] = {}
    members: dict[int, list[int]] = {}
    for p, pr in sorted(pruned.pairs.items()):
        for i in range(max_i + 1):
            lo = Fraction(1, 2 ** (i + 1))
            hi = Fraction(1, 2 ** i)
            if lo < pr.gamma <= hi:
                mass[i] = mass.get(i, Fraction(0)) + pr.gamma
                members.setdefault(i, []).append(p)
                break
    if not mass:
        # every pair fell below the last bucket; take the heaviest pair alone
        p_best = max(sorted(pruned.pairs), key=lambda p: pruned.pairs[p].gamma)
        i_star = max_i
        members[i_star] = [p_best]
    else:
        i_star = max(mass, key=lambda i: (mass[i], -i))
    scale = 2 ** (i_star + 2)
    x_star = {v: min(1.0, scale * val) for v, val in x.items()}
    return i_star, members[i_star], x_star


@dataclass
class JunctionResult:
    root: int
    edge_ids: tuple[int, ...]
    satisfied: tuple[Demand, ...]
    density: float
    sigma: int
    trace: list[str]

    @property
    def ratio(self) -> float:
        return self.density


@dataclass
class JunctionConfig:
    tree_budget: int = 4000
    y_budget: int = 20000
    gkr_retries: int = 8

    def copy(self):
        return JunctionConfig(self.tree_budget, self.y_budget, self.gkr_retries)


def _route_check(g: Graph, edge_ids: Iterable[int], r: int,
                 demands: DemandSet) -> list[Demand]:
    """Demands with an s -> r -> t route within their bound in the subgraph."""
    adj = subgraph_out_adj(g, edge_ids)
    radj: list[list[int]] = [[] for _ in range(g.n)]
    for u in range(g.n):
        for v in adj[u]:
            radj[v].append(u)
    from_r = _bfs(g.n, adj, r)
    to_r = _bfs(g.n, radj, r)
    out = []
    for d in demands:
        if to_r[d.s] + from_r[d.t] <= effective_bound(g, d):
            out.append(d)
    return out


def junction_tree_density(g: Graph, demands: DemandSet, r: int,
                          epsilon: float = 0.5, seed: int = 0,
                          config: JunctionConfig | None = None,
                          trace: list[str] | None = None,
                          lp_method: str = "auto") -> JunctionResult:
    """Approximately minimum-density junction tree rooted at r.

    Pipeline: layered unrolling -> restriction to useful vertices ->
    height reduction -> label-cover LP -> median pruning -> dyadic
    bucketing and capacity scaling -> group-Steiner rounding -> projection
    back to original edges.  Every reported satisfied pair is re-verified
    by BFS through r, never assumed.
    """
    cfg = config or JunctionConfig()
    tr = trace if trace is not None else []

    def emit(line: str):
        tr.append(line)
        log.debug("%s", line)

    full = LayeredJunctionGraph(g, r, demands)
    rg = RestrictedLayeredGraph(full)
    routable = rg.routable_pairs()
    emit(f"root {r} layered_vertices {len(full.verts)} restricted {rg.n} "
              f"routable_pairs {len(routable)}")
    if not routable:
        raise InfeasibleInstanceError(f"no pair routable through root {r}")
    metric = LayeredMetric(rg)

    sigma_target = max(1, min(3, math.ceil(1.0 / epsilon)))
    sigma = 1
    for cand in range(sigma_target, 0, -1):
        est = sum(rg.n ** d for d in range(1, cand + 1))
        mult = rg.n ** (cand - 1)
        est_y = sum(len(rg.s_labels[p]) * len(rg.t_labels[p]) for p in routable) * mult * mult
        if est <= cfg.tree_budget and est_y <= cfg.y_budget:
            sigma = cand
            break
    tree = height_reduce(metric, rg.root, sigma, node_budget=cfg.tree_budget + 1)

    copy_set = {vid: key for key, vid in rg.copy_vid.items()}
    terminal_tree_verts = [v for v in range(1, len(tree))
                           if tree.endpoint[v] in copy_set]
    tree, _ = tree.prune_to(terminal_tree_verts)
    emit(f"sigma {sigma} tree_vertices {len(tree)}")

    reps_s: dict[int, list[tuple[int, int]]] = {p: [] for p in routable}
    reps_t: dict[int, list[tuple[int, int]]] = {p: [] for p in routable}
    for v in range(1, len(tree)):
        key = copy_set.get(tree.endpoint[v])
        if key is None:
            continue
        kind, p, label = key
        if p not in reps_s:
            continue
        (reps_s if kind == "S" else reps_t)[p].append((v, label))
    for p in routable:
        reps_s[p].sort(key=lambda vl: (vl[1], vl[0]))
        reps_t[p].sort(key=lambda vl: (vl[1], vl[0]))
    bounds = {p: effective_bound(g, demands[p]) for p in routable}

    lp, sol = solve_label_cover_lp(tree, reps_s, reps_t, bounds, method=lp_method)
    emit(f"lp_vars {lp.model.n_vars} lp_objective {sol.objective:.6f}")
    pruned = median_prune(lp.y_values(sol), reps_s, reps_t)
    for p, pr in sorted(pruned.pairs.items()):
        emit(f"pair {p} gamma {pr.gamma} mu_s {pr.mu_s} mu_t {pr.mu_t}")
    i_star, bucket_pairs, x_star = bucket_and_scale(pruned, lp.x_values(sol))
    emit(f"bucket {i_star} pairs {bucket_pairs}")

    groups: list[list[int]] = []
    for p in bucket_pairs:
        groups.append(pruned.pairs[p].s_tilde)
        groups.append(pruned.pairs[p].t_tilde)

    last_err: Exception | None = None
    for attempt in range(cfg.gkr_retries):
        try:
            subtree = gkr_round(tree, x_star, groups, split_seed(seed, "jt", r, attempt))
        except RoundingError as exc:
            last_err = exc
            continue
        hop_edges = project_tree(tree, subtree)
        edge_ids = sorted({rg.arcs[rg.arc_at[(a, b)]][3]
                           for a, b in hop_edges
                           if rg.arcs[rg.arc_at[(a, b)]][3] is not None})
        satisfied = _route_check(g, edge_ids, r, demands)
        if satisfied and edge_ids:
            density = len(edge_ids) / len(satisfied)
            emit(f"passes_union {len(subtree)} edges {len(edge_ids)} "
                      f"satisfied {len(satisfied)} density {density:.4f}")
            return JunctionResult(r, tuple(edge_ids), tuple(satisfied),
                                  density, sigma, tr)
        if satisfied and not edge_ids:
            # degenerate: a pair with s == r == ... cannot happen (s != t and
            # both endpoints equal r is impossible), so an empty projection
            # means the rounding picked only zero-weight attachments
            last_err = RoundingError("rounded tree projected to no edges")
            continue
        last_err = RoundingError("rounded tree satisfied no pair")
    raise RoundingError(f"junction rounding failed at root {r}: {last_err}")
