"""Directed unweighted graphs, demand pairs, and shortest-path machinery.

Vertices are dense integers 0..n-1.  Edge ids are positions in the
canonically sorted edge list, so edge-set operations are order-independent
and reproducible.  All types are immutable after construction; operations
are pure functions.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InfeasibleInstanceError, ParseError, UnreachablePairError

INF = math.inf

#: sentinel bound for exact (preserver) demands
EXACT = "exact"


class Graph:
    """Directed unweighted graph with canonical edge ids.

    Rejects self-loops, duplicate edges, and out-of-range endpoints.
    BFS distance rows are cached per source; safe because instances are
    immutable.
    """

    __slots__ = ("n", "edges", "edge_id", "out_adj", "in_adj",
                 "_dist_from", "_dist_to")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        edge_list = sorted(set((int(u), int(v)) for u, v in edges))
        for u, v in edge_list:
            if u == v:
                raise ValueError(f"self-loop ({u},{v}) not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) endpoint out of range 0..{n - 1}")
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(edge_list)
        self.edge_id = {e: i for i, e in enumerate(self.edges)}
        out_adj: list[list[int]] = [[] for _ in range(n)]
        in_adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            out_adj[u].append(v)
            in_adj[v].append(u)
        self.out_adj = tuple(tuple(a) for a in out_adj)
        self.in_adj = tuple(tuple(a) for a in in_adj)
        self._dist_from: dict[int, tuple[float, ...]] = {}
        self._dist_to: dict[int, tuple[float, ...]] = {}

    @property
    def m(self) -> int:
        return len(self.edges)

    def dist_from(self, u: int) -> tuple[float, ...]:
        """Cached BFS hop counts u -> v for all v (INF when unreachable)."""
        row = self._dist_from.get(u)
        if row is None:
            row = _bfs(self.n, self.out_adj, u)
            self._dist_from[u] = row
        return row

    def dist_to(self, u: int) -> tuple[float, ...]:
        """Cached BFS hop counts v -> u for all v."""
        row = self._dist_to.get(u)
        if row is None:
            row = _bfs(self.n, self.in_adj, u)
            self._dist_to[u] = row
        return row

    def dist(self, u: int, v: int) -> float:
        return self.dist_from(u)[v]

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def _bfs(n: int, adj: Sequence[Sequence[int]], source: int) -> tuple[float, ...]:
    if not (0 <= source < n):
        raise ValueError(f"source {source} out of range 0..{n - 1}")
    dist = [INF] * n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in adj[u]:
            if dist[v] == INF:
                dist[v] = du
                queue.append(v)
    return tuple(dist)


def bfs_distances(g: Graph, source: int, direction: str = "forward") -> list[float]:
    """Hop counts from/to `source`; entry v is INF when unreachable.

    direction 'forward' gives d(source, v), 'backward' gives d(v, source).
    """
    if direction == "forward":
        return list(g.dist_from(source))
    if direction == "backward":
        return list(g.dist_to(source))
    raise ValueError(f"unknown direction {direction!r}")


@dataclass(frozen=True)
class Demand:
    """A demand pair with its distance bound.

    bound is EXACT for preserver pairs (materializes to d_G(s,t)),
    INF for pure-connectivity pairs, or a positive integer.
    """

    s: int
    t: int
    bound: object = EXACT

    def __post_init__(self):
        if self.s == self.t:
            raise ValueError(f"demand pair ({self.s},{self.t}) has s == t")
        if isinstance(self.bound, float) and math.isinf(self.bound):
            object.__setattr__(self, "bound", INF)
        elif self.bound is not EXACT:
            if not isinstance(self.bound, int) or self.bound < 1:
                raise ValueError(f"bound must be EXACT, INF, or a positive int, got {self.bound!r}")

    @property
    def exact(self) -> bool:
        return self.bound is EXACT


class DemandSet:
    """An ordered, duplicate-free collection of demand pairs."""

    __slots__ = ("demands",)

    def __init__(self, demands: Iterable[Demand]):
        seen = set()
        out = []
        for d in demands:
            if (d.s, d.t) in seen:
                raise ValueError(f"duplicate demand pair ({d.s},{d.t})")
            seen.add((d.s, d.t))
            out.append(d)
        self.demands: tuple[Demand, ...] = tuple(out)

    def __iter__(self):
        return iter(self.demands)

    def __len__(self):
        return len(self.demands)

    def __getitem__(self, i):
        return self.demands[i]

    def sources(self) -> list[int]:
        return sorted({d.s for d in self.demands})

    def sinks(self) -> list[int]:
        return sorted({d.t for d in self.demands})

    def __repr__(self):
        return f"DemandSet({len(self.demands)} pairs)"


def effective_bound(g: Graph, d: Demand) -> float:
    """The bound a solution must meet: d_G(s,t) for exact pairs."""
    if d.exact:
        return g.dist(d.s, d.t)
    return d.bound


def validate_demands(g: Graph, demands: DemandSet) -> None:
    """Reject demand sets that no subgraph can satisfy.

    Raises UnreachablePairError for disconnected pairs and
    InfeasibleInstanceError when a finite bound is below d_G(s,t).
    """
    for d in demands:
        dist = g.dist(d.s, d.t)
        if dist == INF:
            raise UnreachablePairError(d.s, d.t)
        if not d.exact and d.bound is not INF and d.bound < dist:
            raise InfeasibleInstanceError(
                f"bound {d.bound} for pair ({d.s},{d.t}) is below distance {int(dist)}")


@dataclass(frozen=True)
class LocalGraph:
    """Union of all shortest s->t paths: edge ids plus touched vertices."""

    s: int
    t: int
    edge_ids: tuple[int, ...]
    vertices: tuple[int, ...]


def local_graph(g: Graph, s: int, t: int) -> LocalGraph:
    """Edges (u,v) with d(s,u) + 1 + d(v,t) = d(s,t), plus their endpoints.

    Every s->t path inside the result is a shortest path.  Raises
    UnreachablePairError when t is not reachable from s.
    """
    ds = g.dist_from(s)
    dt = g.dist_to(t)
    dst = ds[t]
    if dst == INF:
        raise UnreachablePairError(s, t)
    ids = []
    verts = {s, t}
    for eid, (u, v) in enumerate(g.edges):
        if ds[u] + 1 + dt[v] == dst:
            ids.append(eid)
            verts.add(u)
            verts.add(v)
    return LocalGraph(s, t, tuple(ids), tuple(sorted(verts)))


def classify_thickness(g: Graph, demands: DemandSet, k: float):
    """Split demands into (thick, thin): thick iff |V^{s,t}| >= k."""
    thick, thin = [], []
    for d in demands:
        lg = local_graph(g, d.s, d.t)
        (thick if len(lg.vertices) >= k else thin).append(d)
    return thick, thin


@dataclass(frozen=True)
class PairReport:
    s: int
    t: int
    required: float
    achieved: float
    satisfied: bool


def subgraph_out_adj(g: Graph, edge_ids: Iterable[int]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(g.n)]
    for eid in edge_ids:
        u, v = g.edges[eid]
        adj[u].append(v)
    return adj


def verify_solution(g: Graph, edge_ids: Iterable[int], demands: DemandSet) -> list[PairReport]:
    """Per-pair satisfaction report for an edge subset.

    A pair is satisfied iff its BFS distance in the subgraph is at most
    its effective bound (exact pairs: equals d_G, since a subgraph can
    never be shorter).
    """
    ids = set(edge_ids)
    for eid in ids:
        if not (0 <= eid < g.m):
            raise ValueError(f"edge id {eid} not in graph")
    adj = subgraph_out_adj(g, ids)
    dist_cache: dict[int, tuple[float, ...]] = {}
    reports = []
    for d in demands:
        if d.s not in dist_cache:
            dist_cache[d.s] = _bfs(g.n, adj, d.s)
        achieved = dist_cache[d.s][d.t]
        required = effective_bound(g, d)
        reports.append(PairReport(d.s, d.t, required, achieved, achieved <= required))
    return reports


def all_satisfied(reports: Iterable[PairReport]) -> bool:
    return all(r.satisfied for r in reports)


def distance_buckets(g: Graph, demands: DemandSet) -> dict[int, DemandSet]:
    """Partition demands by d_G(s,t) into power-of-two buckets [d*, 2d*)."""
    buckets: dict[int, list[Demand]] = {}
    for d in demands:
        dist = g.dist(d.s, d.t)
        if dist == INF:
            raise UnreachablePairError(d.s, d.t)
        dstar = 1 << (int(dist).bit_length() - 1)
        buckets.setdefault(dstar, []).append(d)
    return {k: DemandSet(v) for k, v in sorted(buckets.items())}


def nearby_terminals(g: Graph, u: int, dstar: int, bucket: DemandSet):
    """Bucket sources within d(s,u) < 2d* and sinks within d(u,t) < 2d*."""
    to_u = g.dist_to(u)
    from_u = g.dist_from(u)
    s_near = sorted({d.s for d in bucket if to_u[d.s] < 2 * dstar})
    t_near = sorted({d.t for d in bucket if from_u[d.t] < 2 * dstar})
    return s_near, t_near


class Metric:
    """Complete weighted digraph over g's vertices with path witnesses.

    weight(u,v) = d_G(u,v); path(u,v) is the lexicographically smallest
    shortest path as a vertex sequence, or None when unreachable.  The
    lexicographic tie-break makes every downstream algorithm that fixes
    a shortest path deterministic.
    """

    __slots__ = ("g",)

    def __init__(self, g: Graph):
        self.g = g

    def vertex_ids(self):
        return range(self.g.n)

    def weight(self, u: int, v: int) -> float:
        return self.g.dist(u, v)

    def path(self, u: int, v: int):
        if self.g.dist(u, v) == INF:
            return None
        dt = self.g.dist_to(v)
        seq = [u]
        cur = u
        while cur != v:
            cur = min(w for w in self.g.out_adj[cur] if dt[w] == dt[cur] - 1)
            seq.append(cur)
        return seq

    def path_edges(self, u: int, v: int):
        """Graph edges along path(u,v), as (tail, head) pairs."""
        seq = self.path(u, v)
        if seq is None:
            return None
        return list(zip(seq[:-1], seq[1:]))


def metric_completion(g: Graph) -> Metric:
    return Metric(g)


def out_tree_edges(g: Graph, u: int) -> list[int]:
    """A shortest-path tree rooted at u (edge ids), smallest-id parents."""
    du = g.dist_from(u)
    ids = []
    for v in range(g.n):
        if v == u or du[v] == INF:
            continue
        parent = min(w for w in g.in_adj[v] if du[w] + 1 == du[v])
        ids.append(g.edge_id[(parent, v)])
    return ids


def in_tree_edges(g: Graph, u: int) -> list[int]:
    """A shortest-path tree into u (edge ids), smallest-id successors."""
    du = g.dist_to(u)
    ids = []
    for v in range(g.n):
        if v == u or du[v] == INF:
            continue
        succ = min(w for w in g.out_adj[v] if du[w] + 1 == du[v])
        ids.append(g.edge_id[(v, succ)])
    return ids


# ---------------------------------------------------------------------------
# text formats
#
# Graph file: first line "n m", then m lines "u v".
# Demand file: lines "s t D" where D is a positive integer, "-" for an
# exact (preserver) pair, or "*" for an unbounded (Steiner forest) pair.

def parse_graph(text: str) -> Graph:
    lines = text.splitlines()
    header_idx = None
    n = m = 0
    edges = []
    count = 0
    for i, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header_idx is None:
            if len(parts) != 2:
                raise ParseError(i, f"expected header 'n m', got {line!r}")
            try:
                n, m = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(i, f"non-integer header {line!r}") from None
            header_idx = i
            continue
        if len(parts) != 2:
            raise ParseError(i, f"expected edge 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(i, f"non-integer edge {line!r}") from None
        count += 1
        if count > m:
            raise ParseError(i, f"more than the declared {m} edges")
        edges.append((u, v))
    if header_idx is None:
        raise ParseError(1, "empty graph file")
    if count < m:
        raise ParseError(len(lines), f"declared {m} edges but found {count}")
    try:
        return Graph(n, edges)
    except ValueError as exc:
        raise ParseError(header_idx, str(exc)) from None


def format_graph(g: Graph, edge_ids: Iterable[int] | None = None) -> str:
    """Graph (or an edge subset of it) in the text format."""
    if edge_ids is None:
        chosen = g.edges
    else:
        chosen = [g.edges[e] for e in sorted(set(edge_ids))]
    out = [f"{g.n} {len(chosen)}"]
    out.extend(f"{u} {v}" for u, v in chosen)
    return "\n".join(out) + "\n"


def parse_demands(text: str) -> DemandSet:
    demands = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(i, f"expected 's t D', got {line!r}")
        try:
            s, t = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(i, f"non-integer endpoints in {line!r}") from None
        tok = parts[2]
        if tok == "-":
            bound: object = EXACT
        elif tok == "*":
            bound = INF
        else:
            try:
                bound = int(tok)
            except ValueError:
                raise ParseError(i, f"bound must be an integer, '-' or '*', got {tok!r}") from None
        try:
            demands.append(Demand(s, t, bound))
        except ValueError as exc:
            raise ParseError(i, str(exc)) from None
    try:
        return DemandSet(demands)
    except ValueError as exc:
        raise ParseError(len(text.splitlines()), str(exc)) from None


def format_demands(demands: DemandSet) -> str:
    out = []
    for d in demands:
        if d.exact:
            tok = "-"
        elif d.bound is INF:
            tok = "*"
        else:
            tok = str(d.bound)
        out.append(f"{d.s} {d.t} {tok}")
    return "\n".join(out) + "\n"
