"""Min-Rep instances and the additive-spanner reductions built on them.

The generators emit undirected spanner instances whose vertices carry
construction roles (outer copies, inner bipartite nodes, special hubs,
middle subdivision nodes, padding paths) so that verifiers and the
canonicalization machinery can audit paths by family.  Soundness-side
operations (canonicalize, extract covers) and completeness witnesses are
implemented for additive stretch 1 and for stretch k >= 3.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import InfeasibleInstanceError
from .rounding import rng_from, split_seed

Edge = tuple[int, int]


@dataclass(frozen=True)
class MinRepInstance:
    """Bipartite group-partitioned graph with its supergraph.

    Inner vertices are 0..2*r*sigma-1: left group i occupies
    [i*sigma, (i+1)*sigma), right group j occupies
    [(r+j)*sigma, (r+j+1)*sigma).  Supernodes are 0..2r-1 (left then
    right); a superedge (i, j) joins left supernode i to right
    supernode j and exists iff some inner edge crosses the two groups.
    """

    r: int
    sigma: int
    d_super: int
    edges: frozenset[Edge]
    superedges: frozenset[tuple[int, int]]

    @property
    def n_super(self) -> int:
        return 2 * self.r

    @property
    def n_inner(self) -> int:
        return 2 * self.r * self.sigma

    def group_members(self, supernode: int) -> range:
        return range(supernode * self.sigma, (supernode + 1) * self.sigma)

    def group_of(self, inner: int) -> int:
        return inner // self.sigma

    def d_inner(self) -> int:
        deg: dict[int, int] = {}
        for a, b in self.edges:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        return max(deg.values(), default=0)

    def crossing_edges(self, i: int, j: int) -> list[Edge]:
        ga = set(self.group_members(i))
        gb = set(self.group_members(self.r + j))
        return sorted((a, b) for a, b in self.edges if a in ga and b in gb)


RepCover = frozenset


def minrep_yes(r: int, sigma: int, d: int, seed: int,
               filler_prob: float = 0.3) -> tuple[MinRepInstance, RepCover]:
    """YES instance with a planted cover of size 2r.

    The supergraph is the d-regular bipartite circulant on r+r
    supernodes.  One representative per group is planted and every
    superedge gets an edge between its two planted representatives;
    filler edges land only across already-present superedges, so the
    planted cover stays valid and no cover can beat 2r (every group is
    incident to a superedge and contributes at least one vertex).
    """
    if d < 1 or d > r:
        raise InfeasibleInstanceError(f"no d-regular bipartite supergraph with d={d}, r={r}")
    if sigma < 1:
        raise ValueError("sigma must be >= 1")
    rng = rng_from(split_seed(seed, "minrep", r, sigma, d))
    superedges = frozenset((i, (i + shift) % r) for i in range(r) for shift in range(d))
    planted = {y: y * sigma + int(rng.integers(0, sigma)) for y in range(2 * r)}
    edges = {(planted[i], planted[r + j]) for i, j in superedges}
    for i, j in sorted(superedges):
        for a in range(i * sigma, (i + 1) * sigma):
            for b in range((r + j) * sigma, (r + j + 1) * sigma):
                if (a, b) not in edges and rng.random() < filler_prob:
                    edges.add((a, b))
    inst = MinRepInstance(r, sigma, d, frozenset(edges), superedges)
    cover = RepCover(planted.values())
    return inst, cover


def rep_cover_verify(inst: MinRepInstance, cover: Iterable[int]) -> bool:
    """True iff every superedge has a crossing inner edge with both
    endpoints chosen."""
    chosen = set(cover)
    for i, j in inst.superedges:
        ga = set(inst.group_members(i)) & chosen
        gb = set(inst.group_members(inst.r + j)) & chosen
        if not any((a, b) in inst.edges for a in ga for b in gb):
            return False
    return True


class SpannerInstance:
    """Undirected graph from a reduction, with per-vertex roles and
    per-edge family tags."""

    def __init__(self, minrep: MinRepInstance, x: int, stretch: int,
                 vertex_keys: list[tuple], tagged_edges: list[tuple[tuple, tuple, str]]):
        self.minrep = minrep
        self.x = x
        self.stretch = stretch
        self.vertex_keys = vertex_keys
        self.vid = {key: i for i, key in enumerate(vertex_keys)}
        if len(self.vid) != len(vertex_keys):
            raise ValueError("duplicate vertex keys")
        self.n = len(vertex_keys)
        edges: dict[Edge, str] = {}
        for ka, kb, family in tagged_edges:
            a, b = self.vid[ka], self.vid[kb]
            e = (min(a, b), max(a, b))
            if e in edges:
                raise ValueError(f"edge {ka}-{kb} assigned to both {edges[e]} and {family}")
            edges[e] = family
        self.edges: tuple[Edge, ...] = tuple(sorted(edges))
        self.family = {e: edges[e] for e in self.edges}
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        self.adj = tuple(tuple(sorted(x_)) for x_ in adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    def family_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for fam in self.family.values():
            out[fam] = out.get(fam, 0) + 1
        return dict(sorted(out.items()))

    def edges_of_family(self, family: str) -> list[Edge]:
        return [e for e, f in self.family.items() if f == family]

    def distances(self, edge_subset: Iterable[Edge] | None = None) -> list[list[float]]:
        """All-pairs BFS rows, over the full graph or an edge subset."""
        if edge_subset is None:
            adj = self.adj
        else:
            lists: list[list[int]] = [[] for _ in range(self.n)]
            for a, b in edge_subset:
                lists[a].append(b)
                lists[b].append(a)
            adj = lists
        rows = []
        for s in range(self.n):
            dist = [math.inf] * self.n
            dist[s] = 0
            q = deque([s])
            while q:
                u = q.popleft()
                for v in adj[u]:
                    if dist[v] == math.inf:
                        dist[v] = dist[u] + 1
                        q.append(v)
            rows.append(dist)
        return rows

    def degree(self, key: tuple) -> int:
        return len(self.adj[self.vid[key]])


def verify_additive(g: SpannerInstance, h_edges: Iterable[Edge], k: int) -> bool:
    """All-pairs +k check by BFS from every vertex in both graphs."""
    h = set(h_edges)
    for e in h:
        if e not in g.family:
            raise ValueError(f"edge {e} not in instance")
    dg = g.distances()
    dh = g.distances(h)
    for u in range(g.n):
        for v in range(u + 1, g.n):
            if dh[u][v] > dg[u][v] + k:
                return False
    return True


# ---------------------------------------------------------------------------
# +1 reduction


def reduce_plus1(inst: MinRepInstance, x: int) -> SpannerInstance:
    """Spanner instance with inner Min-Rep graph, x outer copies of each
    supernode, per-supernode special nodes, per-superedge middle nodes,
    and a diameter-4 star through one extra hub."""
    if x < 1:
        raise ValueError("x must be >= 1")
    r = inst.r
    keys: list[tuple] = []
    keys += [("outL", u, i) for u in range(r) for i in range(x)]
    keys += [("outR", v, i) for v in range(r) for i in range(x)]
    keys += [("in", a) for a in range(inst.n_inner)]
    keys += [("s", y) for y in range(inst.n_super)]
    keys += [("m", i, j) for i, j in sorted(inst.superedges)]
    main = list(keys)
    keys.append(("hub",))
    keys += [("t", base) for base in main]

    e: list[tuple[tuple, tuple, str]] = []
    for a, b in sorted(inst.edges):
        e.append((("in", a), ("in", b), "E_in"))
    for u in range(r):
        for i in range(x):
            for a in inst.group_members(u):
                e.append(((("outL", u, i)), ("in", a), "E_con"))
    for v in range(r):
        for i in range(x):
            for b in inst.group_members(r + v):
                e.append(((("outR", v, i)), ("in", b), "E_con"))
    for i, j in sorted(inst.superedges):
        for c in range(x):
            e.append((("outL", i, c), ("m", i, j), "E_out"))
            e.append((("outR", j, c), ("m", i, j), "E_out"))
    for u in range(r):
        for i in range(x):
            e.append((("outL", u, i), ("s", u), "E_so"))
            e.append((("outR", u, i), ("s", r + u), "E_so"))
    for y in range(inst.n_super):
        for a in inst.group_members(y):
            e.append((("in", a), ("s", y), "E_si"))
    for i, j in sorted(inst.superedges):
        e.append((("s", i), ("m", i, j), "E_sm"))
        e.append((("s", r + j), ("m", i, j), "E_sm"))
    for y in range(inst.n_super):
        members = list(inst.group_members(y))
        for p in range(len(members)):
            for q in range(p + 1, len(members)):
                e.append((("in", members[p]), ("in", members[q]), "E_group"))
    for base in main:
        e.append((("hub",), ("t", base), "E_star"))
        e.append((("t", base), base, "E_star"))
    return SpannerInstance(inst, x, 1, keys, e)


def plus1_size_formulas(inst: MinRepInstance, x: int) -> dict[str, int]:
    """Closed-form vertex and per-family edge counts for the +1 reduction."""
    np_, sig = inst.n_super, inst.sigma
    me = len(inst.superedges)
    v_r = np_ * x + np_ * sig + np_ + me
    return {
        "V_R": v_r,
        "V_G": 2 * v_r + 1,
        "E_in": len(inst.edges),
        "E_con": np_ * sig * x,
        "E_out": 2 * me * x,
        "E_so": np_ * x,
        "E_si": np_ * sig,
        "E_sm": 2 * me,
        "E_group": np_ * (sig * (sig - 1) // 2),
        "E_star": 2 * v_r,
    }


def _outer_key(g: SpannerInstance, supernode: int, copy: int) -> tuple:
    r = g.minrep.r
    if g.stretch == 1:
        return ("outL", supernode, copy) if supernode < r else ("outR", supernode - r, copy)
    k = g.stretch
    if supernode < r:
        return ("outL", supernode, copy, k - 1)
    return ("outR", supernode - r, copy, k - 1)


def _inner_conn_key(g: SpannerInstance, supernode: int, copy: int) -> tuple:
    """The outer node whose connection edges define cover membership."""
    r = g.minrep.r
    if g.stretch == 1:
        return _outer_key(g, supernode, copy)
    if supernode < r:
        return ("outL", supernode, copy, 1)
    return ("outR", supernode - r, copy, 1)


def completeness_witness_plus1(g: SpannerInstance, cover: Iterable[int]) -> frozenset[Edge]:
    """The cheap +1-spanner certified by a one-per-group cover: all
    special/star scaffolding, one connection edge per outer copy to the
    group representative, and a group star centered at it."""
    if g.stretch != 1:
        raise ValueError("expected a +1 instance")
    inst = g.minrep
    chosen = set(cover)
    reps: dict[int, int] = {}
    for y in range(inst.n_super):
        members = [a for a in inst.group_members(y) if a in chosen]
        if len(members) != 1:
            raise InfeasibleInstanceError(
                f"cover must pick exactly one representative in group {y}")
        reps[y] = members[0]
    if not rep_cover_verify(inst, chosen):
        raise InfeasibleInstanceError("not a valid cover")
    h: set[Edge] = set()
    for fam in ("E_in", "E_so", "E_si", "E_sm", "E_star"):
        h.update(g.edges_of_family(fam))
    for y in range(inst.n_super):
        rep = reps[y]
        for i in range(g.x):
            a, b = g.vid[_outer_key(g, y, i)], g.vid[("in", rep)]
            h.add((min(a, b), max(a, b)))
        for other in inst.group_members(y):
            if other != rep:
                a, b = g.vid[("in", rep)], g.vid[("in", other)]
                h.add((min(a, b), max(a, b)))
    return frozenset(h)


@dataclass
class CanonicalizeResult:
    edges: frozenset[Edge]
    added: frozenset[Edge]
    charges: dict[tuple, Edge] = field(default_factory=dict)


def _has_canonical_path_plus1(g: SpannerInstance, h: set[Edge], i: int, j: int,
                              copy_a: int, copy_b: int) -> bool:
    inst = g.minrep
    ol = g.vid[("outL", i, copy_a)]
    orr = g.vid[("outR", j, copy_b)]
    for a in inst.group_members(i):
        av = g.vid[("in", a)]
        if (min(ol, av), max(ol, av)) not in h:
            continue
        for b in inst.group_members(inst.r + j):
            bv = g.vid[("in", b)]
            if (a, b) in inst.edges and (min(av, bv), max(av, bv)) in h \
                    and (min(orr, bv), max(orr, bv)) in h:
                return True
    return False


def canonicalize_plus1(g: SpannerInstance, h_edges: Iterable[Edge]) -> CanonicalizeResult:
    """Superset of H in which every (superedge, copy) pair has a
    canonical outer-inner-inner-outer path; each added path is charged
    to an outer edge that H must contain, so the growth factor is at
    most 4."""
    h = set(h_edges)
    if not verify_additive(g, h, 1):
        raise InfeasibleInstanceError("input is not a +1 spanner")
    inst = g.minrep
    out = set(h)
    added: set[Edge] = set()
    charges: dict[tuple, Edge] = {}
    for i, j in sorted(inst.superedges):
        a_uv, b_uv = inst.crossing_edges(i, j)[0]
        for c in range(g.x):
            if _has_canonical_path_plus1(g, out, i, j, c, c):
                continue
            ol, orr = g.vid[("outL", i, c)], g.vid[("outR", j, c)]
            mid = g.vid[("m", i, j)]
            cand = [(min(ol, mid), max(ol, mid)), (min(orr, mid), max(orr, mid))]
            present = [e for e in cand if e in h]
            if not present:
                raise InfeasibleInstanceError(
                    f"+1 spanner misses both outer edges for superedge ({i},{j}) copy {c}")
            charges[((i, j), c)] = present[0]
            for pa, pb in ((ol, g.vid[("in", a_uv)]),
                           (g.vid[("in", a_uv)], g.vid[("in", b_uv)]),
                           (g.vid[("in", b_uv)], orr)):
                e = (min(pa, pb), max(pa, pb))
                if e not in out:
                    out.add(e)
                    added.add(e)
    return CanonicalizeResult(frozenset(out), frozenset(added), charges)


def extract_covers(g: SpannerInstance, h_edges: Iterable[Edge]) -> list[RepCover]:
    """Per-copy covers read off the connection edges of a canonical
    spanner: C_i collects inner nodes adjacent to their group's i-th
    outer copy."""
    h = set(h_edges)
    inst = g.minrep
    for i, j in sorted(inst.superedges):
        for c in range(g.x):
            ok = (_has_canonical_path_plus1(g, h, i, j, c, c) if g.stretch == 1
                  else _has_canonical_path_plusk(g, h, i, j, c))
            if not ok:
                raise InfeasibleInstanceError(
                    f"input is not canonical at superedge ({i},{j}) copy {c}")
    covers = []
    for c in range(g.x):
        cover = set()
        for a in range(inst.n_inner):
            y = inst.group_of(a)
            ov = g.vid[_inner_conn_key(g, y, c)]
            av = g.vid[("in", a)]
            if (min(ov, av), max(ov, av)) in h:
                cover.add(a)
        if not rep_cover_verify(inst, cover):
            raise InfeasibleInstanceError(f"extracted set for copy {c} is not a cover")
        covers.append(RepCover(cover))
    return covers


# ---------------------------------------------------------------------------
# +k reduction (k >= 3)


def reduce_plusk(inst: MinRepInstance, x: int, k: int) -> SpannerInstance:
    """Spanner instance for additive stretch k: outer copies become
    paths of length k-2, superedges become middle paths of length k-3,
    and padding paths (L to the special nodes, P to per-supernode
    collectors Q) keep every scaffolding pair spannable."""
    if k < 3:
        raise ValueError("the +k construction needs k >= 3")
    if x < 1:
        raise ValueError("x must be >= 1")
    r = inst.r
    half = (k - 1 + 1) // 2  # ceil((k-1)/2)
    keys: list[tuple] = []
    keys += [("outL", u, i, j) for u in range(r) for i in range(x) for j in range(1, k)]
    keys += [("outR", v, i, j) for v in range(r) for i in range(x) for j in range(1, k)]
    keys += [("in", a) for a in range(inst.n_inner)]
    keys += [("s", y) for y in range(inst.n_super)]
    keys += [("l", y, i, j) for y in range(inst.n_super) for i in range(x)
             for j in range(1, k)]
    keys += [("m", i, j, p) for i, j in sorted(inst.superedges) for p in range(1, k - 1)]
    keys += [("q", y) for y in range(inst.n_super)]
    keys += [("p", y, i, j) for y in range(inst.n_super) for i in range(x)
             for j in range(1, half + 1)]
    main = list(keys)
    keys.append(("hub",))
    keys += [("t", base, j) for base in main for j in range(1, k)]

    def okey(y: int, i: int, j: int) -> tuple:
        return ("outL", y, i, j) if y < r else ("outR", y - r, i, j)

    e: list[tuple[tuple, tuple, str]] = []
    for a, b in sorted(inst.edges):
        e.append((("in", a), ("in", b), "E_in"))
    for y in range(inst.n_super):
        for i in range(x):
            for a in inst.group_members(y):
                e.append((okey(y, i, 1), ("in", a), "E_con"))
            for j in range(1, k - 1):
                e.append((okey(y, i, j), okey(y, i, j + 1), "E_path"))
            e.append((okey(y, i, k - 1), ("l", y, i, 1), "E_L"))
            for j in range(1, k - 1):
                e.append((("l", y, i, j), ("l", y, i, j + 1), "E_L"))
            e.append((("s", y), ("l", y, i, k - 1), "E_so"))
            e.append((okey(y, i, k - 1), ("p", y, i, 1), "E_P"))
            for j in range(1, half):
                e.append((("p", y, i, j), ("p", y, i, j + 1), "E_P"))
            e.append((("p", y, i, half), ("q", y), "E_P"))
    for i, j in sorted(inst.superedges):
        e.append((("s", i), ("m", i, j, 1), "E_sm"))
        e.append((("s", r + j), ("m", i, j, k - 2), "E_sm"))
        for p in range(1, k - 2):
            e.append((("m", i, j, p), ("m", i, j, p + 1), "E_M"))
        for c in range(x):
            e.append((("outL", i, c, k - 1), ("m", i, j, 1), "E_out"))
            e.append((("outR", j, c, k - 1), ("m", i, j, k - 2), "E_out"))
    for y in range(inst.n_super):
        members = list(inst.group_members(y))
        for p in range(len(members)):
            for q in range(p + 1, len(members)):
                e.append((("in", members[p]), ("in", members[q]), "E_group"))
    for base in main:
        e.append((base, ("t", base, 1), "E_star"))
        for j in range(1, k - 1):
            e.append((("t", base, j), ("t", base, j + 1), "E_star"))
        e.append((("t", base, k - 1), ("hub",), "E_star"))
    return SpannerInstance(inst, x, k, keys, e)


def plusk_size_formulas(inst: MinRepInstance, x: int, k: int) -> dict[str, int]:
    """Closed-form vertex and per-family edge counts for the +k reduction."""
    np_, sig = inst.n_super, inst.sigma
    me = len(inst.superedges)
    half = (k - 1 + 1) // 2
    v_r = (np_ * x * (k - 1)          # outer paths
           + np_ * sig + np_          # inner + special
           + np_ * x * (k - 1)        # L paths
           + me * (k - 2)             # middle paths
           + np_                      # Q
           + np_ * x * half)          # P paths
    return {
        "V_R": v_r,
        "V_G": k * v_r + 1,
        "E_in": len(inst.edges),
        "E_con": np_ * sig * x,
        "E_path": np_ * x * (k - 2),
        "E_L": np_ * x * (k - 1),
        "E_so": np_ * x,
        "E_P": np_ * x * (half + 1),
        "E_sm": 2 * me,
        "E_M": me * (k - 3),
        "E_out": 2 * me * x,
        "E_group": np_ * (sig * (sig - 1) // 2),
        "E_star": k * v_r,
    }


def completeness_witness_plusk(g: SpannerInstance, cover: Iterable[int]) -> frozenset[Edge]:
    """The cheap +k-spanner from an arbitrary valid cover: everything
    except outer edges, with connection edges only to cover members."""
    if g.stretch < 3:
        raise ValueError("expected a +k instance")
    inst = g.minrep
    chosen = set(cover)
    if not rep_cover_verify(inst, chosen):
        raise InfeasibleInstanceError("not a valid cover")
    for y in range(inst.n_super):
        if not any(a in chosen for a in inst.group_members(y)):
            raise InfeasibleInstanceError(f"cover misses group {y}")
    h: set[Edge] = set()
    for fam in ("E_in", "E_path", "E_L", "E_P", "E_so", "E_sm", "E_M",
                "E_group", "E_star"):
        h.update(g.edges_of_family(fam))
    for y in range(inst.n_super):
        for i in range(g.x):
            ov = g.vid[_inner_conn_key(g, y, i)]
            for a in inst.group_members(y):
                if a in chosen:
                    av = g.vid[("in", a)]
                    h.add((min(ov, av), max(ov, av)))
    return frozenset(h)


def _plusk_canonical_path_keys(g: SpannerInstance, i: int, j: int, c: int,
                               a: int, b: int) -> list[tuple[tuple, tuple]]:
    k = g.stretch
    hops = []
    for jj in range(k - 1, 1, -1):
        hops.append((("outL", i, c, jj), ("outL", i, c, jj - 1)))
    hops.append((("outL", i, c, 1), ("in", a)))
    hops.append((("in", a), ("in", b)))
    hops.append((("in", b), ("outR", j, c, 1)))
    for jj in range(1, k - 1):
        hops.append((("outR", j, c, jj), ("outR", j, c, jj + 1)))
    return hops


def _has_canonical_path_plusk(g: SpannerInstance, h: set[Edge], i: int, j: int,
                              c: int) -> bool:
    inst = g.minrep

    def has(ka, kb):
        a_, b_ = g.vid[ka], g.vid[kb]
        return (min(a_, b_), max(a_, b_)) in h

    k = g.stretch
    for jj in range(1, k - 1):
        if not has(("outL", i, c, jj), ("outL", i, c, jj + 1)):
            return False
        if not has(("outR", j, c, jj), ("outR", j, c, jj + 1)):
            return False
    for a in inst.group_members(i):
        if not has(("outL", i, c, 1), ("in", a)):
            continue
        for b in inst.group_members(inst.r + j):
            if (a, b) in inst.edges and has(("in", a), ("in", b)) \
                    and has(("in", b), ("outR", j, c, 1)):
                return True
    return False


def canonicalize_plusk(g: SpannerInstance, h_edges: Iterable[Edge]) -> CanonicalizeResult:
    """Superset of H with a canonical (2k-1)-hop path for every
    (superedge, copy); each addition of at most 2k-1 edges is charged to
    an outer edge of H, so the growth factor is at most 2k."""
    k = g.stretch
    h = set(h_edges)
    if not verify_additive(g, h, k):
        raise InfeasibleInstanceError(f"input is not a +{k} spanner")
    inst = g.minrep
    out = set(h)
    added: set[Edge] = set()
    charges: dict[tuple, Edge] = {}
    for i, j in sorted(inst.superedges):
        a_uv, b_uv = inst.crossing_edges(i, j)[0]
        for c in range(g.x):
            if _has_canonical_path_plusk(g, out, i, j, c):
                continue
            ol = g.vid[("outL", i, c, k - 1)]
            orr = g.vid[("outR", j, c, k - 1)]
            m1 = g.vid[("m", i, j, 1)]
            mk = g.vid[("m", i, j, k - 2)]
            cand = [(min(ol, m1), max(ol, m1)), (min(orr, mk), max(orr, mk))]
            present = [e for e in cand if e in h]
            if not present:
                raise InfeasibleInstanceError(
                    f"+{k} spanner misses both outer edges for superedge ({i},{j}) copy {c}")
            charges[((i, j), c)] = present[0]
            for ka, kb in _plusk_canonical_path_keys(g, i, j, c, a_uv, b_uv):
                a_, b_ = g.vid[ka], g.vid[kb]
                e = (min(a_, b_), max(a_, b_))
                if e not in out:
                    out.add(e)
                    added.add(e)
    return CanonicalizeResult(frozenset(out), frozenset(added), charges)


def extract_covers_plusk(g: SpannerInstance, h_edges: Iterable[Edge]) -> list[RepCover]:
    return extract_covers(g, h_edges)


# ---------------------------------------------------------------------------
# text emission: undirected graph plus a sidecar role map


def format_minrep(inst: MinRepInstance, cover: Iterable[int] | None = None) -> str:
    out = [f"minrep {inst.r} {inst.sigma} {inst.d_super}"]
    out.extend(f"superedge {i} {j}" for i, j in sorted(inst.superedges))
    out.extend(f"edge {a} {b}" for a, b in sorted(inst.edges))
    if cover is not None:
        out.append("cover " + " ".join(str(v) for v in sorted(cover)))
    return "\n".join(out) + "\n"


def parse_minrep(text: str) -> tuple[MinRepInstance, RepCover | None]:
    from .errors import ParseError

    header = None
    superedges = set()
    edges = set()
    cover = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            if parts[0] == "minrep":
                header = (int(parts[1]), int(parts[2]), int(parts[3]))
            elif parts[0] == "superedge":
                superedges.add((int(parts[1]), int(parts[2])))
            elif parts[0] == "edge":
                edges.add((int(parts[1]), int(parts[2])))
            elif parts[0] == "cover":
                cover = RepCover(int(v) for v in parts[1:])
            else:
                raise ParseError(lineno, f"unknown record {parts[0]!r}")
        except (IndexError, ValueError):
            raise ParseError(lineno, f"malformed record {line!r}") from None
    if header is None:
        raise ParseError(1, "missing 'minrep r sigma d' header")
    inst = MinRepInstance(header[0], header[1], header[2],
                          frozenset(edges), frozenset(superedges))
    return inst, cover


def format_spanner_instance(g: SpannerInstance) -> str:
    out = [f"{g.n} {g.m}"]
    out.extend(f"{a} {b}" for a, b in g.edges)
    return "\n".join(out) + "\n"


def format_role_map(g: SpannerInstance) -> str:
    out = []
    for vid, key in enumerate(g.vertex_keys):
        parts = " ".join(str(p) for p in key)
        out.append(f"{vid} {parts}")
    for (a, b), fam in sorted(g.family.items()):
        out.append(f"edge {a} {b} {fam}")
    return "\n".join(out) + "\n"
