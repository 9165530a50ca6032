"""Reusable randomized machinery: edge rounding, greedy hitting sets,
height reduction onto shallow trees, the block-contraction tree
flattening used as its test oracle, and group-Steiner tree rounding.

All randomness flows through numpy generators derived from a single
64-bit seed via `split_seed`, so every operation is reproducible and
every sub-operation gets an independent stream.
"""

from __future__ import annotations

import hashlib
import logging
import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import BudgetError, RoundingError
from .graph import Demand, DemandSet, Graph, all_satisfied, verify_solution

log = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 100_000


def split_seed(seed: int, *labels) -> int:
    """Derive an independent 64-bit child seed from (seed, labels)."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(seed)).encode())
    for lab in labels:
        h.update(b"/")
        h.update(str(lab).encode())
    return int.from_bytes(h.digest(), "big")


def rng_from(seed: int) -> np.random.Generator:
    return np.random.default_rng(int(seed) & (2**64 - 1))


def randomized_round(g: Graph, x: Mapping[int, float], k: float,
                     demands: Sequence[Demand], seed: int,
                     max_rounds: int = 64) -> tuple[int, ...]:
    """Retain each edge independently with probability min(1, x_e * k ln n),
    repeating (and unioning) rounds until every given demand verifies.

    Raises RoundingError when max_rounds is exhausted, which signals a
    broken relaxation or a mis-classified pair rather than bad luck.
    """
    demands = list(demands)
    if not demands:
        return ()
    scale = k * math.log(max(g.n, 2))
    edge_ids = sorted(x)
    probs = np.array([min(1.0, max(0.0, x[e]) * scale) for e in edge_ids])
    rng = rng_from(seed)
    chosen: set[int] = set()
    dset = DemandSet(demands)
    for rnd in range(max_rounds):
        draws = rng.random(len(edge_ids))
        for e, p, u in zip(edge_ids, probs, draws):
            if u < p:
                chosen.add(e)
        if all_satisfied(verify_solution(g, chosen, dset)):
            log.debug("randomized_round: satisfied after %d rounds, %d edges",
                      rnd + 1, len(chosen))
            return tuple(sorted(chosen))
    raise RoundingError(
        f"randomized rounding failed after {max_rounds} rounds on {len(demands)} pairs")


def hitting_set(sets: Sequence[Iterable[int]], k: float) -> tuple[int, ...]:
    """Greedy hitting set: repeatedly take the vertex in the most
    still-unhit sets (ties to the smallest id).

    The greedy bound |X| <= (1 + ln #sets) * n / k dominates the target
    guarantee when every input set has size >= k.
    """
    family = [frozenset(s) for s in sets]
    for i, s in enumerate(family):
        if not s:
            raise ValueError(f"set {i} is empty")
    unhit = set(range(len(family)))
    chosen: list[int] = []
    while unhit:
        count: dict[int, int] = {}
        for i in unhit:
            for v in family[i]:
                count[v] = count.get(v, 0) + 1
        best = max(count.items(), key=lambda kv: (kv[1], -kv[0]))[0]
        chosen.append(best)
        unhit = {i for i in unhit if best not in family[i]}
    return tuple(sorted(chosen))


class ShallowTree:
    """Rooted tree of height <= sigma over a metric's vertices.

    Tree vertex i carries: its parent, the metric vertex it stands for
    (the endpoint map), the weight of the edge to its parent, and that
    edge's witness path in the underlying graph.  Vertex 0 is the root.
    """

    def __init__(self):
        self.parent: list[int] = [-1]
        self.endpoint: list = [None]
        self.wt: list[float] = [0.0]
        self.phi: list = [None]  # witness path (vertex list) for edge to parent
        self.depth: list[int] = [0]
        self.children: list[list[int]] = [[]]

    def add(self, parent: int, endpoint, wt: float, phi) -> int:
        idx = len(self.parent)
        self.parent.append(parent)
        self.endpoint.append(endpoint)
        self.wt.append(wt)
        self.phi.append(phi)
        self.depth.append(self.depth[parent] + 1)
        self.children.append([])
        self.children[parent].append(idx)
        return idx

    def __len__(self):
        return len(self.parent)

    @property
    def height(self) -> int:
        return max(self.depth)

    def root_path(self, v: int) -> list[int]:
        """Tree vertices from v up to and including the root."""
        out = [v]
        while self.parent[out[-1]] >= 0:
            out.append(self.parent[out[-1]])
        return out

    def path_endpoints(self, v: int) -> list:
        """Metric vertices along the enumerated path this vertex stands for."""
        return [self.endpoint[u] for u in reversed(self.root_path(v))][1:]

    def prune_to(self, keep: Iterable[int]) -> tuple["ShallowTree", dict[int, int]]:
        """Subtree spanned by `keep` and all their ancestors.

        Returns the new tree and the old-index -> new-index map.
        """
        closed = {0}
        for v in keep:
            closed.update(self.root_path(v))
        order = sorted(closed)
        tree = ShallowTree()
        remap = {0: 0}
        tree.endpoint[0] = self.endpoint[0]
        for v in order:
            if v == 0:
                continue
            remap[v] = tree.add(remap[self.parent[v]], self.endpoint[v],
                                self.wt[v], self.phi[v])
        return tree, remap


def height_reduce(metric, r, sigma: int,
                  node_budget: int = DEFAULT_NODE_BUDGET,
                  interior=None) -> ShallowTree:
    """Enumerate all repeat-free paths of <= sigma hops from r in the
    metric completion and thread them into a tree (shared prefixes are
    shared vertices).

    Each tree edge (Q, Qv) weighs the metric weight of its last hop and
    carries the witness shortest path for that hop.  `interior`, when
    given, restricts which metric vertices may be extended past (others
    appear only as path endpoints).  Raises BudgetError once the vertex
    count would exceed node_budget.
    """
    if sigma < 1:
        raise ValueError("sigma must be >= 1")
    tree = ShallowTree()
    tree.endpoint[0] = r
    verts = sorted(metric.vertex_ids())
    frontier = [0]
    for _ in range(sigma):
        nxt = []
        for node in frontier:
            u = tree.endpoint[node]
            if node != 0 and interior is not None and u not in interior:
                continue
            on_path = set(tree.path_endpoints(node)) | {r}
            for v in verts:
                if v in on_path:
                    continue
                w = metric.weight(u, v)
                if w == math.inf:
                    continue
                if len(tree) >= node_budget:
                    raise BudgetError(
                        f"height reduction exceeds node budget {node_budget} "
                        f"(|V|={len(verts)}, sigma={sigma})")
                nxt.append(tree.add(node, v, w, metric.path(u, v)))
        frontier = nxt
    return tree


def project_tree(tree: ShallowTree, subtree: Iterable[int]) -> set[tuple]:
    """Union of witness-path edges over the subtree's tree edges.

    The subtree must contain the root and be connected (parents of every
    member present).  Returns edges of the metric's underlying graph; the
    edge count never exceeds the subtree's tree weight on unit-weight
    graphs because shared graph edges collapse.
    """
    chosen = set(subtree)
    if chosen and 0 not in chosen:
        raise ValueError("subtree must contain the root")
    edges: set[tuple] = set()
    for v in chosen:
        if v == 0:
            continue
        if tree.parent[v] not in chosen:
            raise ValueError(f"subtree is not connected at tree vertex {v}")
        path = tree.phi[v]
        edges.update(zip(path[:-1], path[1:]))
    return edges


def subtree_weight(tree: ShallowTree, subtree: Iterable[int]) -> float:
    return sum(tree.wt[v] for v in subtree if v != 0)


def _dfs_order(root: int, children: Mapping[int, list[int]]) -> list[int]:
    order = []
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        for c in sorted(children.get(v, ()), reverse=True):
            stack.append(c)
    return order


def zelikovsky_reduce(parent: Mapping[int, int], wt: Mapping[int, float],
                      root, leaves: Sequence, sigma: int):
    """Flatten an arborescence to height <= sigma over its own metric
    completion, preserving the leaf set exactly.

    Leaves are grouped into DFS-consecutive blocks of size ceil(|L|^(1/sigma));
    each block hangs off its least common ancestor, and the surviving
    ancestors recurse.  Edge weights are path weights in the input tree.
    Returns (new_parent, new_wt) describing the reduced arborescence.
    """
    if sigma < 1:
        raise ValueError("sigma must be >= 1")
    leaves = list(leaves)
    if not leaves:
        return {}, {}
    children: dict = {}
    for v, p in parent.items():
        children.setdefault(p, []).append(v)
    order = _dfs_order(root, children)
    dfs_index = {v: i for i, v in enumerate(order)}
    depth = {root: 0}
    for v in order:
        if v != root:
            depth[v] = depth[parent[v]] + 1

    def up_dist(anc, v) -> float:
        d = 0.0
        while v != anc:
            d += wt[v]
            v = parent[v]
        return d

    def lca(a, b):
        while depth[a] > depth[b]:
            a = parent[a]
        while depth[b] > depth[a]:
            b = parent[b]
        while a != b:
            a = parent[a]
            b = parent[b]
        return a

    delta = max(2, math.ceil(len(leaves) ** (1.0 / sigma)))
    new_parent: dict = {}
    new_wt: dict = {}
    cur = sorted(leaves, key=lambda v: dfs_index[v])
    level = 0
    while len(cur) > 1 and level < sigma - 1:
        nxt = []
        for i in range(0, len(cur), delta):
            block = cur[i:i + delta]
            anc = block[0]
            for v in block[1:]:
                anc = lca(anc, v)
            for v in block:
                if v != anc:
                    new_parent[v] = anc
                    new_wt[v] = up_dist(anc, v)
            if anc not in nxt:
                nxt.append(anc)
        nxt.sort(key=lambda v: dfs_index[v])
        cur = nxt
        level += 1
    for v in cur:
        if v != root:
            new_parent[v] = root
            new_wt[v] = up_dist(root, v)
    return new_parent, new_wt


def arborescence_height(new_parent: Mapping, root) -> int:
    h = 0
    for v in new_parent:
        d = 0
        while v != root:
            v = new_parent[v]
            d += 1
        h = max(h, d)
    return h


def monotonize(tree: ShallowTree, x: Mapping[int, float]) -> dict[int, float]:
    """Clamp capacities to [0,1] and enforce child <= parent along root
    paths, so a top-down pass includes each edge with exactly its
    (clamped) capacity."""
    xhat: dict[int, float] = {0: 1.0}
    order = sorted(range(1, len(tree)), key=lambda v: tree.depth[v])
    for v in order:
        cap = min(1.0, max(0.0, x.get(v, 0.0)))
        xhat[v] = min(cap, xhat[tree.parent[v]])
    del xhat[0]
    return xhat


def gkr_single_pass(tree: ShallowTree, xhat: Mapping[int, float],
                    rng: np.random.Generator) -> set[int]:
    """One dependent-rounding pass: walk top-down, keeping edge (p, v)
    with probability xhat[v] / xhat[p] given p was kept.

    Marginal inclusion probability of each edge is exactly xhat[v].
    """
    included = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for p in frontier:
            pcap = 1.0 if p == 0 else xhat[p]
            for v in tree.children[p]:
                cap = xhat.get(v, 0.0)
                if cap <= 0.0 or pcap <= 0.0:
                    continue
                if rng.random() < cap / pcap:
                    included.add(v)
                    nxt.append(v)
        frontier = nxt
    return included


def gkr_round(tree: ShallowTree, x: Mapping[int, float],
              groups: Sequence[Iterable[int]], seed: int,
              retry_cap: int = 64) -> set[int]:
    """Round monotone edge capacities into a root-connected subtree
    hitting every group.

    Runs ceil(8 * height * ln(2 * #groups * |tree|)) independent passes
    per batch and unions them, retrying with fresh sub-seeds up to
    retry_cap batches.  Exhausting the cap signals capacities that do not
    support a unit of flow to some group.
    """
    group_sets = [frozenset(s) for s in groups]
    if not group_sets:
        return {0}
    xhat = monotonize(tree, x)
    height = max(1, tree.height)
    passes = math.ceil(8 * height * math.log(2 * len(group_sets) * max(len(tree), 2)))
    included: set[int] = {0}
    unhit = set(range(len(group_sets)))
    total = 0
    for batch in range(retry_cap):
        for p in range(passes):
            rng = rng_from(split_seed(seed, "gkr", batch, p))
            included |= gkr_single_pass(tree, xhat, rng)
            total += 1
            unhit = {i for i in unhit if not (group_sets[i] & included)}
            if not unhit:
                log.debug("gkr_round: all %d groups hit after %d passes",
                          len(group_sets), total)
                return included
    raise RoundingError(
        f"gkr rounding left {len(unhit)} of {len(group_sets)} groups unhit "
        f"after {total} passes")
