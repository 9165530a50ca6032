"""Seeded instance generation and the desk benchmark suite.

Everything here is deterministic in (seed, index): the suite emits
line-oriented key/value records with fixed float formatting, so two runs
with the same seed produce byte-identical output.
"""

from __future__ import annotations

import math
import sys
from typing import TextIO

from .graph import (EXACT, INF, Demand, DemandSet, Graph, all_satisfied,
                    verify_solution)
from .hardness import (completeness_witness_plus1, completeness_witness_plusk,
                       minrep_yes, plus1_size_formulas, plusk_size_formulas,
                       reduce_plus1, reduce_plusk, verify_additive)
from .junction import junction_tree_density
from .oracle import exact_min_density_junction_tree, exact_min_solution
from .preserver import preserver_approx
from .rounding import rng_from, split_seed
from .steiner import dsf_approx, pairwise_spanner_approx

KINDS = ("preserver", "spanner", "dsf")


def random_instance(seed: int, index: int, kind: str,
                    n_max: int = 10, m_max: int = 25, p_max: int = 5):
    """A connected-demand random instance; bounds depend on `kind`."""
    rng = rng_from(split_seed(seed, "inst", kind, index))
    n = int(rng.integers(3, n_max + 1))
    target_m = int(rng.integers(n, min(m_max, n * (n - 1)) + 1))
    edges: set[tuple[int, int]] = set()
    attempts = 0
    while len(edges) < target_m and attempts < 50 * target_m:
        u, v = (int(w) for w in rng.integers(0, n, 2))
        attempts += 1
        if u != v:
            edges.add((u, v))
    g = Graph(n, edges)
    demands = {}
    want = int(rng.integers(1, p_max + 1))
    for _ in range(6 * want):
        if len(demands) >= want:
            break
        s, t = (int(w) for w in rng.integers(0, n, 2))
        if s == t or (s, t) in demands or g.dist(s, t) == INF:
            continue
        if kind == "preserver":
            demands[(s, t)] = Demand(s, t)
        elif kind == "spanner":
            slack = int(rng.integers(0, 4))
            demands[(s, t)] = Demand(s, t, int(g.dist(s, t)) + slack)
        else:
            demands[(s, t)] = Demand(s, t, INF)
    if not demands:
        # fall back to any edge as a demand, so every instance is nonempty
        u, v = g.edges[0]
        demands[(u, v)] = Demand(u, v, INF if kind == "dsf" else
                                 (EXACT if kind == "preserver" else 1))
    return g, DemandSet(demands.values())


SOLVERS = {
    "preserver": preserver_approx,
    "spanner": pairwise_spanner_approx,
    "dsf": dsf_approx,
}


def run_desk_suite(seed: int, fp: TextIO | None = None, epsilon: float = 0.5,
                   feasibility_count: int = 36, ratio_count: int = 8,
                   density_count: int = 6) -> int:
    """Deterministic mini version of the acceptance suites; emits ratio
    tables and pass counts as key/value lines.  Returns the number of
    failed checks (0 means everything passed)."""
    out = fp or sys.stdout
    failures = 0

    def w(line: str):
        out.write(line + "\n")

    w(f"suite desk")
    w(f"seed {seed}")
    w(f"epsilon {epsilon:.6f}")

    ok_count = 0
    for i in range(feasibility_count):
        kind = KINDS[i % 3]
        g, demands = random_instance(seed, i, kind)
        edges = SOLVERS[kind](g, demands, epsilon=epsilon, seed=split_seed(seed, "solve", i))
        ok = all_satisfied(verify_solution(g, edges, demands))
        ok_count += ok
        failures += not ok
        w(f"feas {i} kind {kind} n {g.n} m {g.m} pairs {len(demands)} "
          f"edges {len(edges)} ok {int(ok)}")
    w(f"feas_total {feasibility_count} ok {ok_count}")

    worst = 0.0
    for i in range(ratio_count):
        g, demands = random_instance(seed, 1000 + i, "preserver", n_max=7, m_max=12, p_max=3)
        edges = preserver_approx(g, demands, epsilon=epsilon,
                                 seed=split_seed(seed, "ratio", i))
        opt, _ = exact_min_solution(g, demands)
        ratio = len(edges) / max(opt, 1)
        worst = max(worst, ratio)
        w(f"ratio {i} out {len(edges)} opt {opt} ratio {ratio:.6f}")
    w(f"ratio_max {worst:.6f}")

    worst_d = 0.0
    done = 0
    i = 0
    while done < density_count and i < 10 * density_count:
        g, demands = random_instance(seed, 2000 + i, "spanner", n_max=7, m_max=10, p_max=3)
        rng = rng_from(split_seed(seed, "dens-root", i))
        root = int(rng.integers(0, g.n))
        i += 1
        exact = exact_min_density_junction_tree(g, demands, root)
        if exact is None:
            continue
        try:
            res = junction_tree_density(g, demands, root, epsilon,
                                        split_seed(seed, "dens", i))
        except Exception:
            failures += 1
            w(f"density {done} root {root} achieved inf opt {exact[0]:.6f} ok 0")
            done += 1
            continue
        ratio = res.density / exact[0]
        worst_d = max(worst_d, ratio)
        w(f"density {done} root {root} achieved {res.density:.6f} "
          f"opt {exact[0]:.6f} ratio {ratio:.6f}")
        done += 1
    w(f"density_ratio_max {worst_d:.6f}")

    for i, (r, sig, d, x) in enumerate([(1, 1, 1, 2), (2, 2, 1, 2), (3, 2, 2, 1)]):
        inst, cover = minrep_yes(r, sig, d, split_seed(seed, "mr", i))
        g1 = reduce_plus1(inst, x)
        f1 = plus1_size_formulas(inst, x)
        counts = g1.family_counts()
        formulas_ok = (g1.n == f1["V_G"] and
                       all(counts.get(k, 0) == v for k, v in f1.items()
                           if k.startswith("E_")))
        h1 = completeness_witness_plus1(g1, cover)
        w1_ok = verify_additive(g1, h1, 1)
        bound1 = 8 * inst.n_super * inst.d_super * sig * sig + 4 * inst.n_super * x
        k = 3
        gk = reduce_plusk(inst, x, k)
        fk = plusk_size_formulas(inst, x, k)
        ck = gk.family_counts()
        fk_ok = (gk.n == fk["V_G"] and
                 all(ck.get(kk, 0) == v for kk, v in fk.items() if kk.startswith("E_")))
        hk = completeness_witness_plusk(gk, cover)
        wk_ok = verify_additive(gk, hk, k)
        all_ok = formulas_ok and w1_ok and fk_ok and wk_ok and len(h1) <= bound1
        failures += not all_ok
        w(f"reduction {i} r {r} sigma {sig} d {d} x {x} formulas {int(formulas_ok)} "
          f"witness1 {int(w1_ok)} size1 {len(h1)} bound1 {bound1} "
          f"formulas_k {int(fk_ok)} witness_k {int(wk_ok)} ok {int(all_ok)}")

    w(f"failures {failures}")
    w("suite complete")
    return failures
