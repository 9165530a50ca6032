"""Sparse linear programs, a small deterministic simplex, and the
relaxation builders used by the approximation algorithms.

All variables are nonnegative reals and objectives are minimized.  Two
interchangeable engines solve a model: a self-contained two-phase dense
simplex (Dantzig pricing with a Bland fallback once pivoting stalls, so
cycling cannot occur), and scipy's HiGHS dual simplex.  Both return
basic (vertex) optimal solutions and both are deterministic; 'auto'
picks HiGHS for speed when scipy is importable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import LpNumericalError, UnreachablePairError
from .graph import INF, Demand, DemandSet, Graph, effective_bound, local_graph, validate_demands

FEAS_TOL = 1e-7
NONNEG_TOL = 1e-9

try:
    from scipy.optimize import linprog as _scipy_linprog
except ImportError:  # pragma: no cover
    _scipy_linprog = None


class LpModel:
    """Minimization LP over named nonnegative variables."""

    def __init__(self, name: str = "lp"):
        self.name = name
        self.var_names: list[str] = []
        self.obj: list[float] = []
        self._index: dict[str, int] = {}
        # each constraint: (list[(var_idx, coef)], sense in {"<=", ">=", "=="}, rhs)
        self.constraints: list[tuple[list[tuple[int, float]], str, float]] = []

    def add_var(self, name: str, obj: float = 0.0) -> int:
        if name in self._index:
            raise ValueError(f"duplicate variable {name!r}")
        idx = len(self.var_names)
        self.var_names.append(name)
        self.obj.append(float(obj))
        self._index[name] = idx
        return idx

    def var(self, name: str) -> int:
        return self._index[name]

    @property
    def n_vars(self) -> int:
        return len(self.var_names)

    def add_constraint(self, coefs: Iterable[tuple[int, float]], sense: str, rhs: float):
        if sense not in ("<=", ">=", "=="):
            raise ValueError(f"bad sense {sense!r}")
        merged: dict[int, float] = {}
        for idx, c in coefs:
            if not (0 <= idx < self.n_vars):
                raise ValueError(f"constraint references undeclared variable {idx}")
            merged[idx] = merged.get(idx, 0.0) + float(c)
        row = sorted(merged.items())
        self.constraints.append((row, sense, float(rhs)))

    def write_lp(self, fp):
        """Dump in the CPLEX-style LP text interchange format."""
        fp.write("Minimize\n obj:")
        terms = [(c, self.var_names[i]) for i, c in enumerate(self.obj) if c != 0.0]
        if not terms:
            fp.write(" 0 " + self.var_names[0] if self.var_names else " 0")
        for c, name in terms:
            fp.write(f" {'+' if c >= 0 else '-'} {abs(c):.12g} {name}")
        fp.write("\nSubject To\n")
        for ci, (row, sense, rhs) in enumerate(self.constraints):
            fp.write(f" c{ci}:")
            for idx, c in row:
                fp.write(f" {'+' if c >= 0 else '-'} {abs(c):.12g} {self.var_names[idx]}")
            op = {"<=": "<=", ">=": ">=", "==": "="}[sense]
            fp.write(f" {op} {rhs:.12g}\n")
        fp.write("Bounds\n")
        for name in self.var_names:
            fp.write(f" 0 <= {name}\n")
        fp.write("End\n")


@dataclass
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    values: np.ndarray | None
    objective: float | None
    model: LpModel

    def __getitem__(self, name: str) -> float:
        return float(self.values[self.model.var(name)])

    def value_of(self, idx: int) -> float:
        return float(self.values[idx])


def _to_standard(model: LpModel):
    """Rows as dense arrays with nonnegative rhs; senses normalized."""
    m = len(model.constraints)
    n = model.n_vars
    a = np.zeros((m, n))
    senses = []
    b = np.zeros(m)
    for i, (row, sense, rhs) in enumerate(model.constraints):
        for idx, c in row:
            a[i, idx] = c
        if rhs < 0:
            a[i] = -a[i]
            rhs = -rhs
            sense = {"<=": ">=", ">=": "<=", "==": "=="}[sense]
        senses.append(sense)
        b[i] = rhs
    return a, senses, b


def _run_phase(tab: np.ndarray, basis: np.ndarray, cost: np.ndarray) -> str:
    """Pivot tab in place until optimal or unbounded for min cost'x.

    Dantzig pricing, switching permanently to Bland's rule once the
    objective stalls, so degenerate cycling cannot occur.  Ties in the
    ratio test leave the smallest basis variable.
    """
    m = tab.shape[0]
    zrow = -cost.astype(float).copy()
    for i in range(m):
        if cost[basis[i]] != 0.0:
            zrow += cost[basis[i]] * tab[i, :-1]
    stall = 0
    use_bland = False
    last_obj = float(sum(cost[basis[i]] * tab[i, -1] for i in range(m)))
    for _ in range(100000):
        if use_bland:
            pos = np.nonzero(zrow > FEAS_TOL)[0]
            if pos.size == 0:
                return "optimal"
            enter = int(pos[0])
        else:
            enter = int(np.argmax(zrow))
            if zrow[enter] <= FEAS_TOL:
                return "optimal"
        colv = tab[:, enter]
        mask = colv > 1e-10
        if not mask.any():
            return "unbounded"
        ratios = np.full(m, np.inf)
        ratios[mask] = tab[mask, -1] / colv[mask]
        best = ratios.min()
        rows = np.nonzero(ratios <= best + 1e-12)[0]
        leave = int(rows[np.argmin(basis[rows])])
        piv = tab[leave, enter]
        tab[leave] /= piv
        for i in range(m):
            if i != leave and tab[i, enter] != 0.0:
                tab[i] -= tab[i, enter] * tab[leave]
        zrow = zrow - zrow[enter] * tab[leave, :-1]
        zrow[enter] = 0.0
        basis[leave] = enter
        cur = float(sum(cost[basis[i]] * tab[i, -1] for i in range(m)))
        if cur >= last_obj - 1e-12:
            stall += 1
            if stall > 2 * (m + tab.shape[1]):
                use_bland = True
        else:
            stall = 0
        last_obj = cur
    raise LpNumericalError("simplex iteration limit exceeded")


def _solve_simplex(model: LpModel) -> LpSolution:
    a, senses, b = _to_standard(model)
    m, n = a.shape
    c = np.asarray(model.obj, dtype=float)

    # columns: structural | slack/surplus | artificial
    n_slack = sum(1 for s in senses if s != "==")
    struct = n + n_slack
    cols = struct
    art_of_row: dict[int, int] = {}
    slack_of_row: dict[int, int] = {}
    ext = np.zeros((m, struct))
    ext[:, :n] = a
    col = n
    for i, s in enumerate(senses):
        if s == "<=":
            ext[i, col] = 1.0
            slack_of_row[i] = col
            col += 1
        elif s == ">=":
            ext[i, col] = -1.0
            col += 1
            art_of_row[i] = -1
        else:
            art_of_row[i] = -1
    for i in sorted(art_of_row):
        art_of_row[i] = cols
        cols += 1
    tab = np.zeros((m, cols + 1))
    tab[:, :struct] = ext
    for i, j in art_of_row.items():
        tab[i, j] = 1.0
    tab[:, -1] = b
    basis = np.array([art_of_row.get(i, slack_of_row.get(i, -1)) for i in range(m)],
                     dtype=int)

    if art_of_row:
        cost1 = np.zeros(cols)
        for j in art_of_row.values():
            cost1[j] = 1.0
        if _run_phase(tab, basis, cost1) == "unbounded":  # pragma: no cover
            raise LpNumericalError("phase-1 unbounded")
        phase1 = float(sum(cost1[basis[i]] * tab[i, -1] for i in range(m)))
        if phase1 > FEAS_TOL:
            return LpSolution("infeasible", None, None, model)
        # drive artificials out of the basis; rows that cannot pivot are redundant
        art_set = set(art_of_row.values())
        drop_rows = []
        for i in range(m):
            if basis[i] in art_set:
                pivot_col = -1
                for j in range(struct):
                    if abs(tab[i, j]) > 1e-9:
                        pivot_col = j
                        break
                if pivot_col < 0:
                    drop_rows.append(i)
                    continue
                piv = tab[i, pivot_col]
                tab[i] /= piv
                for k in range(m):
                    if k != i and tab[k, pivot_col] != 0.0:
                        tab[k] -= tab[k, pivot_col] * tab[i]
                basis[i] = pivot_col
        if drop_rows:
            keep = [i for i in range(m) if i not in set(drop_rows)]
            tab = tab[keep]
            basis = basis[keep]
            m = len(keep)
        tab = np.hstack([tab[:, :struct], tab[:, -1:]])

    cost2 = np.zeros(struct)
    cost2[:n] = c
    if _run_phase(tab, basis, cost2) == "unbounded":
        return LpSolution("unbounded", None, None, model)
    x = np.zeros(struct)
    x[basis] = tab[:, -1]
    vals = x[:n]
    if vals.min(initial=0.0) < -1e-6:
        raise LpNumericalError("negative variable beyond tolerance")
    vals = np.where(vals < 0, 0.0, vals)
    return LpSolution("optimal", vals, float(c @ vals), model)


def _solve_highs(model: LpModel) -> LpSolution:
    a, senses, b = _to_standard(model)
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for i, s in enumerate(senses):
        if s == "<=":
            a_ub.append(a[i])
            b_ub.append(b[i])
        elif s == ">=":
            a_ub.append(-a[i])
            b_ub.append(-b[i])
        else:
            a_eq.append(a[i])
            b_eq.append(b[i])
    res = _scipy_linprog(
        np.asarray(model.obj, dtype=float),
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=(0, None),
        method="highs-ds",
    )
    if res.status == 0:
        vals = np.where(res.x < 0, 0.0, res.x)
        return LpSolution("optimal", vals, float(np.dot(model.obj, vals)), model)
    if res.status == 2:
        return LpSolution("infeasible", None, None, model)
    if res.status == 3:
        return LpSolution("unbounded", None, None, model)
    raise LpNumericalError(f"HiGHS failure: {res.message}")


def solve(model: LpModel, method: str = "auto") -> LpSolution:
    """Solve a model; status is exact per LP theory.

    Numerical failures raise LpNumericalError instead of being folded
    into the infeasible status.
    """
    if not model.var_names:
        return LpSolution("optimal", np.zeros(0), 0.0, model)
    if method == "auto":
        method = "highs" if _scipy_linprog is not None else "simplex"
    if method == "simplex":
        return _solve_simplex(model)
    if method == "highs":
        if _scipy_linprog is None:
            raise LpNumericalError("scipy not available for method='highs'")
        return _solve_highs(model)
    raise ValueError(f"unknown method {method!r}")


def check_feasible(model: LpModel, values: Mapping[int, float] | np.ndarray,
                   tol: float = FEAS_TOL) -> bool:
    """Whether an assignment satisfies every constraint within tol."""
    if isinstance(values, np.ndarray):
        get = lambda i: float(values[i])
    else:
        get = lambda i: float(values.get(i, 0.0))
    for row, sense, rhs in model.constraints:
        lhs = sum(c * get(i) for i, c in row)
        if sense == "<=" and lhs > rhs + tol:
            return False
        if sense == ">=" and lhs < rhs - tol:
            return False
        if sense == "==" and abs(lhs - rhs) > tol:
            return False
    return True


# ---------------------------------------------------------------------------
# relaxation builders


class PreserverLp:
    """Edge-flow relaxation for exact-distance demands.

    One unit of s->t flow per pair, routed inside the pair's local graph
    (a DAG, so any unit flow decomposes into shortest s->t paths), with
    per-pair flow on an edge capped by the shared edge variable x_e.
    Objective: sum of x_e.
    """

    def __init__(self, g: Graph, demands: DemandSet):
        validate_demands(g, demands)
        self.g = g
        self.demands = demands
        self.model = LpModel("preserver")
        self.x_var: dict[int, int] = {}
        self.flow_var: dict[tuple[int, int], int] = {}
        locals_ = [local_graph(g, d.s, d.t) for d in demands]
        used_edges = sorted({e for lg in locals_ for e in lg.edge_ids})
        for e in used_edges:
            self.x_var[e] = self.model.add_var(f"x_{e}", obj=1.0)
        for i, lg in enumerate(locals_):
            for e in lg.edge_ids:
                self.flow_var[(i, e)] = self.model.add_var(f"f_{i}_{e}")
        for i, lg in enumerate(locals_):
            d = demands[i]
            out_at: dict[int, list[int]] = {}
            in_at: dict[int, list[int]] = {}
            for e in lg.edge_ids:
                u, v = g.edges[e]
                out_at.setdefault(u, []).append(e)
                in_at.setdefault(v, []).append(e)
                self.model.add_constraint(
                    [(self.flow_var[(i, e)], 1.0), (self.x_var[e], -1.0)], "<=", 0.0)
            self.model.add_constraint(
                [(self.flow_var[(i, e)], 1.0) for e in out_at.get(d.s, [])], "==", 1.0)
            for w in lg.vertices:
                if w == d.s or w == d.t:
                    continue
                coefs = [(self.flow_var[(i, e)], 1.0) for e in in_at.get(w, [])]
                coefs += [(self.flow_var[(i, e)], -1.0) for e in out_at.get(w, [])]
                self.model.add_constraint(coefs, "==", 0.0)

    def x_values(self, sol: LpSolution) -> dict[int, float]:
        return {e: sol.value_of(idx) for e, idx in self.x_var.items()}


class FlowLp:
    """Connectivity relaxation: shared capacities support one unit of
    s->t flow for every pair, over the whole graph."""

    def __init__(self, g: Graph, demands: DemandSet):
        validate_demands(g, demands)
        self.g = g
        self.demands = demands
        self.model = LpModel("flow")
        self.x_var = {e: self.model.add_var(f"x_{e}", obj=1.0) for e in range(g.m)}
        self.flow_var: dict[tuple[int, int], int] = {}
        for i, d in enumerate(demands):
            # restrict to edges on some s->t walk: reachable from s and co-reachable to t
            ds = g.dist_from(d.s)
            dt = g.dist_to(d.t)
            pair_edges = [e for e, (u, v) in enumerate(g.edges)
                          if ds[u] < INF and dt[v] < INF]
            for e in pair_edges:
                self.flow_var[(i, e)] = self.model.add_var(f"f_{i}_{e}")
                self.model.add_constraint(
                    [(self.flow_var[(i, e)], 1.0), (self.x_var[e], -1.0)], "<=", 0.0)
            out_at: dict[int, list[int]] = {}
            in_at: dict[int, list[int]] = {}
            for e in pair_edges:
                u, v = g.edges[e]
                out_at.setdefault(u, []).append(e)
                in_at.setdefault(v, []).append(e)
            coefs = [(self.flow_var[(i, e)], 1.0) for e in out_at.get(d.s, [])]
            coefs += [(self.flow_var[(i, e)], -1.0) for e in in_at.get(d.s, [])]
            self.model.add_constraint(coefs, "==", 1.0)
            for w in range(g.n):
                if w == d.s or w == d.t:
                    continue
                coefs = [(self.flow_var[(i, e)], 1.0) for e in in_at.get(w, [])]
                coefs += [(self.flow_var[(i, e)], -1.0) for e in out_at.get(w, [])]
                if coefs:
                    self.model.add_constraint(coefs, "==", 0.0)

    def x_values(self, sol: LpSolution) -> dict[int, float]:
        return {e: sol.value_of(idx) for e, idx in self.x_var.items()}

    def pair_support(self, sol: LpSolution, i: int, tol: float = 1e-9) -> set[int]:
        """Vertices carrying positive flow for pair i (includes s and t)."""
        d = self.demands[i]
        verts = {d.s, d.t}
        for (j, e), idx in self.flow_var.items():
            if j == i and sol.value_of(idx) > tol:
                u, v = self.g.edges[e]
                verts.add(u)
                verts.add(v)
        return verts


class LayeredLp:
    """Bounded-hop flow relaxation on the implicit layered graph.

    Layer vertices (v, j) for j = 0..D0; move arcs follow graph edges
    between consecutive layers and stay arcs (u,j-1)->(u,j) model waiting
    without consuming capacity.  Each pair ships at most one unit from
    (s,0) to (t, L) where L = D0, or min(D0, bound) when per_pair is set;
    total shipped flow must reach |P|/2.
    """

    def __init__(self, g: Graph, demands: DemandSet, d0: int, per_pair: bool = False):
        if d0 < 1:
            raise ValueError("D0 must be >= 1")
        validate_demands(g, demands)
        self.g = g
        self.demands = demands
        self.d0 = d0
        self.per_pair = per_pair
        self.model = LpModel("layered")
        self.x_var = {e: self.model.add_var(f"x_{e}", obj=1.0) for e in range(g.m)}
        # arc key: (pair, edge_or_None_for_stay, u, j) meaning (u,j-1)->(v,j)
        self.arc_var: dict[tuple[int, int | None, int, int], int] = {}
        self.sink_layer: list[int] = []
        sink_in: dict[int, list[int]] = {}
        for i, d in enumerate(demands):
            bound = effective_bound(g, d)
            lim = d0 if not per_pair else int(min(d0, bound))
            self.sink_layer.append(lim)
            ds = g.dist_from(d.s)
            dt = g.dist_to(d.t)

            def alive(v: int, j: int) -> bool:
                return ds[v] <= j and dt[v] <= lim - j

            in_at: dict[tuple[int, int], list[int]] = {}
            out_at: dict[tuple[int, int], list[int]] = {}
            for j in range(1, lim + 1):
                for e, (u, v) in enumerate(g.edges):
                    if alive(u, j - 1) and alive(v, j):
                        idx = self.model.add_var(f"f_{i}_e{e}_j{j}")
                        self.arc_var[(i, e, u, j)] = idx
                        out_at.setdefault((u, j - 1), []).append(idx)
                        in_at.setdefault((v, j), []).append(idx)
                for u in range(g.n):
                    if alive(u, j - 1) and alive(u, j):
                        idx = self.model.add_var(f"f_{i}_stay{u}_j{j}")
                        self.arc_var[(i, None, u, j)] = idx
                        out_at.setdefault((u, j - 1), []).append(idx)
                        in_at.setdefault((u, j), []).append(idx)
            for e in range(g.m):
                coefs = [(self.arc_var[(i, e, g.edges[e][0], j)], 1.0)
                         for j in range(1, lim + 1)
                         if (i, e, g.edges[e][0], j) in self.arc_var]
                if coefs:
                    self.model.add_constraint(coefs + [(self.x_var[e], -1.0)], "<=", 0.0)
            src_out = out_at.get((d.s, 0), [])
            self.model.add_constraint([(idx, 1.0) for idx in src_out], "<=", 1.0)
            for j in range(1, lim + 1):
                for v in range(g.n):
                    if (v, j) == (d.t, lim):
                        continue
                    ins = in_at.get((v, j), [])
                    outs = out_at.get((v, j), [])
                    if ins or outs:
                        coefs = [(idx, 1.0) for idx in ins] + [(idx, -1.0) for idx in outs]
                        self.model.add_constraint(coefs, "==", 0.0)
            sink_in[i] = in_at.get((d.t, lim), [])
        total = [(idx, 1.0) for arcs in sink_in.values() for idx in arcs]
        self.model.add_constraint(total, ">=", len(demands) / 2.0)
        self._sink_in = sink_in

    def x_values(self, sol: LpSolution) -> dict[int, float]:
        return {e: sol.value_of(idx) for e, idx in self.x_var.items()}

    def flow_value(self, sol: LpSolution, i: int) -> float:
        return sum(sol.value_of(idx) for idx in self._sink_in[i])

    def pair_support(self, sol: LpSolution, i: int, tol: float = 1e-9) -> set[int]:
        """Original vertices involved in pair i's flow (any layer copy)."""
        d = self.demands[i]
        verts = {d.s, d.t}
        for (j, e, u, layer), idx in self.arc_var.items():
            if j != i or e is None:
                continue
            if sol.value_of(idx) > tol:
                uu, vv = self.g.edges[e]
                verts.add(uu)
                verts.add(vv)
        return verts


def build_preserver_lp(g: Graph, demands: DemandSet) -> PreserverLp:
    return PreserverLp(g, demands)


def build_flow_lp(g: Graph, demands: DemandSet) -> FlowLp:
    return FlowLp(g, demands)


def build_layered_lp(g: Graph, demands: DemandSet, d0: int, per_pair: bool = False) -> LayeredLp:
    return LayeredLp(g, demands, d0, per_pair)
