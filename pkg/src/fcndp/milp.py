"""Self-contained LP/MIP kernel: bounded-variable primal simplex plus
branch-and-bound over the variables an IntegralityPlan marks binary.

The simplex keeps a dense tableau (desk-scale models make dense cheap),
prices with Dantzig's rule and falls back to Bland's rule after a run of
degenerate pivots. All tie-breaks are by lowest variable id, so solves are
bit-reproducible. Free variables (no finite bound on either side) are not
supported; every model built in this package bounds everything.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .model import SENSE_EQ, SENSE_GE, SENSE_LE, IntegralityPlan, MipModel

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"
STATUS_CUTOFF = "cutoff"
STATUS_ITERATION_LIMIT = "iteration-limit"

PIVOT_TOL = 1e-9
OPT_TOL = 1e-7
FEAS_TOL = 1e-7
CUTOFF_SLACK = 1e-6
_REFRESH = 64


@dataclass
class LpResult:
    status: str
    objective: float
    values: np.ndarray
    reduced_costs: np.ndarray | None = None
    basis: list[int] | None = None
    iterations: int = 0
    nodes: int = 0


@dataclass
class BnbConfig:
    integrality_tol: float = 1e-6
    node_limit: int = 200_000
    time_limit: float | None = None
    cutoff: float | None = None
    branching: str = "most-fractional"
    bound_log: list | None = None  # debug sink: (parent bound, node bound)

    def __post_init__(self):
        if self.integrality_tol <= 0:
            raise ValueError("integrality tolerance must be positive")


@dataclass
class _Standard:
    """Equality-form data: structural columns then one slack per row."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    slack_lb: np.ndarray
    slack_ub: np.ndarray
    num_vars: int


def _standardize(model: MipModel) -> _Standard:
    m, n = len(model.rows), model.num_vars
    a = np.zeros((m, n + m))
    b = np.zeros(m)
    slack_lb = np.zeros(m)
    slack_ub = np.zeros(m)
    for i, row in enumerate(model.rows):
        a[i, row.cols] = row.coefs
        a[i, n + i] = 1.0
        b[i] = row.rhs
        if row.sense == SENSE_LE:
            slack_lb[i], slack_ub[i] = 0.0, math.inf
        elif row.sense == SENSE_GE:
            slack_lb[i], slack_ub[i] = -math.inf, 0.0
        elif row.sense == SENSE_EQ:
            slack_lb[i], slack_ub[i] = 0.0, 0.0
        else:
            raise ValueError(f"unknown row sense {row.sense!r}")
    c = np.concatenate([model.obj, np.zeros(m)])
    return _Standard(a, b, c, slack_lb, slack_ub, n)


class _Simplex:
    """One solver state per call; two phases share the pivoting loop."""

    def __init__(self, std: _Standard, lb: np.ndarray, ub: np.ndarray, iter_limit: int):
        m = std.a.shape[0]
        self.m = m
        self.num_vars = std.num_vars
        self.l = np.concatenate([lb, std.slack_lb])
        self.u = np.concatenate([ub, std.slack_ub])
        if np.any(~np.isfinite(self.l) & ~np.isfinite(self.u)):
            raise ValueError("free variables are not supported")
        self.c = std.c
        self.b = std.b
        self.iter_limit = iter_limit
        self.iterations = 0

        n_all = std.a.shape[1]
        # nonbasic start: every variable at its finite bound (lower preferred)
        self.at_upper = ~np.isfinite(self.l)
        z = np.where(self.at_upper, self.u, self.l)
        resid = std.b - std.a @ z

        self.n_art = 0
        art_cols = []
        basis = []
        art_sign = []
        for i in range(m):
            lo, hi = std.slack_lb[i], std.slack_ub[i]
            need = resid[i]  # value the slack would have to take
            if lo - FEAS_TOL <= need <= hi + FEAS_TOL:
                z[std.num_vars + i] = min(max(need, lo), hi)
                basis.append(std.num_vars + i)
                art_sign.append(0.0)
            else:
                pin = lo if need < lo else hi
                z[std.num_vars + i] = pin
                art_cols.append(i)
                art_sign.append(1.0 if need - pin > 0 else -1.0)
                basis.append(n_all + len(art_cols) - 1)
        self.n_art = len(art_cols)
        a_full = std.a
        if self.n_art:
            # artificial column sign makes the basic value nonnegative
            extra = np.zeros((m, self.n_art))
            for j, i in enumerate(art_cols):
                extra[i, j] = art_sign[i]
            a_full = np.hstack([std.a, extra])
            self.l = np.concatenate([self.l, np.zeros(self.n_art)])
            self.u = np.concatenate([self.u, np.full(self.n_art, math.inf)])
            self.c = np.concatenate([self.c, np.zeros(self.n_art)])
            self.at_upper = np.concatenate([self.at_upper, np.zeros(self.n_art, dtype=bool)])
            z = np.concatenate([z, np.zeros(self.n_art)])
        self.ncols = a_full.shape[1]
        self.tableau = np.hstack([a_full.copy(), std.b.reshape(-1, 1)])
        self.basis = np.array(basis, dtype=int)
        self.in_basis = np.zeros(self.ncols, dtype=bool)
        self.in_basis[self.basis] = True
        self.values = z
        # make the starting basis the identity in the tableau
        for r, var in enumerate(self.basis):
            piv = self.tableau[r, var]
            if abs(piv - 1.0) > 0:
                self.tableau[r, :] /= piv
            col = self.tableau[:, var].copy()
            col[r] = 0.0
            if np.any(col):
                self.tableau -= np.outer(col, self.tableau[r, :])
        self._refresh_xb()

    def _refresh_xb(self):
        nonbasic = ~self.in_basis
        z_n = np.where(self.at_upper, self.u, self.l)
        z_n = np.where(np.isfinite(z_n), z_n, 0.0)
        nz = np.flatnonzero(nonbasic & (z_n != 0.0))
        xb = self.tableau[:, -1].copy()
        if nz.size:
            xb -= self.tableau[:, nz] @ z_n[nz]
        self.xb = xb
        self.values = z_n
        self.values[self.basis] = xb

    def _reduced_costs(self, cost: np.ndarray) -> np.ndarray:
        d = cost - cost[self.basis] @ self.tableau[:, :-1]
        d[self.basis] = 0.0
        return d

    def optimize(self, cost: np.ndarray) -> str:
        d = self._reduced_costs(cost)
        fixed = self.l == self.u
        bland = False
        degenerate_run = 0
        bland_after = 2 * (self.m + self.ncols)
        since_refresh = 0
        while True:
            if self.iterations >= self.iter_limit:
                return STATUS_ITERATION_LIMIT
            eligible = ~self.in_basis & ~fixed
            score = np.where(
                eligible & ~self.at_upper, -d, np.where(eligible & self.at_upper, d, 0.0)
            )
            if score.max(initial=0.0) <= OPT_TOL:
                self._refresh_xb()
                return STATUS_OPTIMAL
            if bland:
                q = int(np.flatnonzero(score > OPT_TOL)[0])
            else:
                q = int(np.argmax(score))
            sigma = -1.0 if self.at_upper[q] else 1.0
            col = self.tableau[:, q].copy()
            delta = -sigma * col
            lbb = self.l[self.basis]
            ubb = self.u[self.basis]
            with np.errstate(divide="ignore", invalid="ignore"):
                t_low = np.where(
                    delta < -PIVOT_TOL,
                    np.maximum(self.xb - lbb, 0.0) / np.where(delta < -PIVOT_TOL, -delta, 1.0),
                    math.inf,
                )
                t_high = np.where(
                    delta > PIVOT_TOL,
                    np.maximum(ubb - self.xb, 0.0) / np.where(delta > PIVOT_TOL, delta, 1.0),
                    math.inf,
                )
            t_rows = np.minimum(t_low, t_high)
            t_min_rows = t_rows.min(initial=math.inf)
            span = self.u[q] - self.l[q]
            t_own = span if math.isfinite(span) else math.inf
            t_star = min(t_min_rows, t_own)
            if math.isinf(t_star):
                return STATUS_UNBOUNDED
            self.iterations += 1
            since_refresh += 1
            if t_own <= t_min_rows + 1e-9:
                # bound flip: no basis change
                self.xb += delta * t_own
                self.at_upper[q] = ~self.at_upper[q]
                degenerate_run = 0
                continue
            cand = np.flatnonzero(t_rows <= t_star + 1e-9)
            if bland:
                r = int(cand[np.argmin(self.basis[cand])])
            else:
                order = np.lexsort((self.basis[cand], -np.abs(col[cand])))
                r = int(cand[order[0]])
            t = max(float(t_rows[r]), 0.0)
            if t <= 1e-12:
                degenerate_run += 1
                if degenerate_run > bland_after:
                    bland = True
            else:
                degenerate_run = 0
            self.xb += delta * t
            leaving = int(self.basis[r])
            self.at_upper[leaving] = delta[r] > 0
            self.in_basis[leaving] = False
            entering_val = (self.u[q] if self.at_upper[q] else self.l[q]) + sigma * t
            piv = col[r]
            row = self.tableau[r, :] / piv
            self.tableau -= np.outer(col, row)
            self.tableau[r, :] = row
            d = d - d[q] * row[:-1]
            d[q] = 0.0
            self.basis[r] = q
            self.in_basis[q] = True
            self.xb[r] = entering_val
            if since_refresh >= _REFRESH:
                since_refresh = 0
                self._refresh_xb()
                d = self._reduced_costs(cost)

    def solve(self) -> tuple[str, np.ndarray, np.ndarray]:
        if self.n_art:
            phase1 = np.zeros(self.ncols)
            phase1[self.ncols - self.n_art :] = 1.0
            status = self.optimize(phase1)
            if status != STATUS_OPTIMAL:
                return status, self.values, self._reduced_costs(self.c)
            if float(phase1 @ self.values) > FEAS_TOL * (1.0 + float(np.abs(self.b).sum())):
                return STATUS_INFEASIBLE, self.values, self._reduced_costs(self.c)
            first_art = self.ncols - self.n_art
            self.l[first_art:] = 0.0
            self.u[first_art:] = 0.0
        status = self.optimize(self.c)
        d = self._reduced_costs(self.c)
        return status, self.values, d


def solve_lp(model: MipModel, *, iteration_limit: int | None = None) -> LpResult:
    """Optimal basic solution of the LP relaxation, with reduced costs."""
    return _solve_lp_bounds(model, model.lb, model.ub, iteration_limit=iteration_limit)


def _solve_lp_bounds(
    model: MipModel,
    lb: np.ndarray,
    ub: np.ndarray,
    *,
    std: _Standard | None = None,
    iteration_limit: int | None = None,
) -> LpResult:
    if std is None:
        std = _standardize(model)
    m = std.a.shape[0]
    limit = iteration_limit or max(2000, 50 * (m + std.a.shape[1]))
    sx = _Simplex(std, np.asarray(lb, dtype=float), np.asarray(ub, dtype=float), limit)
    status, values, d = sx.solve()
    primal = values[: model.num_vars]
    objective = float(model.obj @ primal)
    return LpResult(
        status=status,
        objective=objective,
        values=primal.copy(),
        reduced_costs=d[: model.num_vars].copy(),
        basis=[int(v) for v in sx.basis],
        iterations=sx.iterations,
    )


def reduced_cost(res: LpResult, var: int) -> float:
    """Simplex reduced cost of a variable; zero for basic variables."""
    if res.reduced_costs is None:
        raise ValueError("reduced costs are only available on LP results")
    return float(res.reduced_costs[var])


def _integral_objective(model: MipModel, binary: frozenset[int]) -> bool:
    """True when every feasible point with integral marked vars has an
    integer objective, which licenses bound rounding during pruning."""
    for j in np.flatnonzero(model.obj != 0.0):
        cj = float(model.obj[j])
        if int(j) in binary:
            if not cj.is_integer():
                return False
        elif model.lb[j] == model.ub[j]:
            if not float(cj * model.lb[j]).is_integer():
                return False
        else:
            return False
    return True


def solve_bnb(model: MipModel, plan: IntegralityPlan, cfg: BnbConfig | None = None) -> LpResult:
    """Branch-and-bound over the plan's binary variables.

    Depth-first with the open list re-sorted by bound every 100 nodes;
    branches on the most fractional marked variable (ties to the lowest id).
    Nodes whose bound reaches the cutoff are pruned; with no cutoff and no
    integral point the result is infeasible.
    """
    cfg = cfg or BnbConfig()
    plan.validate(model)
    if not plan.binary:
        return solve_lp(model)
    cutoff = cfg.cutoff if cfg.cutoff is not None else model.cutoff
    binary_ids = np.array(sorted(plan.binary), dtype=int)
    std = _standardize(model)
    int_obj = _integral_objective(model, plan.binary)
    t0 = time.monotonic()

    incumbent: np.ndarray | None = None
    incumbent_obj = math.inf
    pruned_by_cutoff = False
    total_pivots = 0
    nodes_done = 0
    hit_limit = False

    stack: list[tuple[np.ndarray, np.ndarray, float]] = [
        (model.lb.copy(), model.ub.copy(), -math.inf)
    ]
    while stack:
        if nodes_done >= cfg.node_limit or (
            cfg.time_limit is not None and time.monotonic() - t0 > cfg.time_limit
        ):
            hit_limit = True
            break
        if nodes_done and nodes_done % 100 == 0:
            stack.sort(key=lambda nd: nd[2], reverse=True)
        lb, ub, parent_bound = stack.pop()
        limit = _prune_limit(cutoff, incumbent_obj, int_obj)
        if parent_bound >= limit:
            if cutoff is not None and parent_bound >= cutoff - CUTOFF_SLACK:
                pruned_by_cutoff = True
            continue
        res = _solve_lp_bounds(model, lb, ub, std=std)
        nodes_done += 1
        total_pivots += res.iterations
        if res.status == STATUS_INFEASIBLE:
            continue
        if res.status == STATUS_UNBOUNDED:
            return LpResult(STATUS_UNBOUNDED, -math.inf, res.values, None, None, total_pivots, nodes_done)
        if res.status == STATUS_ITERATION_LIMIT:
            hit_limit = True
            continue
        bound = res.objective
        if cfg.bound_log is not None:
            cfg.bound_log.append((parent_bound, bound))
        if bound >= limit:
            if cutoff is not None and bound >= cutoff - CUTOFF_SLACK:
                pruned_by_cutoff = True
            continue
        vals = res.values[binary_ids]
        frac = np.abs(vals - np.round(vals))
        if frac.max(initial=0.0) <= cfg.integrality_tol:
            z = res.values.copy()
            z[binary_ids] = np.round(z[binary_ids])
            obj = float(model.obj @ z)
            if obj < incumbent_obj and (cutoff is None or obj < cutoff - CUTOFF_SLACK):
                incumbent = z
                incumbent_obj = obj
            continue
        j = int(binary_ids[int(np.argmax(frac))])
        v = res.values[j]
        lo_lb, lo_ub = lb.copy(), ub.copy()
        lo_ub[j] = 0.0
        hi_lb, hi_ub = lb.copy(), ub.copy()
        hi_lb[j] = 1.0
        down = (lo_lb, lo_ub, bound)
        up = (hi_lb, hi_ub, bound)
        if v >= 0.5:
            stack.append(down)
            stack.append(up)
        else:
            stack.append(up)
            stack.append(down)

    if incumbent is not None:
        status = STATUS_ITERATION_LIMIT if hit_limit else STATUS_OPTIMAL
        return LpResult(status, incumbent_obj, incumbent, None, None, total_pivots, nodes_done)
    if hit_limit:
        return LpResult(STATUS_ITERATION_LIMIT, math.inf, model.lb.copy(), None, None, total_pivots, nodes_done)
    if pruned_by_cutoff:
        return LpResult(STATUS_CUTOFF, math.inf, model.lb.copy(), None, None, total_pivots, nodes_done)
    return LpResult(STATUS_INFEASIBLE, math.inf, model.lb.copy(), None, None, total_pivots, nodes_done)


def _prune_limit(cutoff: float | None, incumbent_obj: float, int_obj: bool) -> float:
    """Smallest bound a node may have and still be worth expanding."""
    limit = math.inf
    if cutoff is not None:
        limit = cutoff - CUTOFF_SLACK
    if incumbent_obj < math.inf:
        step = 1.0 - CUTOFF_SLACK if int_obj else CUTOFF_SLACK
        limit = min(limit, incumbent_obj - step)
    return limit
