"""Construction, bounding, variable fixing, local branching and perturbation.

All randomized choices draw from a single numpy Generator passed by the
caller (an int seed is accepted and wrapped), so every operation is a
deterministic function of (inputs, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Adjacency, dijkstra, extract_path
from .instance import Instance, compute_big_m
from .milp import (
    STATUS_ITERATION_LIMIT,
    STATUS_OPTIMAL,
    BnbConfig,
    solve_bnb,
    solve_lp,
)
from .model import IntegralityPlan, MipModel, add_local_branching_cut, build_model, fix_variable_zero, full_integrality
from .solution import (
    Feasibility,
    Solution,
    close_unused_edges,
    empty_solution,
    evaluate_cost,
)

RCVF_SLACK = 1e-6


def candidate_list(inst: Instance, pending, gamma: float) -> list[int]:
    """Commodities whose quantity reaches gamma times the largest pending one.

    Never empty: the maximum always qualifies. Returned sorted by id so a
    seeded uniform draw is reproducible.
    """
    pending = sorted(int(k) for k in pending)
    if not pending:
        raise ValueError("no pending commodities")
    if not 0 < gamma <= 1:
        raise ValueError("gamma must be in (0, 1]")
    top = max(inst.commodities[k].quantity for k in pending)
    return [k for k in pending if inst.commodities[k].quantity >= gamma * top]


@dataclass
class LeaderCostBlend:
    """Routing cost mixing fixed cost (only for closed edges), per-commodity
    variable cost and edge length; alpha shifts weight from the variable
    cost toward the length."""

    inst: Instance
    alpha: float
    fixed_costs: np.ndarray

    def edge_costs(self, y_open: np.ndarray, k: int) -> np.ndarray:
        c = self.inst.edge_array("c")
        beta = self.inst.edge_array("beta")
        q = self.inst.commodities[k].quantity
        closed = np.asarray(y_open) == 0
        return (
            np.where(closed, self.fixed_costs, 0.0)
            + self.alpha * q * beta
            + (1.0 - self.alpha) * c
        )


def ejection_cost_sentinel(inst: Instance) -> float:
    """Finite stand-in for an infinite opening cost; dominates any design."""
    f_sum = float(inst.edge_array("f").sum())
    flow = float(inst.edge_array("c").sum()) * float(inst.quantity_array().sum() or 1.0)
    return 1e6 * (f_sum + flow)


def partial_decoupling(
    inst: Instance,
    gamma: float,
    rng=0,
    *,
    rounds: int = 10,
    restricted=None,
    frozen: Solution | None = None,
    fixed_cost_override=None,
    round_costs: list | None = None,
) -> Solution:
    """Constructive heuristic: route commodities one by one under a blended
    leader cost, re-route everything by length, close unused edges, and keep
    the cheapest of ``rounds`` sweeps with alpha descending from 1.

    With ``restricted`` only those commodities are leader-routed on top of
    the frozen remainder of ``frozen`` (whose other flows keep their edges
    open); ``fixed_cost_override`` replaces the opening costs in the blend
    but never in the reported cost.
    """
    rng = np.random.default_rng(rng)
    E, K = inst.num_edges, inst.num_commodities
    if K == 0:
        return empty_solution(inst)
    if restricted is not None and frozen is None:
        raise ValueError("restricted rebuild requires a frozen base solution")
    c = inst.edge_array("c")
    f_eff = (
        np.asarray(fixed_cost_override, dtype=float)
        if fixed_cost_override is not None
        else inst.edge_array("f")
    )
    leader_set = sorted(int(k) for k in restricted) if restricted is not None else list(range(K))
    base_y = np.zeros(E, dtype=np.int8)
    if frozen is not None:
        outside = [k for k in range(K) if k not in set(leader_set)]
        for k in outside:
            flow = np.asarray(frozen.x[k]).reshape(-1, 2).sum(axis=1)
            base_y[flow > 0] = 1
    full_adj = Adjacency.from_instance(inst)
    best: Solution | None = None
    for step in range(rounds):
        alpha = 1.0 - step / rounds
        blend = LeaderCostBlend(inst, alpha, f_eff)
        y = base_y.copy()
        pending = list(leader_set)
        while pending:
            cand = candidate_list(inst, pending, gamma)
            k = cand[int(rng.integers(len(cand)))]
            pending.remove(k)
            com = inst.commodities[k]
            pr = dijkstra(full_adj, com.origin, blend.edge_costs(y, k))
            for arc in extract_path(pr, com.destination):
                y[arc >> 1] = 1
        x = np.zeros((K, 2 * E), dtype=np.int8)
        open_adj = Adjacency.from_instance(inst, open_mask=y.astype(bool))
        for k, com in enumerate(inst.commodities):
            pr = dijkstra(open_adj, com.origin, c)
            x[k, extract_path(pr, com.destination)] = 1
        sol = close_unused_edges(inst, Solution(y, x, 0.0, Feasibility.FEASIBLE))
        sol.feasible = Feasibility.FEASIBLE
        if round_costs is not None:
            round_costs.append(sol.cost)
        if best is None or sol.cost < best.cost:
            best = sol
    return best


def _strengthen_bound(value: float, inst: Instance) -> float:
    # integral costs make every design cost an integer, so a fractional
    # lower bound rounds up; also absorbs simplex float noise at equality
    if inst.is_integer_data():
        return float(math.ceil(value - 1e-6))
    return value


def _is_integral(model: MipModel, values: np.ndarray, tol: float = 1e-6) -> bool:
    marked = values[model.integer_ok]
    return bool(np.all(np.abs(marked - np.round(marked)) <= tol))


def _solution_from_values(inst: Instance, model: MipModel, values: np.ndarray) -> Solution:
    E, K = inst.num_edges, inst.num_commodities
    y = np.round(model.y_values(values)).astype(np.int8)
    x = np.zeros((K, 2 * E), dtype=np.int8)
    for k in range(K):
        x[k] = np.round(model.x_values(values, k)).astype(np.int8)
    cost = evaluate_cost(inst, y, x)
    return Solution(y, x, cost, Feasibility.FEASIBLE)


@dataclass
class LboundResult:
    value: float
    opt_found: bool
    solution: Solution | None
    iterations: int


def lbound(
    inst: Instance,
    *,
    node_limit: int = 200_000,
    time_limit: float | None = None,
) -> LboundResult:
    """Progressive-integrality lower bound.

    Re-solves the relaxation while promoting every opening variable at value
    >= 0.5 to binary, for at most ceil(0.2 E) passes, stopping early on an
    integral solution (then the bound is the proven optimum) or once more
    than 90% of the opening variables are binary.
    """
    model = build_model(inst, compute_big_m(inst))
    res = solve_lp(model)
    if res.status != STATUS_OPTIMAL:
        raise RuntimeError(f"relaxation solve failed: {res.status}")
    if _is_integral(model, res.values):
        sol = close_unused_edges(inst, _solution_from_values(inst, model, res.values))
        return LboundResult(sol.cost, True, sol, 0)
    E = inst.num_edges
    max_iters = math.ceil(0.2 * E)
    plan = IntegralityPlan()
    remaining = set(range(E))
    nvbin = 0
    iterations = 0
    value = res.objective
    cfg = BnbConfig(node_limit=node_limit, time_limit=time_limit)
    while True:
        promote = [e for e in sorted(remaining) if res.values[e] >= 0.5]
        plan = plan.with_binary(promote)
        remaining -= set(promote)
        nvbin += len(promote)
        res = solve_bnb(model, plan, cfg)
        iterations += 1
        if res.status != STATUS_OPTIMAL:
            raise RuntimeError(f"bounding solve failed: {res.status}")
        value = res.objective
        if _is_integral(model, res.values):
            sol = close_unused_edges(inst, _solution_from_values(inst, model, res.values))
            return LboundResult(sol.cost, True, sol, iterations)
        if iterations >= max_iters or nvbin > 0.9 * E:
            break
    return LboundResult(_strengthen_bound(value, inst), False, None, iterations)


@dataclass
class VfhResult:
    solution: Solution
    lower_bound: float
    proven: bool
    fixed_edges: list[int] = field(default_factory=list)


def vfh(
    inst: Instance,
    gamma: float,
    rng=0,
    *,
    node_limit: int = 200_000,
    time_limit: float | None = None,
) -> VfhResult:
    """Relax-and-fix driver: construction, bounding, then one commodity's
    flow block turns binary per pass under the incumbent cutoff, with
    reduced-cost fixing of closed opening variables after each success.

    Stops when every block moved, the gap drops below one, or a pass finds
    nothing under the cutoff (the incumbent is then proven optimal).
    """
    rng = np.random.default_rng(rng)
    s_best = partial_decoupling(inst, gamma, rng=rng)
    if inst.num_commodities == 0:
        return VfhResult(s_best, 0.0, True)
    try:
        lb_res = lbound(inst, node_limit=node_limit, time_limit=time_limit)
    except RuntimeError:
        # kernel budget ran out mid-bounding: fall back to the constructive
        # incumbent and the trivial bound
        return VfhResult(s_best, 0.0, False)
    if lb_res.opt_found:
        return VfhResult(lb_res.solution, lb_res.value, True)
    min_cost = s_best.cost
    bound = lb_res.value
    model = build_model(inst, compute_big_m(inst))
    plan = IntegralityPlan()
    pending = list(range(inst.num_commodities))
    fixed_edges: list[int] = []
    cfg = BnbConfig(node_limit=node_limit, time_limit=time_limit)
    while pending and abs(min_cost - bound) >= 1:
        cand = candidate_list(inst, pending, gamma)
        k = cand[int(rng.integers(len(cand)))]
        pending.remove(k)
        plan = plan.with_binary(
            [model.x_var(k, a) for a in range(2 * inst.num_edges)]
        )
        cfg.cutoff = min_cost
        res = solve_bnb(model, plan, cfg)
        found = res.objective < math.inf
        if not found:
            break  # nothing under the cutoff: incumbent is optimal
        lp = solve_lp(model)
        if lp.status == STATUS_OPTIMAL:
            y_now = res.values[: inst.num_edges]
            for e in range(inst.num_edges):
                if model.ub[e] == 0.0 or y_now[e] > 1e-6:
                    continue
                if lp.objective + lp.reduced_costs[e] > min_cost + RCVF_SLACK:
                    model = fix_variable_zero(model, e)
                    fixed_edges.append(e)
        if _is_integral(model, res.values):
            sol = close_unused_edges(inst, _solution_from_values(inst, model, res.values))
            if sol.cost < min_cost:
                s_best = sol
                min_cost = sol.cost
        elif res.status == STATUS_OPTIMAL and res.objective > bound:
            bound = _strengthen_bound(res.objective, inst)
        if res.status == STATUS_ITERATION_LIMIT:
            break
    return VfhResult(s_best, bound, abs(min_cost - bound) < 1, fixed_edges)


def local_branching(
    inst: Instance,
    sol: Solution,
    delta: int,
    *,
    node_limit: int = 200_000,
    time_limit: float | None = None,
) -> Solution:
    """Branch-and-bound restricted to designs within Hamming distance
    ``delta`` of the incumbent design, under its cost as cutoff. Returns the
    improvement or the input unchanged."""
    model = build_model(inst, compute_big_m(inst))
    model = add_local_branching_cut(model, sol.y, delta)
    cfg = BnbConfig(cutoff=sol.cost, node_limit=node_limit, time_limit=time_limit)
    res = solve_bnb(model, full_integrality(model), cfg)
    if res.objective < math.inf and _is_integral(model, res.values):
        out = _solution_from_values(inst, model, res.values)
        if out.cost < sol.cost:
            return out
    return sol


@dataclass
class InefficiencyReport:
    ratios: dict[int, float]  # open edges carrying flow
    average: float
    inefficient: list[int]
    chains: list[list[int]]


def inefficiency_metrics(inst: Instance, sol: Solution, rng=None) -> InefficiencyReport:
    """Cost-per-crossing ratio of every used edge, the edges above average,
    and simple chains of 2..4 such edges grown from random seeds.

    Each chain is a node-simple path; edges join a chain at either endpoint
    and leave the candidate pool when consumed; single-edge chains are
    dropped.
    """
    rng = np.random.default_rng(0 if rng is None else rng)
    E = inst.num_edges
    x = np.round(np.asarray(sol.x)).astype(int)
    y = np.round(np.asarray(sol.y)).astype(int)
    crossings = x.reshape(inst.num_commodities, E, 2).sum(axis=2) if x.size else np.zeros((0, E), dtype=int)
    q = inst.quantity_array()
    beta = inst.edge_array("beta")
    f = inst.edge_array("f")
    ratios: dict[int, float] = {}
    for e in range(E):
        n_e = int(crossings[:, e].sum()) if crossings.size else 0
        if y[e] == 1 and n_e > 0:
            ratios[e] = float((beta[e] * float(q @ crossings[:, e]) + f[e]) / n_e)
    if not ratios:
        return InefficiencyReport({}, 0.0, [], [])
    average = sum(ratios.values()) / len(ratios)
    inefficient = sorted(e for e, r in ratios.items() if r > average)
    chains: list[list[int]] = []
    remaining = list(inefficient)
    while len(remaining) >= 2:
        start = remaining.pop(int(rng.integers(len(remaining))))
        edge = inst.edges[start]
        chain = [start]
        nodes = [edge.u, edge.v]  # path endpoints at positions 0 and -1
        while len(chain) < 4:
            head, tail = nodes[0], nodes[-1]
            options = []
            for cand in remaining:
                ce = inst.edges[cand]
                for a, b in ((ce.u, ce.v), (ce.v, ce.u)):
                    if a == head and b not in nodes:
                        options.append((cand, "head", b))
                    elif a == tail and b not in nodes:
                        options.append((cand, "tail", b))
            if not options:
                break
            pick, side, new_node = options[int(rng.integers(len(options)))]
            remaining.remove(pick)
            if side == "head":
                chain.insert(0, pick)
                nodes.insert(0, new_node)
            else:
                chain.append(pick)
                nodes.append(new_node)
        chains.append(chain)
    chains = [ch for ch in chains if len(ch) >= 2]
    return InefficiencyReport(ratios, average, inefficient, chains)


def ejection_cycle(
    inst: Instance,
    sol: Solution,
    gamma: float,
    rng=0,
    *,
    rounds: int = 10,
) -> Solution:
    """Perturbation: price an inefficient chain out of the design and rebuild
    the routes of the commodities crossing it; accept ties or improvements,
    otherwise keep the input."""
    rng = np.random.default_rng(rng)
    report = inefficiency_metrics(inst, sol, rng=rng)
    chains = list(report.chains)
    sentinel = ejection_cost_sentinel(inst)
    current = sol
    rebuilt_feasible = False
    while chains and not rebuilt_feasible:
        chain = chains.pop(int(rng.integers(len(chains))))
        x = np.asarray(current.x)
        k_set = [
            k
            for k in range(inst.num_commodities)
            if any(x[k, 2 * e] + x[k, 2 * e + 1] > 0 for e in chain)
        ]
        override = inst.edge_array("f")
        override[chain] = sentinel
        rebuilt = partial_decoupling(
            inst,
            gamma,
            rng=rng,
            rounds=rounds,
            restricted=k_set,
            frozen=current,
            fixed_cost_override=override,
        )
        rebuilt_feasible = rebuilt.feasible == Feasibility.FEASIBLE
        if rebuilt_feasible and rebuilt.cost <= current.cost:
            current = rebuilt
    return current
