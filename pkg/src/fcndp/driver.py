"""Iterated local search driver: construction + fixing, local branching as
the local search, ejection-cycle perturbation, best-solution tracking."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .heuristics import ejection_cycle, local_branching, vfh
from .instance import Instance
from .solution import Solution


@dataclass
class SolverConfig:
    gamma: float = 0.85
    delta: int | None = None  # None resolves to ceil(E / 2)
    iterations: int = 10
    seed: int = 0
    time_limit: float | None = None
    node_limit: int = 200_000

    def __post_init__(self):
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must be in (0, 1]")
        if self.delta is not None and self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.iterations < 1:
            raise ValueError("need at least one iteration")

    def resolve_delta(self, inst: Instance) -> int:
        return self.delta if self.delta is not None else math.ceil(inst.num_edges / 2)


@dataclass
class RunRecord:
    seed: int
    cost: float
    lower_bound: float
    gap: float
    trajectory: list[tuple[float, float]] = field(default_factory=list)  # (cost, elapsed s)
    wall_time_s: float = 0.0
    status: str = "ok"

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "cost": self.cost,
            "lower_bound": self.lower_bound,
            "gap": self.gap,
            "trajectory": [[c, t] for c, t in self.trajectory],
            "wall_time_s": self.wall_time_s,
            "status": self.status,
        }


def update_best(best: Solution | None, candidate: Solution) -> Solution:
    """Strictly cheaper candidate wins; ties keep the incumbent."""
    if best is None or candidate.cost < best.cost:
        return candidate
    return best


def vfhlb(inst: Instance, cfg: SolverConfig | None = None) -> tuple[Solution, RunRecord]:
    """Full solver run; deterministic given (instance, config).

    Skips the perturbation loop when the initial gap already proves
    optimality on integer data; otherwise runs the configured number of
    perturb + local-branch iterations, tracking the best solution seen.
    """
    cfg = cfg or SolverConfig()
    delta = cfg.resolve_delta(inst)
    rng = np.random.default_rng(cfg.seed)
    t0 = time.monotonic()

    def left() -> float | None:
        if cfg.time_limit is None:
            return None
        return max(cfg.time_limit - (time.monotonic() - t0), 0.05)

    def out_of_time() -> bool:
        return cfg.time_limit is not None and time.monotonic() - t0 >= cfg.time_limit

    res = vfh(inst, cfg.gamma, rng=rng, node_limit=cfg.node_limit, time_limit=left())
    status = "ok"
    current = res.solution
    bound = res.lower_bound
    best = current
    trajectory = [(best.cost, time.monotonic() - t0)]
    current = local_branching(
        inst, current, delta, node_limit=cfg.node_limit, time_limit=left()
    )
    best = update_best(best, current)
    trajectory.append((best.cost, time.monotonic() - t0))
    if abs(best.cost - bound) >= 1:
        for _ in range(cfg.iterations):
            if out_of_time():
                status = "time-limit"
                break
            current = ejection_cycle(inst, current, cfg.gamma, rng=rng)
            current = local_branching(
                inst, current, delta, node_limit=cfg.node_limit, time_limit=left()
            )
            best = update_best(best, current)
            trajectory.append((best.cost, time.monotonic() - t0))
    wall = time.monotonic() - t0
    record = RunRecord(
        seed=cfg.seed,
        cost=best.cost,
        lower_bound=bound,
        gap=best.cost - bound,
        trajectory=trajectory,
        wall_time_s=wall,
        status=status,
    )
    return best, record
