"""Sparse assembly of the one-level design/routing MIP.

Variables, in id order: one opening indicator ``y_e`` per edge, one flow
indicator ``x`` per commodity and arc, and one shortest-distance potential
``pi`` per commodity and node (the destination's potential is fixed to 0
through its bounds). Rows: per-commodity flow conservation (equalities),
flow/opening coupling, and the lifted big-M optimality rows that force every
routed path to be shortest in the open network, one per arc direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .instance import BigM, Instance

SENSE_LE = "<="
SENSE_GE = ">="
SENSE_EQ = "="


@dataclass
class Row:
    cols: np.ndarray
    coefs: np.ndarray
    sense: str
    rhs: float
    name: str = ""


@dataclass
class MipModel:
    num_vars: int
    obj: np.ndarray
    lb: np.ndarray
    ub: np.ndarray
    kinds: list[str]  # "y" | "x" | "pi"
    integer_ok: np.ndarray  # bool mask: y and x variables
    rows: list[Row]
    num_edges: int
    num_commodities: int
    num_nodes: int
    cut_row: int | None = None
    cutoff: float | None = None
    names: list[str] = field(default_factory=list)

    def y_var(self, e: int) -> int:
        return e

    def x_var(self, k: int, arc: int) -> int:
        return self.num_edges + 2 * self.num_edges * k + arc

    def pi_var(self, k: int, node: int) -> int:
        return self.num_edges * (1 + 2 * self.num_commodities) + self.num_nodes * k + node

    def y_values(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values)[: self.num_edges]

    def x_values(self, values: np.ndarray, k: int) -> np.ndarray:
        start = self.x_var(k, 0)
        return np.asarray(values)[start : start + 2 * self.num_edges]

    def copy(self) -> "MipModel":
        return replace(
            self,
            obj=self.obj.copy(),
            lb=self.lb.copy(),
            ub=self.ub.copy(),
            kinds=list(self.kinds),
            integer_ok=self.integer_ok.copy(),
            rows=list(self.rows),
            names=list(self.names),
        )


@dataclass(frozen=True)
class IntegralityPlan:
    """Split of the y/x variables into relaxed and binary-restricted sets."""

    binary: frozenset[int] = frozenset()

    def relaxed(self, model: MipModel) -> frozenset[int]:
        eligible = frozenset(int(v) for v in np.flatnonzero(model.integer_ok))
        return eligible - self.binary

    def validate(self, model: MipModel) -> None:
        for v in self.binary:
            if not model.integer_ok[v]:
                raise ValueError(f"variable {v} ({model.kinds[v]}) cannot be made binary")

    def with_binary(self, vars_: "frozenset[int] | set[int] | list[int]") -> "IntegralityPlan":
        return IntegralityPlan(self.binary | frozenset(int(v) for v in vars_))


def all_relaxed() -> IntegralityPlan:
    return IntegralityPlan()


def full_integrality(model: MipModel) -> IntegralityPlan:
    return IntegralityPlan(frozenset(int(v) for v in np.flatnonzero(model.integer_ok)))


def build_model(inst: Instance, big_m: BigM) -> MipModel:
    E, K, V = inst.num_edges, inst.num_commodities, inst.nodes
    num_vars = E + 2 * E * K + V * K
    obj = np.zeros(num_vars)
    lb = np.zeros(num_vars)
    ub = np.ones(num_vars)
    kinds = ["y"] * E + ["x"] * (2 * E * K) + ["pi"] * (V * K)
    names = [f"y_{e}" for e in range(E)]
    c = inst.edge_array("c")
    pot_cap = float(c.sum())

    model = MipModel(
        num_vars=num_vars,
        obj=obj,
        lb=lb,
        ub=ub,
        kinds=kinds,
        integer_ok=np.array([k in ("y", "x") for k in kinds]),
        rows=[],
        num_edges=E,
        num_commodities=K,
        num_nodes=V,
        names=names,
    )

    for e, edge in enumerate(inst.edges):
        obj[model.y_var(e)] = edge.f
    for k, com in enumerate(inst.commodities):
        for e, edge in enumerate(inst.edges):
            g = com.quantity * edge.beta
            obj[model.x_var(k, 2 * e)] = g
            obj[model.x_var(k, 2 * e + 1)] = g
            names.append(f"x_{k}_{edge.u}_{edge.v}")
            names.append(f"x_{k}_{edge.v}_{edge.u}")
    for k, com in enumerate(inst.commodities):
        for i in range(V):
            ub[model.pi_var(k, i)] = 0.0 if i == com.destination else pot_cap
            names.append(f"pi_{k}_{i}")

    rows = model.rows
    for k, com in enumerate(inst.commodities):
        for i in range(V):
            cols, coefs = [], []
            for e, edge in enumerate(inst.edges):
                if edge.u == i:
                    cols += [model.x_var(k, 2 * e), model.x_var(k, 2 * e + 1)]
                    coefs += [1.0, -1.0]
                elif edge.v == i:
                    cols += [model.x_var(k, 2 * e), model.x_var(k, 2 * e + 1)]
                    coefs += [-1.0, 1.0]
            rhs = 1.0 if i == com.origin else (-1.0 if i == com.destination else 0.0)
            rows.append(
                Row(np.array(cols, dtype=int), np.array(coefs), SENSE_EQ, rhs, f"flow_{k}_{i}")
            )
    for k in range(K):
        for e in range(E):
            rows.append(
                Row(
                    np.array([model.x_var(k, 2 * e), model.x_var(k, 2 * e + 1), model.y_var(e)]),
                    np.array([1.0, 1.0, -1.0]),
                    SENSE_LE,
                    0.0,
                    f"couple_{k}_{e}",
                )
            )
    for k in range(K):
        for e, edge in enumerate(inst.edges):
            m_e = big_m[e]
            for arc in (2 * e, 2 * e + 1):
                tail, head = (edge.u, edge.v) if arc == 2 * e else (edge.v, edge.u)
                rows.append(
                    Row(
                        np.array(
                            [
                                model.pi_var(k, tail),
                                model.pi_var(k, head),
                                model.y_var(e),
                                model.x_var(k, arc ^ 1),
                            ]
                        ),
                        np.array([1.0, -1.0, m_e - edge.c, 2.0 * edge.c]),
                        SENSE_LE,
                        m_e,
                        f"opt_{k}_{tail}_{head}",
                    )
                )
    return model


def add_local_branching_cut(model: MipModel, ybar, delta: int) -> MipModel:
    """Hamming-ball cut around the design ``ybar``: at most ``delta`` flips.

    Only the opening variables enter the row; flow variables stay free. A
    second call replaces the previous cut.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    ybar = np.round(np.asarray(ybar)).astype(int)
    if ybar.shape != (model.num_edges,):
        raise ValueError("design vector length mismatch")
    out = model.copy()
    if out.cut_row is not None:
        out.rows = out.rows[: out.cut_row] + out.rows[out.cut_row + 1 :]
        out.cut_row = None
    cols = np.arange(model.num_edges)
    coefs = np.where(ybar == 0, 1.0, -1.0)
    rhs = float(delta - int(ybar.sum()))
    out.cut_row = len(out.rows)
    out.rows = out.rows + [Row(cols, coefs, SENSE_LE, rhs, "local_branching")]
    return out


def fix_variable_zero(model: MipModel, var: int) -> MipModel:
    """Stamp a variable's upper bound to zero (idempotent)."""
    if not (0 <= var < model.num_vars):
        raise ValueError(f"unknown variable id {var}")
    out = model.copy()
    out.ub[var] = 0.0
    return out


def export_text(model: MipModel) -> str:
    """Fixed-format text dump for external cross-checks.

    Layout: a header line ``vars N rows M``, then one line per variable
    ``var <name> <lb> <ub> <obj> <kind>`` and one line per row
    ``row <name> <sense> <rhs> <name>*<coef> ...``.
    """
    lines = [f"vars {model.num_vars} rows {len(model.rows)}"]
    for v in range(model.num_vars):
        lines.append(
            f"var {model.names[v]} {model.lb[v]:g} {model.ub[v]:g} "
            f"{model.obj[v]:g} {model.kinds[v]}"
        )
    for row in model.rows:
        terms = " ".join(
            f"{model.names[int(cv)]}*{co:g}" for cv, co in zip(row.cols, row.coefs)
        )
        lines.append(f"row {row.name} {row.sense} {row.rhs:g} {terms}")
    return "\n".join(lines) + "\n"
