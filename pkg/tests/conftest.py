import numpy as np
import pytest

from fcndp.instance import Commodity, Edge, Instance
from fcndp.solution import Feasibility, Solution


@pytest.fixture
def worked() -> Instance:
    """Three nodes, three edges, one commodity of quantity 2 from 0 to 2.

    All eight designs by hand: {(0,2)} costs 8 + 2*1 = 10 (path length 3),
    {(0,1),(1,2)} costs 10 + 2*2 = 14, all three open costs 18 + 4 = 22
    (follower takes the length-2 route), everything else disconnects the
    commodity. Optimum 10.
    """
    return Instance(
        3,
        (Edge(0, 1, 1, 5, 1), Edge(1, 2, 1, 5, 1), Edge(0, 2, 3, 8, 1)),
        (Commodity(0, 2, 2),),
        name="worked",
    )


def make_solution(inst: Instance, open_edges, arcs_by_commodity) -> Solution:
    """Hand-built solution: arcs as (tail, head) node pairs."""
    arc_of = {}
    for e, edge in enumerate(inst.edges):
        arc_of[(edge.u, edge.v)] = 2 * e
        arc_of[(edge.v, edge.u)] = 2 * e + 1
    y = np.zeros(inst.num_edges, dtype=np.int8)
    y[list(open_edges)] = 1
    x = np.zeros((inst.num_commodities, 2 * inst.num_edges), dtype=np.int8)
    for k, arcs in arcs_by_commodity.items():
        for pair in arcs:
            x[k, arc_of[pair]] = 1
    from fcndp.solution import evaluate_cost

    return Solution(y, x, evaluate_cost(inst, y, x), Feasibility.FEASIBLE)
