import numpy as np
import pytest

from fcndp.instance import Commodity, Edge, Instance, generate_instance
from fcndp.oracle import oracle_solution, solve_exact
from fcndp.solution import verify_bilevel


def test_worked_instance(worked):
    res = solve_exact(worked)
    assert res.cost == 10.0
    assert res.y.tolist() == [0, 0, 1]
    # designs keeping 0 and 2 connected: {02}, {01,12}, {01,02}, {12,02}, all
    assert res.feasible_designs == 5
    sol = oracle_solution(worked, res)
    assert sol.cost == 10.0
    assert verify_bilevel(worked, sol).passed


def test_no_commodities(worked):
    inst = Instance(worked.nodes, worked.edges, ())
    res = solve_exact(inst)
    assert res.cost == 0.0
    assert res.y.sum() == 0
    assert res.feasible_designs == 8


def test_star_forced_paths():
    # leaf commodities through the hub: unique paths, zero design freedom
    inst = Instance(
        4,
        (Edge(0, 1, 2, 7, 1), Edge(0, 2, 3, 11, 2), Edge(0, 3, 4, 13, 3)),
        (Commodity(1, 2, 2), Commodity(2, 3, 1)),
    )
    res = solve_exact(inst)
    fixed = 7 + 11 + 13
    variable = 2 * (1 + 2) + 1 * (2 + 3)
    assert res.cost == fixed + variable
    assert res.y.tolist() == [1, 1, 1]


def test_limit_guard(worked):
    with pytest.raises(ValueError, match="limit"):
        solve_exact(worked, limit=2)


def test_integer_length_guard():
    inst = Instance(2, (Edge(0, 1, 1.5, 1, 1),), (Commodity(0, 1, 1),))
    with pytest.raises(ValueError, match="integer edge lengths"):
        solve_exact(inst)


def test_optimistic_tie_breaking():
    # two routes of equal length; the cheaper-to-ship one must be chosen
    inst = Instance(
        4,
        (
            Edge(0, 1, 1, 0, 5),
            Edge(1, 3, 1, 0, 5),
            Edge(0, 2, 1, 0, 1),
            Edge(2, 3, 1, 0, 1),
        ),
        (Commodity(0, 3, 1),),
    )
    res = solve_exact(inst)
    assert res.cost == 2.0  # beta 1+1, all fixed costs zero
    sol = oracle_solution(inst, res)
    assert verify_bilevel(inst, sol).passed
    # follower path length equals the open-network shortest distance
    routed = [a for a in np.flatnonzero(res.x[0])]
    assert {a >> 1 for a in routed} == {2, 3}


def test_chunking_invariance():
    inst = generate_instance(7, 0.6, 3, seed=4)
    full = solve_exact(inst, chunk_bits=16)
    small = solve_exact(inst, chunk_bits=3)
    assert full.cost == small.cost
    assert np.array_equal(full.y, small.y)
    assert full.feasible_designs == small.feasible_designs


def test_disconnected_commodity():
    inst = Instance(
        3,
        (Edge(0, 1, 1, 1, 1),),
        (Commodity(0, 2, 1),),
    )
    with pytest.raises(ValueError, match="disconnected"):
        solve_exact(inst)


def test_oracle_below_every_feasible_heuristic_output():
    from fcndp.heuristics import partial_decoupling

    for seed in range(6):
        inst = generate_instance(6, 0.8, 3, seed=seed)
        res = solve_exact(inst)
        for rng in range(3):
            sol = partial_decoupling(inst, 0.85, rng=rng)
            assert res.cost <= sol.cost


def test_follower_paths_are_shortest_in_open_network():
    from fcndp.graph import Adjacency, dijkstra

    for seed in range(5):
        inst = generate_instance(7, 0.7, 3, seed=seed)
        res = solve_exact(inst)
        adj = Adjacency.from_instance(inst, open_mask=res.y.astype(bool))
        c = inst.edge_array("c")
        for k, com in enumerate(inst.commodities):
            pr = dijkstra(adj, com.origin, c)
            routed = float(np.repeat(c, 2) @ res.x[k])
            assert routed == pr.dist[com.destination]
