"""Ground truth by brute force: enumerate every open-edge subset.

For each design every commodity travels a shortest path by length; among
tied shortest paths the one cheapest for the designer is charged
(optimistic tie-breaking, matching the MIP semantics). Quadratic memory
per chunk, exponential overall: meant for up to ~20 edges.
"""

from fcndp import generate_instance, oracle_solution, solve_exact, verify_bilevel
from fcndp.instance import Commodity, Edge, Instance

triangle = Instance(
    3,
    (Edge(0, 1, 1, 5, 1), Edge(1, 2, 1, 5, 1), Edge(0, 2, 3, 8, 1)),
    (Commodity(0, 2, 2),),
    name="triangle",
)

res = solve_exact(triangle)
print(f"optimum {res.cost}, design {res.y.tolist()}, "
      f"{res.feasible_designs} of 8 designs feasible")
# the three connected designs cost 10 (direct edge), 14 (two-hop route)
# and 22 (everything open, follower takes the short route)

sol = oracle_solution(triangle, res)
print("bilevel-feasible:", verify_bilevel(triangle, sol).passed)

# optimistic tie-breaking in action: two routes of equal length, the
# cheaper-to-ship one gets the flow
diamond = Instance(
    4,
    (
        Edge(0, 1, 1, 0, 5),
        Edge(1, 3, 1, 0, 5),
        Edge(0, 2, 1, 0, 1),
        Edge(2, 3, 1, 0, 1),
    ),
    (Commodity(0, 3, 1),),
)
tie = solve_exact(diamond)
print(f"\ndiamond optimum {tie.cost} routes over edges "
      f"{sorted(set(int(a) >> 1 for a in tie.x[0].nonzero()[0]))} (the cheap pair)")

inst = generate_instance(7, 0.6, 3, seed=4)
res = solve_exact(inst)
print(f"\n{inst.name}: optimum {res.cost} over {2**inst.num_edges} designs "
      f"({res.feasible_designs} feasible)")
