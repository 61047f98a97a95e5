"""The shortest-path kernels every solver stage is built on.

Two Dijkstra flavors run over the same adjacency: the follower's uses pure
edge lengths, the leader's a blended construction cost. Here: distances,
path extraction and the union of all tied shortest paths.
"""

import numpy as np

from fcndp import Adjacency, dijkstra, extract_path, shortest_path_dag
from fcndp.graph import arc_endpoints
from fcndp.instance import Commodity, Edge, Instance

# a diamond with two equally long routes from 0 to 3
inst = Instance(
    4,
    (
        Edge(0, 1, c=1, f=0, beta=5),
        Edge(1, 3, c=1, f=0, beta=5),
        Edge(0, 2, c=1, f=0, beta=1),
        Edge(2, 3, c=1, f=0, beta=1),
    ),
    (Commodity(0, 3, 1),),
)
adj = Adjacency.from_instance(inst)
lengths = inst.edge_array("c")

pr = dijkstra(adj, 0, lengths)
print("distances from node 0:", pr.dist.tolist())

path = extract_path(pr, 3)
print("one shortest path:", [arc_endpoints(inst, a) for a in path])

# both length-2 routes tie, so the shortest-path DAG holds all four arcs
dag = shortest_path_dag(adj, 0, 3, lengths)
print("tied-route DAG:", sorted(arc_endpoints(inst, a) for a in dag))

# masking edges re-routes traffic: close the cheap-to-ship route
open_mask = np.array([True, True, False, False])
masked = Adjacency.from_instance(inst, open_mask=open_mask)
pr2 = dijkstra(masked, 0, lengths)
print("with the lower route closed:",
      [arc_endpoints(inst, a) for a in extract_path(pr2, 3)])
