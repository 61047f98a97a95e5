"""Local branching and the ejection-cycle perturbation.

Local branching bolts a Hamming-ball constraint onto the MIP: at most
delta design bits may flip from the incumbent, and only strictly cheaper
solutions are accepted. The perturbation measures each used edge's cost
per crossing, strings the worst edges into short chains, prices a random
chain out and rebuilds the routes that crossed it.
"""

import numpy as np

from fcndp import generate_instance, verify_bilevel
from fcndp.heuristics import ejection_cycle, inefficiency_metrics, local_branching, partial_decoupling

inst = generate_instance(9, 0.6, 5, seed=17)
start = partial_decoupling(inst, 0.85, rng=2)
print(inst.name, "construction cost:", start.cost)

for delta in (0, 2, inst.num_edges):
    out = local_branching(inst, start, delta)
    flips = int(np.abs(out.y - start.y).sum())
    print(f"  local branching delta={delta:>2}: cost {out.cost} ({flips} flips)")

report = inefficiency_metrics(inst, start, rng=5)
print("\ncost-per-crossing by edge:",
      {e: round(r, 1) for e, r in sorted(report.ratios.items())})
print(f"average {report.average:.1f}, above-average edges: {report.inefficient}")
print("chains:", report.chains)

perturbed = ejection_cycle(inst, start, gamma=0.85, rng=5)
print(f"\nejection cycle: {start.cost} -> {perturbed.cost}, "
      f"feasible: {verify_bilevel(inst, perturbed).passed}")
