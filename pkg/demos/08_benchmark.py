"""Experiment harness: comparison tables, time-to-target series and the
rank-sum significance test.

Time-to-target: sort the times at which independent seeded runs first
reach a target cost; pairing the i-th time with probability (i-0.5)/N
traces the empirical success curve. The rank-sum test then says whether
two methods' result samples differ beyond their randomness.
"""

from fcndp import SolverConfig, generate_instance, solve_exact
from fcndp.bench import batch, run_ttt, wilcoxon_exact_pvalue, wilcoxon_rank_sum

inst = generate_instance(7, 0.5, 3, seed=42)
opt = solve_exact(inst).cost
print(inst.name, "optimum", opt)

# two configurations of the same solver, five repetitions each
methods = [
    ("band-085", SolverConfig(gamma=0.85, seed=0)),
    ("band-100", SolverConfig(gamma=1.00, seed=0)),
]
rows, records = batch([inst], methods, repetitions=5, optima={inst.name: opt})
for row in rows:
    print(f"  {row.method}: avg {row.avg_sol:.1f} best {row.best_sol:.0f} "
          f"gap {row.gap:.3f} avg time {row.avg_time * 1e3:.1f} ms")

series = run_ttt(inst, SolverConfig(seed=0), target=1.22 * opt, n_runs=20, optimum=opt)
print("\ntime-to-target (first five points):")
for t, p in list(zip(series.times, series.probs))[:5]:
    print(f"  {t * 1e3:7.2f} ms  p={p:.3f}")
print("hits:", sum(r["hit"] for r in series.rows), "/", len(series.rows))

a = [r["cost"] for r in records if r["method"] == "band-085"]
b = [r["cost"] for r in records if r["method"] == "band-100"]
test = wilcoxon_rank_sum(a, b, theta=0.01)
print(f"\nrank-sum p={test.p_value:.3f} reject={test.reject} "
      f"(exact {wilcoxon_exact_pvalue(a, b):.3f})")
