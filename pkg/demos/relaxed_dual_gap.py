"""The truncated-cost family behind the relaxed-dual gap.

Every finite truncation of the graph family prices at exactly one: the
potentials that generated the maps are tight on every stored graph, so
the primal and dual values are both 1.  Meanwhile the per-row witness
transports move a mass of 1 - eta_n at zero cost with eta_n shrinking,
which is the mechanism that collapses the relaxed values in the limit;
and no cheap partial plan can be completed near the diagonal.
"""

from otlab.circle import build_tower
from otlab.gap import (
    build_gap_family,
    gap_demonstration,
    materialize_cost,
    verify_row_map,
    verify_truncated_duality,
)

tower = build_tower(5, 2, growth_floor=[31])
print(f"tower: {tower.primes}")
family = build_gap_family(tower, 2)

for n in (1, 2):
    rep = verify_row_map(family, n, 2)
    print(f"row {n}: eta = {rep.eta}, |f - g|_1 = {rep.two_valued_error} "
          f"(target {rep.two_valued_target}), displacement {rep.displacement_max}")

trunc = materialize_cost(family, 2, 2)
print(f"\ntruncated cost: {trunc.cost.n_rows}x{trunc.cost.n_cols}, "
      f"{trunc.finite_cells} finite cells on 3 graphs")

sep = verify_truncated_duality(family, 2, 2)
print(f"primal = {sep.primal}, dual = {sep.dual} (both exactly 1 at every truncation)")
for s in sep.samples:
    if s.get("excluded"):
        print(f"  sample mass {s['mass']} cost {s['cost']}: excluded (cost gate)")
    else:
        print(f"  sample mass {s['mass']} cost {s['cost']}: no completion "
              f"within circle distance {s['beta']}")

report = gap_demonstration(family, 2, 2)
print(f"\nwitness masses per row: {report['witness_mass']} at cost "
      f"{set(report['witness_cost'].values())}")
print(f"eta trend: {report['eta']} strictly decreasing: "
      f"{report['eta_strictly_decreasing']}")
print("\nthe finite truncations never show the gap; the report's shrinking")
print("eta and zero-cost witnesses are the exact finite evidence for it.")
