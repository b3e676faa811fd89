"""The budgeted dual: pay for constraint excess against a reference plan.

For a fixed fully-supported reference plan pi0, the relaxed dual may
exceed phi + psi <= c on supp(pi0) as long as the pi0-weighted excess
stays within a budget eps.  The value is nonincreasing as the budget
shrinks and lands exactly on the unrelaxed optimum at eps = 0.
"""

import random
from fractions import Fraction as F

from otlab.finite_ot import (
    CostMatrix,
    Marginals,
    TransportPlan,
    solve_primal,
    solve_relaxed_dual,
)

rng = random.Random(3)
N = 4
cost = CostMatrix(
    [[F(rng.randint(0, 40), rng.randint(1, 4)) for _ in range(N)] for _ in range(N)]
)
marg = Marginals.uniform(N)
primal = solve_primal(cost, marg).value

w = F(1, N * N)
pi0 = TransportPlan(
    [[w] * N for _ in range(N)],
    sum((cost[i, j] * w for i in range(N) for j in range(N)), F(0)),
)

print(f"primal value: {primal}")
print()
print(f"{'eps':>8}   relaxed dual value")
for eps in [F(2), F(1), F(1, 2), F(1, 4), F(1, 8), F(0)]:
    value = solve_relaxed_dual(cost, marg, pi0, eps).value
    print(f"{str(eps):>8}   {value}")
print()
print("the budget buys value one-for-one until the plan geometry binds,")
print("and the eps = 0 row equals the primal value exactly.")
