import itertools
import random
from fractions import Fraction as F

import pytest

from otlab.finite_ot import (
    CostMatrix,
    InfeasibleMarginals,
    Marginals,
    NoFinitePlan,
    TransportPlan,
    check_complementary_slackness,
    solve_dual,
    solve_primal,
)
from otlab.rational import INF


def random_cost(rng, n, hi=40):
    return CostMatrix(
        [[F(rng.randint(0, hi), rng.randint(1, 4)) for _ in range(n)] for _ in range(n)]
    )


def brute_force_value(cost, n):
    return min(
        sum((cost[i, p[i]] for i in range(n)), F(0))
        for p in itertools.permutations(range(n))
    ) / n


def test_single_cell():
    q = F(7, 3)
    plan = solve_primal(CostMatrix([[q]]), Marginals.uniform(1))
    assert plan.entries == ((F(1),),)
    assert plan.value == q


def test_identity_cost_diagonal():
    cost = CostMatrix([[0 if i == j else 1 for j in range(3)] for i in range(3)])
    plan = solve_primal(cost, Marginals.uniform(3))
    assert plan.value == 0
    assert plan.support() == {(0, 0), (1, 1), (2, 2)}


def test_two_point_swap_cost():
    cost = CostMatrix([[0, 1], [1, 0]])
    pair = solve_dual(cost, Marginals.uniform(2))
    assert pair.value == 0
    assert pair.is_feasible(cost)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_birkhoff_oracle(n):
    rng = random.Random(100 + n)
    for _ in range(5):
        cost = random_cost(rng, n)
        plan = solve_primal(cost, Marginals.uniform(n))
        assert plan.value == brute_force_value(cost, n)
        assert plan.check_marginals(Marginals.uniform(n))


def test_strong_duality_random(repeat=25):
    rng = random.Random(7)
    for k in range(repeat):
        n = 2 + k % 7
        cost = random_cost(rng, n)
        marg = Marginals.uniform(n)
        plan = solve_primal(cost, marg)
        pair = solve_dual(cost, marg)
        assert pair.value == plan.value
        assert pair.is_feasible(cost)
        assert check_complementary_slackness(plan, pair, cost).passed


def test_nonuniform_marginals():
    rng = random.Random(11)
    for _ in range(10):
        n = rng.randint(2, 6)
        cost = random_cost(rng, n)
        mu = [F(rng.randint(1, 9)) for _ in range(n)]
        nu = [F(rng.randint(1, 9)) for _ in range(n)]
        total = sum(mu)
        nu = [v * total / sum(nu) for v in nu]
        marg = Marginals(mu, nu)
        plan = solve_primal(cost, marg)
        pair = solve_dual(cost, marg)
        assert plan.value == pair.value
        assert plan.check_marginals(marg)


def test_zero_rows_are_eliminated():
    cost = CostMatrix([[1, 2], [3, 4]])
    marg = Marginals([F(1), F(0)], [F(0), F(1)])
    plan = solve_primal(cost, marg)
    assert plan.entries[0][1] == 1
    assert plan.value == 2


def test_infeasible_marginals():
    cost = CostMatrix([[1]])
    with pytest.raises(InfeasibleMarginals):
        solve_primal(cost, Marginals([F(1)], [F(2)]))


def test_no_finite_plan():
    cost = CostMatrix([[INF, INF], [1, 1]])
    with pytest.raises(NoFinitePlan):
        solve_primal(cost, Marginals.uniform(2))


def test_forbidden_cells_respected():
    rng = random.Random(5)
    for _ in range(10):
        n = 4
        rows = [[F(rng.randint(0, 9)) for _ in range(n)] for _ in range(n)]
        rows[0][0] = INF
        rows[2][3] = INF
        cost = CostMatrix(rows)
        plan = solve_primal(cost, Marginals.uniform(n))
        assert plan.entries[0][0] == 0
        assert plan.entries[2][3] == 0
        assert plan.value == solve_dual(cost, Marginals.uniform(n)).value


def test_slackness_negative_control():
    # all-zero potentials on an instance with positive value must fail
    cost = CostMatrix([[1, 2], [2, 1]])
    marg = Marginals.uniform(2)
    plan = solve_primal(cost, marg)
    assert plan.value > 0
    from otlab.finite_ot import DualPair

    report = check_complementary_slackness(plan, DualPair([0, 0], [0, 0]), cost)
    assert not report.passed
    assert report.support_violations


def test_slackness_identity_diagonal_zero_duals():
    cost = CostMatrix([[0 if i == j else 1 for j in range(3)] for i in range(3)])
    diag = TransportPlan(
        [[F(1, 3) if i == j else 0 for j in range(3)] for i in range(3)], 0
    )
    from otlab.finite_ot import DualPair

    assert check_complementary_slackness(diag, DualPair([0] * 3, [0] * 3), cost).passed


def test_slackness_dimension_mismatch():
    from otlab.finite_ot import DimensionMismatch, DualPair

    cost = CostMatrix([[1, 2], [3, 4]])
    plan = solve_primal(cost, Marginals.uniform(2))
    with pytest.raises(DimensionMismatch):
        check_complementary_slackness(plan, DualPair([0], [0]), cost)
