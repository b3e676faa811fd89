import itertools
import random
from fractions import Fraction as F

import pytest

from otlab.finite_ot import (
    CostMatrix,
    InfiniteCostInSupport,
    Marginals,
    check_complementary_slackness,
    is_cyclically_monotone,
    solve_primal,
    strong_monotone_potentials,
    TransportPlan,
)
from otlab.rational import INF


def test_diagonal_support_identity_cost():
    cost = CostMatrix([[0 if i == j else 1 for j in range(3)] for i in range(3)])
    ok, witness = is_cyclically_monotone({(0, 0), (1, 1), (2, 2)}, cost)
    assert ok and witness is None
    pair = strong_monotone_potentials({(0, 0), (1, 1), (2, 2)}, cost)
    assert pair is not None
    assert all(p + q == 0 for p, q in zip(pair.phi, pair.psi))


def test_two_cycle_violation_with_witness():
    cost = CostMatrix([[0, 1], [1, 0]])
    ok, witness = is_cyclically_monotone({(0, 1), (1, 0)}, cost)
    assert not ok
    assert sorted(witness) == [(0, 1), (1, 0)]
    assert strong_monotone_potentials({(0, 1), (1, 0)}, cost) is None


def test_infinite_cost_in_support():
    cost = CostMatrix([[INF, 1], [1, 0]])
    with pytest.raises(InfiniteCostInSupport):
        is_cyclically_monotone({(0, 0)}, cost)


def test_optimizer_support_is_monotone(repeat=15):
    rng = random.Random(31)
    for k in range(repeat):
        n = 2 + k % 5
        cost = CostMatrix(
            [[F(rng.randint(0, 30), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        )
        plan = solve_primal(cost, Marginals.uniform(n))
        ok, _ = is_cyclically_monotone(sorted(plan.support()), cost)
        assert ok


def test_potentials_pass_slackness_pipeline():
    rng = random.Random(55)
    cost = CostMatrix(
        [[F(rng.randint(0, 30), rng.randint(1, 3)) for _ in range(5)] for _ in range(5)]
    )
    marg = Marginals.uniform(5)
    plan = solve_primal(cost, marg)
    pair = strong_monotone_potentials(sorted(plan.support()), cost)
    assert pair is not None
    assert check_complementary_slackness(plan, pair, cost).passed


def permutation_plan(perm, n):
    w = F(1, n)
    return TransportPlan(
        [[w if perm[i] == j else 0 for j in range(n)] for i in range(n)],
        0,
    )


def test_monotone_iff_optimal_exhaustive_n4(costs=8):
    """Every permutation plan: optimal <=> cyclically monotone support
    <=> potentials exist; checked over all 24 supports."""
    rng = random.Random(123)
    n = 4
    for _ in range(costs):
        cost = CostMatrix(
            [[F(rng.randint(0, 20), rng.randint(1, 2)) for _ in range(n)] for _ in range(n)]
        )
        best = min(
            sum((cost[i, p[i]] for i in range(n)), F(0))
            for p in itertools.permutations(range(n))
        )
        for p in itertools.permutations(range(n)):
            value = sum((cost[i, p[i]] for i in range(n)), F(0))
            support = sorted((i, p[i]) for i in range(n))
            ok, _ = is_cyclically_monotone(support, cost)
            pair = strong_monotone_potentials(support, cost)
            assert ok == (value == best)
            assert (pair is not None) == ok
            if pair is not None:
                assert all(
                    pair.phi[i] + pair.psi[j] == cost[i, j] for (i, j) in support
                )
                assert pair.is_feasible(cost)


def test_monotone_mixtures_are_optimal():
    """Plans supported on a monotone set all share the optimal value."""
    rng = random.Random(9)
    n = 4
    cost = CostMatrix(
        [[F(rng.randint(0, 20), rng.randint(1, 2)) for _ in range(n)] for _ in range(n)]
    )
    marg = Marginals.uniform(n)
    opt = solve_primal(cost, marg)
    opt_perms = []
    for p in itertools.permutations(range(n)):
        value = sum((cost[i, p[i]] for i in range(n)), F(0)) / n
        if value == opt.value:
            opt_perms.append(p)
    # mix two optimal vertices if available; the mixture stays optimal
    if len(opt_perms) >= 2:
        a, b = opt_perms[0], opt_perms[1]
        w = F(1, n)
        entries = [[F(0)] * n for _ in range(n)]
        for i in range(n):
            entries[i][a[i]] += w / 2
            entries[i][b[i]] += w / 2
        mixed = TransportPlan(entries, 0)
        support = sorted(mixed.support())
        ok, _ = is_cyclically_monotone(support, cost)
        assert ok
