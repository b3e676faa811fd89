"""Cyclical monotonicity certificates for support sets.

A support set violates the cyclic improvement inequality iff the directed
graph on its cells with arc weight c(i, j') - c(i, j) from (i, j) to
(i', j') has a negative cycle; the cycle itself is the witness.  When no
negative cycle exists, potentials with equality on the support come out
of a shortest-path (difference constraint) computation.
"""

from __future__ import annotations

from fractions import Fraction

from ..rational import is_inf
from .types import CostMatrix, DualPair, InfiniteCostInSupport

ZERO = Fraction(0)


def _check_support(support, cost: CostMatrix):
    cells = sorted(support)
    for (i, j) in cells:
        if not (0 <= i < cost.n_rows and 0 <= j < cost.n_cols):
            raise InfiniteCostInSupport(f"cell {(i, j)} outside cost matrix")
        if is_inf(cost[i, j]):
            raise InfiniteCostInSupport(f"support cell {(i, j)} has infinite cost")
    return cells


def is_cyclically_monotone(support, cost: CostMatrix):
    """Return (True, None) or (False, witness_cycle_of_cells).

    Bellman-Ford on the cell graph: nodes are support cells, the arc
    (i,j) -> (i',j') costs c(i,j') - c(i,j) and exists iff c(i,j') is
    finite.  A negative cycle is exactly a finite sequence violating the
    closed-cycle inequality.
    """
    cells = _check_support(support, cost)
    k = len(cells)
    if k == 0:
        return True, None
    arcs = []
    for a, (i, j) in enumerate(cells):
        for b, (i2, j2) in enumerate(cells):
            if a == b:
                continue
            cij2 = cost[i, j2]
            if is_inf(cij2):
                continue
            arcs.append((a, b, cij2 - cost[i, j]))

    dist = [ZERO] * k
    pred = [None] * k
    cycle_node = None
    for it in range(k):
        changed = False
        for a, b, w in arcs:
            if dist[a] + w < dist[b]:
                dist[b] = dist[a] + w
                pred[b] = a
                changed = True
                if it == k - 1:
                    cycle_node = b
        if not changed:
            return True, None
    if cycle_node is None:
        return True, None
    # Walk back k steps to land inside the cycle, then collect it.
    node = cycle_node
    for _ in range(k):
        node = pred[node]
    cycle = [node]
    cur = pred[node]
    while cur != node:
        cycle.append(cur)
        cur = pred[cur]
    cycle.reverse()
    return False, [cells[a] for a in cycle]


def strong_monotone_potentials(support, cost: CostMatrix):
    """Potentials (phi, psi) with phi+psi <= c everywhere finite and
    equality on the support; None iff the support is not cyclically
    monotone.

    Difference-constraint system solved by Bellman-Ford on row/column
    nodes: psi(j) - (-phi(i)) <= c(i,j) for finite cells and the reverse
    inequality along support cells; negative cycles in this graph are the
    same cyclic violations as above.
    """
    cells = _check_support(support, cost)
    ok, _ = is_cyclically_monotone(support, cost)
    if not ok:
        return None

    m, n = cost.n_rows, cost.n_cols
    # Node ids: rows 0..m-1 hold a(i) = -phi(i), cols m..m+n-1 hold psi(j).
    nn = m + n
    arcs = []
    for i, j in cost.finite_cells():
        arcs.append((i, m + j, cost[i, j]))  # psi(j) - a(i) <= c(i,j)
    for (i, j) in cells:
        arcs.append((m + j, i, -cost[i, j]))  # a(i) - psi(j) <= -c(i,j)

    dist = [ZERO] * nn  # virtual source at 0 to every node
    for _ in range(nn):
        changed = False
        for a, b, w in arcs:
            if dist[a] + w < dist[b]:
                dist[b] = dist[a] + w
                changed = True
        if not changed:
            break
    else:
        # Unreachable given the monotonicity check above.
        return None

    phi = [-dist[i] for i in range(m)]
    psi = [dist[m + j] for j in range(n)]
    return DualPair(phi, psi)
