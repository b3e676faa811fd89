"""Double-indexed map family and the truncated-cost gap demonstration.

A grid of interval permutations tau_{n,j} (1 <= n <= j): row n is seeded
at column n by a fresh within-block shuffle at scale n (built with a
positive singular mass: the quasi-cost vanishes on the long bulk runs
and spikes to about m_n/(2*M_{n-1}) on 2*M_{n-1} sub-blocks per block),
and each later column refines the row by the keep-and-fill rule.  The
limit maps behind the truncated costs are the deepest column of each
row; together with the identity and the one-step rotation they carry the
finite costs whose primal and dual values are exactly one at every
truncation, while the witness transports make the relaxed values
collapse in the limit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from .circle import ModulusTower, phi_level
from .finite_ot import (
    CostMatrix,
    Marginals,
    NoFinitePlan,
    PartialPlan,
    solve_dual,
    solve_primal,
)
from .rational import INF, format_rational
from .tau import (
    GrowthTooSmall,
    _avoidance_step,
    build_tau_level1,
    keep_and_fill_block,
)

ZERO = Fraction(0)


class GraphOverlapInconsistency(Exception):
    """The same cell received two different clipped costs."""


@dataclass
class GridCell:
    """One map tau_{n,j}: row n refined to level j."""

    row: int
    level: int
    tau: np.ndarray
    sigma: np.ndarray
    changed_from_prev: Optional[np.ndarray] = None

    @property
    def modulus(self) -> int:
        return int(self.tau.shape[0])


def _sigma_of(tau, tower: ModulusTower, j: int):
    M = tower.M[j - 1]
    P = tower.P[j - 1]
    return (np.arange(M, dtype=np.int64) + tau * P) % M


def _invert(tau, sigma):
    """tau-vector of the inverse map; the reversed orbits keep the
    middle-avoidance of the forward ones."""
    tau_inv = np.empty_like(tau)
    tau_inv[sigma] = -tau
    return tau_inv


def _diagonal_seed(tower: ModulusTower, j: int) -> GridCell:
    """Fresh row-j map: inverse of the within-block shuffle that moves
    the bulk outward by M_{j-1} sub-blocks and throws the 2*M_{j-1}
    boundary sub-blocks onto the central gaps."""
    m = tower.primes[j - 1]
    M = tower.M[j - 1]
    M_prev = tower.M[j - 2] if j >= 2 else 1
    Pinv = tower.step_inverse(j)
    mid = (M - 1) // 2
    half = (m - 1) // 2

    if j == 1:
        # scale-1 seed: inverse of the level-1 construction map
        base = build_tau_level1(tower)
        tau = _invert(base.tau, base.sigma)
        sigma = _sigma_of(tau, tower, 1)
        return GridCell(row=1, level=1, tau=tau, sigma=sigma)

    if m < 2 * M_prev + 1:
        raise GrowthTooSmall(f"m_{j} = {m} < 2*M_{j-1}+1 = {2 * M_prev + 1}")

    tau_fwd = np.zeros(M, dtype=np.int64)
    subs = np.arange(m)
    left_bulk = (subs >= M_prev) & (subs <= half - 1)
    right_bulk = (subs >= half + 1) & (subs <= m - 1 - M_prev)
    boundary = (subs < M_prev) | (subs >= m - M_prev)
    covered = np.zeros(m, dtype=bool)
    covered[subs[left_bulk] - M_prev] = True
    covered[subs[right_bulk] + M_prev] = True
    covered[half] = True
    gaps = subs[~covered]
    bnd = subs[boundary]
    if gaps.shape[0] != bnd.shape[0]:
        raise GrowthTooSmall("diagonal seed gaps do not match its boundary")

    for p in range(M_prev):
        lo = p * m
        tau_fwd[lo + subs[left_bulk]] = -M_prev
        tau_fwd[lo + subs[right_bulk]] = M_prev
        tau_fwd[lo + half] = 0
        for s, d in zip(bnd, gaps):
            tau_fwd[lo + s] = _avoidance_step(M, Pinv, mid, lo + int(s), lo + int(d))

    sigma_fwd = _sigma_of(tau_fwd, tower, j)
    counts = np.bincount(sigma_fwd, minlength=M)
    if not (counts == 1).all():
        raise GrowthTooSmall(f"diagonal seed at level {j} is not a permutation")
    tau = _invert(tau_fwd, sigma_fwd)
    return GridCell(row=j, level=j, tau=tau, sigma=_sigma_of(tau, tower, j))


def _refine_cell(cell: GridCell, tower: ModulusTower) -> GridCell:
    """Column step: keep tau inside every block, fill the gaps."""
    j = cell.level + 1
    tower.require_level(j)
    m = tower.primes[j - 1]
    M = tower.M[j - 1]
    M_prev = tower.M[j - 2]
    Pinv = tower.step_inverse(j)
    mid = (M - 1) // 2

    tau = np.zeros(M, dtype=np.int64)
    for p in range(M_prev):
        keep_and_fill_block(
            tau, p * m, m, int(cell.tau[p]), int(cell.sigma[p]), M, Pinv, mid
        )
    sigma = _sigma_of(tau, tower, j)
    counts = np.bincount(sigma, minlength=M)
    if not (counts == 1).all():
        raise GrowthTooSmall(f"refinement to level {j} lost bijectivity")
    changed = tau != np.repeat(cell.tau, m)
    return GridCell(row=cell.row, level=j, tau=tau, sigma=sigma, changed_from_prev=changed)


@dataclass
class GapFamily:
    """All grid cells up to column j_max, plus per-row eta bookkeeping."""

    tower: ModulusTower
    j_max: int
    grid: Dict[Tuple[int, int], GridCell]
    eta_closed: Dict[int, Fraction]

    def cell(self, n: int, j: int) -> GridCell:
        return self.grid[(n, j)]

    def limit_tau(self, n: int):
        """Level-j_max tau of the n-th limit map (0: identity, 1: one
        rotation step, n >= 2: row n at the deepest column)."""
        M = self.tower.M[self.j_max - 1]
        if n == 0:
            return np.zeros(M, dtype=np.int64)
        if n == 1:
            return np.ones(M, dtype=np.int64)
        return self.grid[(n, self.j_max)].tau

    def limit_sigma(self, n: int):
        tau = self.limit_tau(n)
        return _sigma_of(tau, self.tower, self.j_max)


def quasi_cost_of(tau, sigma, tower: ModulusTower, j: int):
    phi = phi_level(tower, j).values
    return 1 + phi - phi[sigma]


def build_gap_family(tower: ModulusTower, j_max: int) -> GapFamily:
    if j_max < 1 or j_max > tower.depth:
        raise ValueError(f"j_max must be in 1..{tower.depth}")
    grid: Dict[Tuple[int, int], GridCell] = {}
    eta_closed: Dict[int, Fraction] = {}
    for j in range(1, j_max + 1):
        for n in range(1, j):
            grid[(n, j)] = _refine_cell(grid[(n, j - 1)], tower)
        grid[(j, j)] = _diagonal_seed(tower, j)
        M_prev = tower.M[j - 2] if j >= 2 else 1
        eta_closed[j] = Fraction(2 * M_prev + 1, tower.primes[j - 1])
    return GapFamily(tower=tower, j_max=j_max, grid=grid, eta_closed=eta_closed)


@dataclass
class RowReport:
    """Measure preservation, two-valued approximation and displacement
    of one grid cell."""

    row: int
    level: int
    permutation_ok: bool
    quasi_cost_mean_one: bool
    eta: Fraction
    two_valued_error: Fraction
    two_valued_target: Fraction
    displacement_max: Fraction
    displacement_bound: Fraction

    @property
    def displacement_ok(self) -> bool:
        return self.displacement_max < self.displacement_bound


def verify_row_map(family: GapFamily, n: int, j: int) -> RowReport:
    tower = family.tower
    cell = family.cell(n, j)
    M = cell.modulus
    counts = np.bincount(cell.sigma, minlength=M)
    permutation_ok = bool((counts == 1).all())

    q = quasi_cost_of(cell.tau, cell.sigma, tower, j)
    mean_one = int(q.sum(dtype=np.int64)) == M

    eta = family.eta_closed[n]
    v = (1 - eta) / eta
    k = int(eta * M)  # integral by construction of the closed form
    fv = np.sort(q)[::-1]
    # best two-valued approximation: the spike value on the k largest
    # entries, zero elsewhere
    spike = fv[:k]
    rest = fv[k:]
    err = sum((abs(Fraction(int(x)) - v) for x in spike), ZERO) + Fraction(
        int(np.abs(rest).sum(dtype=np.int64))
    )
    approx_err = err / M

    d = (cell.sigma - np.arange(M, dtype=np.int64)) % M
    disp = int(np.minimum(d, M - d).max())
    block = Fraction(M, tower.M[n - 2]) if n >= 2 else Fraction(M)

    return RowReport(
        row=n,
        level=j,
        permutation_ok=permutation_ok,
        quasi_cost_mean_one=mean_one,
        eta=eta,
        two_valued_error=approx_err,
        two_valued_target=Fraction(1, 2**n),
        displacement_max=Fraction(disp, M),
        displacement_bound=block / M,
    )


@dataclass
class TruncatedCost:
    """Clipped cost on the union of M+1 graphs, as a dense matrix."""

    graph_count: int
    level: int
    cost: CostMatrix
    marginals: Marginals
    finite_cells: int


def materialize_cost(family: GapFamily, M_graphs: int, j: int) -> TruncatedCost:
    """Dense M_j x M_j cost: clipped quasi-cost on the graphs of the
    identity, the one-step rotation and the limit maps 2..M_graphs;
    infinite elsewhere."""
    if j != family.j_max:
        raise ValueError("costs are materialized at the deepest built column")
    if M_graphs < 1 or M_graphs > family.j_max:
        raise ValueError(f"M must be in 1..{family.j_max}")
    tower = family.tower
    Mj = tower.M[j - 1]
    entries = [[INF] * Mj for _ in range(Mj)]
    finite = 0
    for k in range(0, M_graphs + 1):
        sigma = family.limit_sigma(k)
        q = quasi_cost_of(family.limit_tau(k), sigma, tower, j)
        for l in range(Mj):
            tgt = int(sigma[l])
            val = Fraction(max(int(q[l]), 0))
            old = entries[l][tgt]
            if old is INF:
                entries[l][tgt] = val
                finite += 1
            elif old != val:
                raise GraphOverlapInconsistency(
                    f"cell ({l},{tgt}): {old} vs {val} from graph {k}"
                )
    cost = CostMatrix(entries)
    return TruncatedCost(
        graph_count=M_graphs,
        level=j,
        cost=cost,
        marginals=Marginals.uniform(Mj),
        finite_cells=finite,
    )


def _circle_far_cost(Mj: int, radius: int):
    """0 on cells with circle distance < radius (in index units), INF
    elsewhere; the feasibility instrument for near-diagonal completions."""
    entries = []
    for a in range(Mj):
        row = []
        for b in range(Mj):
            d = abs(a - b)
            d = min(d, Mj - d)
            row.append(Fraction(0) if d < radius else INF)
        entries.append(row)
    return CostMatrix(entries)


def _completion_feasible(partial: PartialPlan, marg: Marginals, radius: int) -> bool:
    """Does a partial transport extend to full marginals using only
    cells within the given circle radius?"""
    mu = [m - r for m, r in zip(marg.mu, partial.row_sums())]
    nu = [m - c for m, c in zip(marg.nu, partial.col_sums())]
    cost = _circle_far_cost(len(mu), radius)
    try:
        solve_primal(cost, Marginals(mu, nu))
        return True
    except NoFinitePlan:
        return False


def _plan_from_cells(cells, Mj: int) -> PartialPlan:
    w = Fraction(1, Mj)
    entries = [[ZERO] * Mj for _ in range(Mj)]
    for (i, jj) in cells:
        entries[i][jj] = w
    return PartialPlan(entries)


def _cheap_partial_plans(family: GapFamily, trunc: TruncatedCost):
    """Greedy partial plans of mass >= 2/3 and cost <= 1/2 assembled from
    the zero-cost cells of the finite graphs, topped up with diagonal
    mass; two row orders give two samples."""
    Mj = trunc.cost.n_rows
    w = Fraction(1, Mj)
    zero_cells = [
        (i, jj) for i, jj in trunc.cost.finite_cells() if trunc.cost[i, jj] == 0
    ]
    plans = []
    for order in (1, -1):
        used_rows = set()
        used_cols = set()
        cells = []
        for (i, jj) in zero_cells[::order]:
            if i not in used_rows and jj not in used_cols:
                cells.append((i, jj))
                used_rows.add(i)
                used_cols.add(jj)
        cost = ZERO
        for i in range(Mj):
            if 3 * len(cells) >= 2 * Mj:
                break
            if i not in used_rows and i not in used_cols and cost + w <= Fraction(1, 2):
                cells.append((i, i))
                used_rows.add(i)
                used_cols.add(i)
                cost += w
        plans.append((_plan_from_cells(cells, Mj), cost))
    # the full diagonal plan: mass 1 at cost 1, fails the cost gate and
    # is carried along so the report shows it excluded
    plans.append((_plan_from_cells([(i, i) for i in range(Mj)], Mj), Fraction(1)))
    return plans


@dataclass
class SeparationReport:
    """Primal/dual values of the truncated cost and the near-diagonal
    separation radius for the sampled cheap partial plans."""

    graph_count: int
    level: int
    primal: Fraction
    dual: Fraction
    values_ok: bool
    samples: list = field(default_factory=list)
    beta_threshold: Optional[Fraction] = None


def verify_truncated_duality(family: GapFamily, M_graphs: int, j: int) -> SeparationReport:
    trunc = materialize_cost(family, M_graphs, j)
    plan = solve_primal(trunc.cost, trunc.marginals)
    duals = solve_dual(trunc.cost, trunc.marginals)
    ok = plan.value == 1 and duals.value == 1
    Mj = trunc.cost.n_rows

    samples = []
    thresholds = []
    for partial, cost in _cheap_partial_plans(family, trunc):
        assert partial.dominated_by(trunc.marginals)
        if not (partial.mass >= Fraction(2, 3) and cost <= Fraction(1, 2)):
            samples.append({"mass": partial.mass, "cost": cost, "excluded": True})
            continue
        # binary search for the largest radius with NO feasible
        # completion (feasibility is monotone in the radius)
        lo, hi = 1, Mj // 2 + 1
        best_sep = 0
        while lo < hi:
            mid_r = (lo + hi) // 2
            if _completion_feasible(partial, trunc.marginals, mid_r):
                hi = mid_r
            else:
                best_sep = mid_r
                lo = mid_r + 1
        beta = Fraction(best_sep, Mj)
        samples.append(
            {"mass": partial.mass, "cost": cost, "beta": beta, "excluded": False}
        )
        thresholds.append(beta)

    return SeparationReport(
        graph_count=M_graphs,
        level=j,
        primal=plan.value,
        dual=duals.value,
        values_ok=ok,
        samples=samples,
        beta_threshold=min(thresholds) if thresholds else None,
    )


def gap_demonstration(family: GapFamily, M_graphs: int, j: int) -> dict:
    """Exact per-truncation evidence: P == D == 1, the witness transports
    of the zero-cost mass per row, and the eta trend."""
    tower = family.tower
    sep = verify_truncated_duality(family, M_graphs, j)
    Mj = tower.M[j - 1]

    eta = dict(family.eta_closed)
    eta_realized = {}
    witness_cost = {}
    witness_mass = {}
    for n in range(1, family.j_max + 1):
        cell = family.cell(n, family.j_max)
        q = quasi_cost_of(cell.tau, cell.sigma, tower, family.j_max)
        zero = int((q == 0).sum())
        eta_realized[n] = Fraction(Mj - zero, Mj)
        witness_mass[n] = Fraction(zero, Mj)
        witness_cost[n] = ZERO  # transporting only the zero-cost set

    etas = [eta[n] for n in sorted(eta)]
    report = {
        "M": M_graphs,
        "j": j,
        "primal": format_rational(sep.primal),
        "dual": format_rational(sep.dual),
        "eta": {str(n): format_rational(v) for n, v in sorted(eta.items())},
        "eta_realized": {
            str(n): format_rational(v) for n, v in sorted(eta_realized.items())
        },
        "witness_cost": {
            str(n): format_rational(v) for n, v in sorted(witness_cost.items())
        },
        "witness_mass": {
            str(n): format_rational(v) for n, v in sorted(witness_mass.items())
        },
        "eta_strictly_decreasing": all(a > b for a, b in zip(etas, etas[1:])),
        "beta_threshold": format_rational(sep.beta_threshold)
        if sep.beta_threshold is not None
        else None,
    }
    return report
