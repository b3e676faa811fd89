"""Discrete circle model on Z/M_nZ.

Every function of interest is constant on the M_n level-n intervals
[l/M_n, (l+1)/M_n), so the whole level-n system lives on integer indices:
one rotation step is the shift l -> l + P_n (mod M_n), where
alpha_n = P_n/M_n is the level-n rational angle of the modulus tower.
Real-valued circle points never appear.

Indices are 0-based; the one-based digit labels used in hand notation
correspond to k_j = digit_j(l) + 1 in mixed radix (m_1, ..., m_n).
"""

from __future__ import annotations

import math
import os
from functools import lru_cache
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .rational import format_rational

# int64 index arithmetic multiplies an index by a step count; keep the
# product clear of 2^63.
_MAX_MODULUS = 3_000_000_000


class TowerError(Exception):
    pass


class SearchCapExceeded(TowerError):
    """Prime scan hit the candidate cap before a qualifying prime."""


class TowerTooShallow(TowerError):
    pass


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24 (fixed base set)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _crt(residues: Sequence[int], moduli: Sequence[int]) -> int:
    """Solution mod prod(moduli) for pairwise coprime moduli."""
    x, mod = 0, 1
    for r, m in zip(residues, moduli):
        g, inv = math.gcd(mod, m), pow(mod % m, -1, m)
        assert g == 1
        x = x + mod * ((r - x) * inv % m)
        mod *= m
    return x % mod


def default_search_cap() -> int:
    env = os.environ.get("TDL_SEARCH_CAP")
    return int(env) if env else 10_000_000


@dataclass(frozen=True)
class ModulusTower:
    """Primes m_1..m_n with products M_j and numerators P_j of the
    level angles alpha_j = P_j/M_j = sum_{i<=j} 1/M_i.

    The congruence scheme m_{i+1} = +1 (mod m_i), m_{i+j} = -1 (mod m_i)
    for j >= 2 keeps every P_j coprime to M_j.  mode records whether the
    quintic growth condition m_j > 40*M_{j-1}^5 holds at every step.
    """

    primes: tuple
    M: tuple
    P: tuple
    mode: str

    @property
    def depth(self) -> int:
        return len(self.primes)

    def require_level(self, n: int):
        if not 1 <= n <= self.depth:
            raise TowerTooShallow(f"level {n} of a depth-{self.depth} tower")

    def alpha(self, n: int) -> Fraction:
        self.require_level(n)
        return Fraction(self.P[n - 1], self.M[n - 1])

    def modulus(self, n: int) -> int:
        self.require_level(n)
        return self.M[n - 1]

    def step(self, n: int) -> int:
        self.require_level(n)
        return self.P[n - 1]

    def middle_index(self, n: int) -> int:
        return (self.modulus(n) - 1) // 2

    def step_inverse(self, n: int) -> int:
        return pow(self.step(n) % self.modulus(n), -1, self.modulus(n))


def build_tower(m1: int, depth: int, growth_floor=None, search_cap=None) -> ModulusTower:
    """Scan the congruence-determined arithmetic progressions for primes.

    growth_floor gives a minimum for each of m_2..m_depth (monotone);
    the smallest qualifying prime at or above each floor is taken.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if m1 < 5 or m1 % 2 == 0 or not is_probable_prime(m1):
        raise ValueError(f"m1 must be an odd prime >= 5, got {m1}")
    if growth_floor is None:
        floors = [0] * (depth - 1)
    else:
        floors = list(growth_floor)
        if len(floors) != depth - 1:
            raise ValueError("growth_floor must give one minimum per level >= 2")
        if any(a > b for a, b in zip(floors, floors[1:])):
            raise ValueError("growth_floor must be monotone")
    cap = search_cap if search_cap is not None else default_search_cap()

    primes = [m1]
    M = [m1]
    P = [1]
    for j in range(2, depth + 1):
        # x = +1 (mod m_{j-1}),  x = -1 (mod m_i) for i <= j-2
        residues = [-1] * (j - 2) + [1]
        x0 = _crt(residues, primes)
        if x0 == 0:
            x0 = M[-1]
        floor = floors[j - 2]
        k0 = max(0, -(-(floor - x0) // M[-1]))  # ceil((floor - x0)/M)
        cand = x0 + k0 * M[-1]
        while cand <= cap:
            if cand > max(primes[-1], 4) and is_probable_prime(cand):
                break
            cand += M[-1]
        else:
            raise SearchCapExceeded(
                f"no qualifying prime for level {j} below cap {cap}"
            )
        if cand > cap:
            raise SearchCapExceeded(f"no qualifying prime for level {j} below cap {cap}")
        primes.append(cand)
        M.append(M[-1] * cand)
        P.append(P[-1] * cand + 1)
        if math.gcd(P[-1], M[-1]) != 1:
            raise AssertionError("tower congruences failed to keep P, M coprime")
        if M[-1] > _MAX_MODULUS:
            raise ValueError(f"modulus {M[-1]} exceeds the supported index range")

    compliant = all(
        primes[j] > 40 * M[j - 1] ** 5 for j in range(1, depth)
    )
    return ModulusTower(
        primes=tuple(primes),
        M=tuple(M),
        P=tuple(P),
        mode="paper_compliant" if compliant else "relaxed",
    )


def build_tower_mode(m1: int, depth: int, mode: str, search_cap=None) -> ModulusTower:
    """Convenience builder: 'relaxed' takes the smallest qualifying
    primes, 'paper_compliant' floors each m_j above 40*M_{j-1}^5."""
    if mode == "relaxed":
        return build_tower(m1, depth, search_cap=search_cap)
    if mode != "paper_compliant":
        raise ValueError(f"unknown mode {mode!r}")
    tower = build_tower(m1, 1)
    floors = []
    for j in range(2, depth + 1):
        floors.append(40 * tower.M[-1] ** 5 + 1)
        tower = build_tower(m1, j, growth_floor=floors, search_cap=search_cap)
    return tower


class CircleIndex(NamedTuple):
    """Interval [index/M_level, (index+1)/M_level) of the level grid."""

    level: int
    index: int

    def left_endpoint(self, tower: ModulusTower) -> Fraction:
        return Fraction(self.index, tower.modulus(self.level))

    def refine(self, tower: ModulusTower) -> range:
        """Child index block one level down the tower."""
        m_next = tower.primes[self.level]
        return range(self.index * m_next, (self.index + 1) * m_next)


def rotate(tower: ModulusTower, x: CircleIndex, steps: int) -> CircleIndex:
    M = tower.modulus(x.level)
    P = tower.step(x.level)
    return CircleIndex(x.level, (x.index + steps * P) % M)


@dataclass(frozen=True)
class HalfCirclePartition:
    """Left run L^n, the straddling middle interval, and the right run R^n."""

    level: int
    modulus: int

    @property
    def middle(self) -> int:
        return (self.modulus - 1) // 2

    @property
    def left_range(self) -> range:
        return range(0, (self.modulus - 1) // 2)

    @property
    def right_range(self) -> range:
        return range((self.modulus + 1) // 2, self.modulus)

    def weight(self, index: int) -> int:
        """+1 on L^n, 0 on the middle interval, -1 on R^n."""
        mid = self.middle
        if index < mid:
            return 1
        if index == mid:
            return 0
        return -1


def half_partition(tower: ModulusTower, n: int) -> HalfCirclePartition:
    return HalfCirclePartition(level=n, modulus=tower.modulus(n))


def orbit_visit_balance(tower: ModulusTower, x: CircleIndex, steps: int):
    """Visit counts of the rotation orbit from x to L/R/middle.

    For steps >= 0 the window is i in {0, ..., steps-1}; for steps < 0 it
    is {steps+1, ..., 0}.  Returns (visits_L, visits_R, visits_middle);
    the running-count value 1 + visits_L - visits_R is exposed by
    callers that need it.
    """
    n = x.level
    M = tower.modulus(n)
    if abs(steps) > M:
        raise ValueError(f"|steps| must be <= {M}")
    P = tower.step(n)
    mid = (M - 1) // 2
    if steps >= 0:
        window = range(0, steps)
    else:
        window = range(steps + 1, 1)
    l_cnt = r_cnt = m_cnt = 0
    for i in window:
        l = (x.index + i * P) % M
        if l < mid:
            l_cnt += 1
        elif l == mid:
            m_cnt += 1
        else:
            r_cnt += 1
    return l_cnt, r_cnt, m_cnt


def running_count_value(tower: ModulusTower, x: CircleIndex, steps: int) -> int:
    """1 + visits_L - visits_R over the orbit window; the value the
    level step functions accumulate along the rotation."""
    l, r, _ = orbit_visit_balance(tower, x, steps)
    return 1 + l - r


class StepFunction:
    """Exact function constant on the M_n level-n intervals."""

    __slots__ = ("level", "values")

    def __init__(self, level: int, values):
        self.level = level
        if isinstance(values, np.ndarray):
            self.values = values
        else:
            self.values = list(values)

    @property
    def modulus(self) -> int:
        return len(self.values)

    def __getitem__(self, l):
        v = self.values[l]
        return int(v) if isinstance(self.values, np.ndarray) else v

    def integral(self) -> Fraction:
        if isinstance(self.values, np.ndarray):
            total = int(self.values.sum(dtype=np.int64))
        else:
            total = sum(self.values, Fraction(0))
        return Fraction(total, self.modulus) if not isinstance(total, Fraction) else total / self.modulus

    def to_csv(self) -> str:
        """Plot-ready rows: index, left_endpoint, value (exact strings)."""
        lines = ["index,left_endpoint,value"]
        M = self.modulus
        for l in range(M):
            v = self[l]
            lines.append(
                f"{l},{format_rational(Fraction(l, M))},{format_rational(Fraction(v))}"
            )
        return "\n".join(lines) + "\n"


def _orbit_weights(tower: ModulusTower, n: int):
    """Orbit order arrays: index at step i, and the L/R weight there."""
    M = tower.modulus(n)
    P = tower.step(n)
    mid = (M - 1) // 2
    orbit = (np.arange(M, dtype=np.int64) * P) % M
    w = np.where(orbit < mid, 1, np.where(orbit == mid, 0, -1)).astype(np.int64)
    return orbit, w


@lru_cache(maxsize=16)
def _phi_values(tower: ModulusTower, n: int):
    orbit, w = _orbit_weights(tower, n)
    M = tower.modulus(n)
    partial = np.empty(M, dtype=np.int64)
    partial[0] = 0
    np.cumsum(w[:-1], out=partial[1:])
    phi = np.empty(M, dtype=np.int64)
    phi[orbit] = partial
    phi.setflags(write=False)
    return phi


def phi_level(tower: ModulusTower, n: int) -> StepFunction:
    """The level-n counting potential: zero at index 0, stepping by +1
    after a left-half visit and -1 after a right-half visit along the
    rotation orbit.  The full orbit balances, so the partial sums give a
    well-defined function of the index.
    """
    tower.require_level(n)
    return StepFunction(n, _phi_values(tower, n))


def psi_level(tower: ModulusTower, n: int) -> StepFunction:
    phi = phi_level(tower, n)
    return StepFunction(n, 1 - phi.values)


def one_step_quasi_cost(tower: ModulusTower, n: int, phi: Optional[StepFunction] = None) -> StepFunction:
    """phi + psi composed with one rotation step: 0 on L^n, 1 on the
    middle interval, 2 on R^n."""
    if phi is None:
        phi = phi_level(tower, n)
    M = tower.modulus(n)
    P = tower.step(n)
    idx = (np.arange(M, dtype=np.int64) + P) % M
    return StepFunction(n, 1 + phi.values - phi.values[idx])


@dataclass
class OscillationReport:
    """Empirical oscillation extrema of phi^n with the bounds that carry
    explicit constants (level 2); deeper levels report empirics only."""

    level: int
    neighbor_max: int
    neighbor_bound: Optional[int]
    block_rise_min: int
    block_rise_bound: Optional[Fraction]
    boundary_spread: int
    boundary_bound: Optional[int]
    visit_balance_max: Optional[int]
    visit_balance_bound: Optional[int]

    @property
    def neighbor_ok(self):
        return self.neighbor_bound is None or self.neighbor_max <= self.neighbor_bound

    @property
    def block_rise_ok(self):
        return self.block_rise_bound is None or self.block_rise_min >= self.block_rise_bound

    @property
    def visit_balance_ok(self):
        return self.visit_balance_bound is None or (
            self.visit_balance_max is not None
            and self.visit_balance_max <= self.visit_balance_bound
        )


def verify_oscillations(tower: ModulusTower, n: int) -> OscillationReport:
    """Exhaustive oscillation scan of phi^n (report style; callers decide
    which bounds are assertable for the tower's growth mode)."""
    if n < 2:
        raise ValueError("oscillation bounds concern levels >= 2")
    tower.require_level(n)
    phi = phi_level(tower, n).values
    M = tower.modulus(n)
    m_n = tower.primes[n - 1]
    M_prev = tower.M[n - 2]
    M1 = tower.M[0]

    neighbor_max = int(np.abs(phi - np.roll(phi, -1)).max())

    starts = phi[0::m_n]
    mids = phi[(m_n - 1) // 2 :: m_n]
    block_rise_min = int(mids.min() - starts.max())

    sub = np.arange(M, dtype=np.int64) % m_n
    k1 = sub + 1
    boundary = np.minimum(k1, m_n - k1) < M_prev
    bvals = phi[boundary]
    boundary_spread = int(bvals.max() - bvals.min()) if bvals.size else 0

    visit_balance_max = None
    visit_balance_bound = None
    if n == 2:
        # windowed orbit sums over m_2 - 2 steps, all starting points
        _, w = _orbit_weights(tower, n)
        S = np.concatenate([[0], np.cumsum(np.concatenate([w, w]))])
        k = m_n - 2
        D = S[k : k + M] - S[:M]
        visit_balance_max = int(np.abs(D).max())
        visit_balance_bound = 4 * M1

    return OscillationReport(
        level=n,
        neighbor_max=neighbor_max,
        neighbor_bound=4 * M1 * M1 if n == 2 else None,
        block_rise_min=block_rise_min,
        block_rise_bound=Fraction(m_n, 2 * M_prev) - 10 * M1**3 if n == 2 else None,
        boundary_spread=boundary_spread,
        boundary_bound=None,
        visit_balance_max=visit_balance_max,
        visit_balance_bound=visit_balance_bound,
    )
