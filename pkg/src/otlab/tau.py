"""Inductive construction of the interval permutations tau_n.

Level 1 shifts the outermost interval to the spot left of the middle
(and mirror-symmetrically on the right) while the bulk drifts one step
the other way; each refinement keeps tau on the interior of good blocks,
re-routes the overflowing boundary sub-blocks into the gaps they leave,
and splits singular blocks into compensating good halves plus a small
singular core thrown into the middle region of the image block.

Displacements are stored as step counts tau(l) with the induced map
sigma(l) = l + tau(l) * P_n (mod M_n).  Wherever a sub-block is assigned
a target, the step count is the unique representative in (-M_n, M_n)
whose full rotation orbit (endpoints included) avoids the middle index;
existence is checked, never assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .circle import ModulusTower, StepFunction, phi_level


class GrowthTooSmall(Exception):
    """The boundary/gap combinatorics of a refinement step do not fit."""


def _avoidance_step(M: int, Pinv: int, mid: int, src: int, dst: int) -> int:
    """Unique step count in (-M, M) from src to dst with a middle-free
    orbit.  Exactly one of the two candidates works when neither endpoint
    is the middle index."""
    t0 = ((dst - src) * Pinv) % M
    if t0 == 0:
        return 0
    istar = ((mid - src) * Pinv) % M
    if istar == 0 or istar == t0:
        raise GrowthTooSmall(
            f"cannot route {src} -> {dst} around the middle index {mid}"
        )
    return t0 if istar > t0 else t0 - M


def keep_and_fill_block(tau, lo, m, t, q_block, M, Pinv, mid):
    """Write tau on one parent block: keep the parent's step t on the
    interior, route the overflowing boundary sub-blocks onto the gaps at
    the opposite end of the image block (order-preserving)."""
    tau[lo : lo + m] = t
    if t > 0:
        srcs = range(m - t, m)
        dsts = range(q_block * m, q_block * m + t)
    elif t < 0:
        srcs = range(0, -t)
        dsts = range(q_block * m + m + t, q_block * m + m)
    else:
        return
    for s, d in zip(srcs, dsts):
        tau[lo + s] = _avoidance_step(M, Pinv, mid, lo + s, d)


def _avoidance_violations(tau, P_inv: int, mid: int):
    """Indices whose stored orbit (i = 0..tau or tau..0) hits the middle."""
    M = tau.shape[0]
    idx = np.arange(M, dtype=np.int64)
    istar = ((mid - idx) * P_inv) % M
    pos = (tau > 0) & (istar <= tau)
    neg = (tau < 0) & (istar >= M + tau)
    zero_mid = (tau != 0) & (idx == mid)
    return np.nonzero(pos | neg | zero_mid)[0]


@dataclass
class SingularLedger:
    """Exact per-level accounting of the construction's mass movements."""

    level: int
    singular_mass: Fraction
    good_deviation: Fraction
    change_measure: Fraction


class TauLevel:
    """A level-n interval permutation with its good/singular bookkeeping.

    tau, sigma are int64 arrays over Z/M_nZ; good/singular are disjoint
    boolean masks excluding the level-1 middle block, whose indices keep
    tau = 0 at every level.
    """

    def __init__(self, level, tau, sigma, good_mask, singular_mask,
                 changed_mask=None, parent: Optional["TauLevel"] = None):
        self.level = level
        self.tau = tau
        self.sigma = sigma
        self.good_mask = good_mask
        self.singular_mask = singular_mask
        self.changed_mask = changed_mask
        self.parent = parent
        for arr in (tau, sigma, good_mask, singular_mask):
            arr.setflags(write=False)
        if changed_mask is not None:
            changed_mask.setflags(write=False)

    @property
    def modulus(self) -> int:
        return int(self.tau.shape[0])

    def good_indices(self):
        return np.nonzero(self.good_mask)[0]

    def singular_indices(self):
        return np.nonzero(self.singular_mask)[0]

    def middle1_mask(self, tower: ModulusTower):
        """Indices below the level-1 middle block."""
        M = self.modulus
        span = M // tower.M[0]
        digit = np.arange(M, dtype=np.int64) // span
        return digit == (tower.M[0] - 1) // 2


def build_tau_level1(tower: ModulusTower) -> TauLevel:
    """The seed permutation: outer blocks jump next to the middle, the
    left bulk steps left, the right bulk steps right, middle fixed."""
    tower.require_level(1)
    M = tower.M[0]
    half = (M - 3) // 2
    mid = (M - 1) // 2
    tau = np.zeros(M, dtype=np.int64)
    tau[0] = half
    tau[1 : mid] = -1
    tau[mid] = 0
    tau[mid + 1 : M - 1] = 1
    tau[M - 1] = -half
    sigma = (np.arange(M, dtype=np.int64) + tau * tower.P[0]) % M

    good = np.zeros(M, dtype=bool)
    good[1:mid] = True
    good[mid + 1 : M - 1] = True
    singular = np.zeros(M, dtype=bool)
    singular[0] = singular[M - 1] = True

    level = TauLevel(1, tau, sigma, good, singular)
    _require_permutation(level)
    bad = _avoidance_violations(tau, tower.step_inverse(1), mid)
    if bad.size:
        raise GrowthTooSmall(f"middle avoidance fails at level 1: {bad[:5]}")
    return level


def _require_permutation(level: TauLevel):
    counts = np.bincount(level.sigma, minlength=level.modulus)
    if not (counts == 1).all():
        clash = np.nonzero(counts > 1)[0][:1]
        src = np.nonzero(level.sigma == clash[0])[0] if clash.size else []
        raise GrowthTooSmall(
            f"sigma is not a permutation at level {level.level}; "
            f"image {clash} hit by {list(src)[:4]}"
        )


def extend_tau(prev: TauLevel, tower: ModulusTower) -> TauLevel:
    """Refine a level-(n-1) permutation to level n."""
    n = prev.level + 1
    tower.require_level(n)
    m = tower.primes[n - 1]
    M = tower.M[n - 1]
    P = tower.P[n - 1]
    Pinv = tower.step_inverse(n)
    mid = (M - 1) // 2
    M_prev = tower.M[n - 2]
    phi_prev = phi_level(tower, n - 1).values

    tau = np.zeros(M, dtype=np.int64)
    good = np.zeros(M, dtype=bool)
    singular = np.zeros(M, dtype=bool)
    half_sub = (m - 1) // 2

    def fill_gaps(block_lo, srcs, dsts):
        for s, d in zip(srcs, dsts):
            l_src = block_lo + int(s)
            tau[l_src] = _avoidance_step(M, Pinv, mid, l_src, int(d))

    for p in range(M_prev):
        t = int(prev.tau[p])
        q = int(prev.sigma[p])
        lo = p * m
        block = slice(lo, lo + m)
        is_singular_parent = bool(prev.singular_mask[p])
        dphi = int(phi_prev[q]) - int(phi_prev[p]) if is_singular_parent else 0

        if is_singular_parent and dphi < 0:
            raise GrowthTooSmall(
                f"singular parent {p} at level {n - 1} has rising potential"
            )

        if not is_singular_parent or dphi == 0:
            keep_and_fill_block(tau, lo, m, t, q, M, Pinv, mid)
            if prev.good_mask[p] or is_singular_parent:
                good[block] = True
            continue

        tau_r = t + dphi * M_prev
        tau_l = t - dphi * M_prev
        if tau_r <= 0 or tau_l >= 0 or (-tau_l) + tau_r > m:
            raise GrowthTooSmall(
                f"singular split at level {n} does not fit: "
                f"tau_r={tau_r}, tau_l={tau_l}, m={m}"
            )
        is_sing_sub = np.zeros(m, dtype=bool)
        is_sing_sub[: -tau_l] = True
        is_sing_sub[m - tau_r :] = True
        subs = np.arange(m)
        good_subs = subs[~is_sing_sub]
        right = good_subs >= half_sub
        tau[lo + good_subs[right]] = tau_r
        tau[lo + good_subs[~right]] = tau_l
        covered = np.zeros(m, dtype=bool)
        covered[good_subs[right] + tau_r] = True
        covered[good_subs[~right] + tau_l] = True
        gaps = subs[~covered]
        sing_subs = subs[is_sing_sub]
        if gaps.shape[0] != sing_subs.shape[0]:
            raise GrowthTooSmall(
                f"gap count {gaps.shape[0]} != singular count "
                f"{sing_subs.shape[0]} in parent {p}"
            )
        fill_gaps(lo, sing_subs, q * m + gaps)
        good[lo + good_subs] = True
        singular[lo + sing_subs] = True

    changed = tau != np.repeat(prev.tau, m)

    sigma = (np.arange(M, dtype=np.int64) + tau * P) % M
    level = TauLevel(n, tau, sigma, good, singular, changed, parent=prev)
    _require_permutation(level)
    bad = _avoidance_violations(tau, Pinv, mid)
    if bad.size:
        raise GrowthTooSmall(
            f"middle avoidance fails at level {n} for {bad.size} indices "
            f"(first: {bad[:5]})"
        )
    return level


def quasi_cost(level: TauLevel, tower: ModulusTower) -> StepFunction:
    """q(l) = phi(l) + psi(sigma(l)) = 1 + phi(l) - phi(sigma(l))."""
    phi = phi_level(tower, level.level).values
    return StepFunction(level.level, 1 + phi - phi[level.sigma])


def potential_drop(level: TauLevel, tower: ModulusTower):
    """phi - phi o sigma as an int64 array (quasi-cost minus one)."""
    phi = phi_level(tower, level.level).values
    return phi - phi[level.sigma]


def singular_mass(level: TauLevel, tower: ModulusTower) -> Fraction:
    """Exact total of (phi - phi o sigma)/M over the singular set;
    -1 + 3/M_1 at level 1."""
    drop = potential_drop(level, tower)
    total = int(drop[level.singular_mask].sum(dtype=np.int64))
    return Fraction(total, level.modulus)


def refinement_deviation(level: TauLevel, tower: ModulusTower) -> Fraction:
    """L1 distance between the potential drop and its parent value over
    the children of good parents; nonzero only on re-routed boundary
    sub-blocks, and of order M^2/m at level 2."""
    if level.parent is None:
        return Fraction(0)
    m = tower.primes[level.level - 1]
    drop = potential_drop(level, tower)
    parent_drop = potential_drop(level.parent, tower)
    gp_children = np.repeat(level.parent.good_mask, m)
    diff = np.abs(drop - np.repeat(parent_drop, m))[gp_children]
    return Fraction(int(diff.sum(dtype=np.int64)), level.modulus)


def singular_ledger(level: TauLevel, tower: ModulusTower) -> SingularLedger:
    drop = potential_drop(level, tower)
    M = level.modulus
    good_dev = int(np.abs(1 - drop[level.good_mask]).sum(dtype=np.int64))
    if level.changed_mask is not None and level.parent is not None:
        m = tower.primes[level.level - 1]
        good_parent_children = np.repeat(level.parent.good_mask, m)
        n_changed = int((level.changed_mask & good_parent_children).sum())
    else:
        n_changed = 0
    return SingularLedger(
        level=level.level,
        singular_mass=singular_mass(level, tower),
        good_deviation=Fraction(good_dev, M),
        change_measure=Fraction(n_changed, M),
    )


@dataclass
class LevelReport:
    """Machine checks of every construction invariant at one level."""

    level: int
    permutation_ok: bool
    middle_avoidance_ok: bool
    nesting_ok: bool
    tau_zero_on_middle1: bool
    partition_ok: bool
    singular_count: int
    singular_count_ok: bool
    change_per_good_parent_ok: bool
    drop_nonpositive_on_singular: bool
    singular_mass: Fraction
    good_deviation: Fraction
    change_measure: Fraction
    refinement_deviation: Fraction

    @property
    def hard_invariants_ok(self) -> bool:
        return (
            self.permutation_ok
            and self.middle_avoidance_ok
            and self.nesting_ok
            and self.tau_zero_on_middle1
            and self.partition_ok
            and self.singular_count_ok
            and self.change_per_good_parent_ok
        )


def verify_level(level: TauLevel, tower: ModulusTower) -> LevelReport:
    n = level.level
    M = level.modulus
    mid = (M - 1) // 2
    counts = np.bincount(level.sigma, minlength=M)
    permutation_ok = bool((counts == 1).all())

    bad = _avoidance_violations(level.tau, tower.step_inverse(n), mid)
    middle_avoidance_ok = bad.size == 0

    if level.parent is not None:
        m = tower.primes[n - 1]
        parent_of = np.arange(M, dtype=np.int64) // m
        nesting_ok = bool(
            (level.sigma // m == level.parent.sigma[parent_of]).all()
        )
    else:
        nesting_ok = True

    mid1 = level.middle1_mask(tower)
    tau_zero_on_middle1 = bool((level.tau[mid1] == 0).all())
    overlap = level.good_mask & level.singular_mask
    partition_ok = bool(
        not overlap.any()
        and ((level.good_mask | level.singular_mask) ^ mid1).all()
    )

    singular_count = int(level.singular_mask.sum())
    if n == 1:
        singular_count_ok = singular_count == 2
    else:
        singular_count_ok = singular_count < 2 * tower.M[n - 2] ** 2

    if level.parent is not None:
        m = tower.primes[n - 1]
        M_prev = tower.M[n - 2]
        ch = level.changed_mask.reshape(M_prev, m).sum(axis=1)
        change_per_good_parent_ok = bool(
            (ch[level.parent.good_mask] <= M_prev).all()
        )
    else:
        change_per_good_parent_ok = True

    drop = potential_drop(level, tower)
    drop_nonpositive = bool((drop[level.singular_mask] <= 0).all())

    ledger = singular_ledger(level, tower)
    return LevelReport(
        level=n,
        permutation_ok=permutation_ok,
        middle_avoidance_ok=middle_avoidance_ok,
        nesting_ok=nesting_ok,
        tau_zero_on_middle1=tau_zero_on_middle1,
        partition_ok=partition_ok,
        singular_count=singular_count,
        singular_count_ok=singular_count_ok,
        change_per_good_parent_ok=change_per_good_parent_ok,
        drop_nonpositive_on_singular=drop_nonpositive,
        singular_mass=ledger.singular_mass,
        good_deviation=ledger.good_deviation,
        change_measure=ledger.change_measure,
        refinement_deviation=refinement_deviation(level, tower),
    )


def transport_cost_tau(level: TauLevel, tower: ModulusTower):
    """(total, positive_part, good_part) of the quasi-cost, as exact
    fractions of the uniform measure.  total is always 1; positive_part
    is the plan cost under the clipped cost; good_part is the mass on
    good-and-middle indices that survives refinement."""
    q = quasi_cost(level, tower).values
    M = level.modulus
    total = Fraction(int(q.sum(dtype=np.int64)), M)
    positive = Fraction(int(np.where(q > 0, q, 0).sum(dtype=np.int64)), M)
    keep = level.good_mask | level.middle1_mask(tower)
    good_part = Fraction(int(q[keep].sum(dtype=np.int64)), M)
    return total, positive, good_part


def build_levels(tower: ModulusTower, depth: int):
    """Levels 1..depth of the construction on the given tower."""
    levels = [build_tau_level1(tower)]
    for _ in range(depth - 1):
        levels.append(extend_tau(levels[-1], tower))
    return levels
