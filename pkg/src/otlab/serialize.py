"""Deterministic artifact formats.

All rationals go out as canonical "p/q" strings, JSON keys are sorted,
and nothing carries a timestamp, so identical inputs give byte-identical
artifacts (the regression tests diff them).
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .circle import ModulusTower
from .rational import format_rational
from .tau import TauLevel


def rle_encode(values) -> list:
    """[[value, run_length], ...] over the sequence."""
    out = []
    for v in values:
        v = int(v)
        if out and out[-1][0] == v:
            out[-1][1] += 1
        else:
            out.append([v, 1])
    return out


def rle_decode(pairs) -> np.ndarray:
    if not pairs:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate([np.full(c, v, dtype=np.int64) for v, c in pairs])


def tower_to_dict(tower: ModulusTower) -> dict:
    return {
        "primes": list(tower.primes),
        "moduli": list(tower.M),
        "numerators": list(tower.P),
        "mode": tower.mode,
    }


def tau_level_to_dict(level: TauLevel, tower: ModulusTower) -> dict:
    return {
        "level": level.level,
        "modulus": level.modulus,
        "primes": list(tower.primes[: level.level]),
        "tau_rle": rle_encode(level.tau),
        "good_rle": rle_encode(level.good_mask.astype(np.int64)),
        "singular_rle": rle_encode(level.singular_mask.astype(np.int64)),
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1)


def ledger_to_dict(ledger) -> dict:
    return {
        "level": ledger.level,
        "singular_mass": format_rational(ledger.singular_mass),
        "good_deviation": format_rational(ledger.good_deviation),
        "change_measure": format_rational(ledger.change_measure),
    }


def diagnostic_to_dict(diag, dual_value: Fraction, correction_norm: Fraction) -> dict:
    """One JSONL record of the per-level diagnostics series."""
    return {
        "level": diag.level,
        "dual_value": format_rational(dual_value),
        "correction_norm": format_rational(correction_norm),
        "carrier_measure": format_rational(diag.carrier_measure),
        "negative_mass": format_rational(diag.negative_mass),
        "singular_set_measure": format_rational(diag.singular_set_measure),
        "small_set_sup": {
            format_rational(d): format_rational(v)
            for d, v in sorted(diag.small_set_sup.items())
        },
    }
