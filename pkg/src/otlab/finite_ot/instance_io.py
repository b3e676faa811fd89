"""Bit-exact JSON instance files.

Schema: {"n": int, "cost": [[rational or "inf"]], "mu": [...], "nu": [...]}
with every rational serialized as a canonical "p/q" string.
"""

from __future__ import annotations

import json

from ..rational import format_rational, parse_rational_str
from .types import CostMatrix, Marginals


def instance_to_json(cost: CostMatrix, marg: Marginals) -> str:
    obj = {
        "n": cost.n_rows,
        "cost": [[format_rational(v) for v in row] for row in cost.entries],
        "mu": [format_rational(v) for v in marg.mu],
        "nu": [format_rational(v) for v in marg.nu],
    }
    return json.dumps(obj, sort_keys=True, indent=1)


def instance_from_json(text: str):
    obj = json.loads(text)
    cost = CostMatrix([[parse_rational_str(v) for v in row] for row in obj["cost"]])
    marg = Marginals(
        [parse_rational_str(v) for v in obj["mu"]],
        [parse_rational_str(v) for v in obj["nu"]],
    )
    return cost, marg


def load_instance(path):
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_json(fh.read())


def save_instance(path, cost: CostMatrix, marg: Marginals):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(instance_to_json(cost, marg))
        fh.write("\n")
