"""Exact rational scalars with a distinguished +infinity.

Everything downstream (solvers, constructions, reports) works in
`fractions.Fraction`; infinity is the singleton `INF`, never a large
sentinel number.  Serialization is the canonical "p/q" form with q > 0
and gcd(p, q) = 1, so byte-identical inputs give byte-identical outputs.
"""

from __future__ import annotations

from fractions import Fraction


class _Infinity:
    """The single +infinity value used for forbidden transport cells."""

    __slots__ = ()

    def __repr__(self):
        return "INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("otlab-inf")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()


def is_inf(x) -> bool:
    return x is INF


def as_fraction(x) -> Fraction:
    """Coerce ints/strings/Fractions to Fraction; INF is rejected."""
    if x is INF:
        raise ValueError("expected a finite rational, got INF")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational_str(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def parse_rational_str(s: str):
    """Parse 'p/q', 'p', or 'inf' (case-insensitive)."""
    t = s.strip()
    if t.lower() in ("inf", "+inf", "infinity"):
        return INF
    if "/" in t:
        num, den = t.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(t))


def format_rational(x) -> str:
    """Canonical 'p/q' string (always with the denominator), or 'inf'."""
    if x is INF:
        return "inf"
    f = as_fraction(x)
    return f"{f.numerator}/{f.denominator}"
