"""otlab: exact optimal-transport duality lab.

Two halves:

* ``otlab.finite_ot`` -- an exact-rational transportation solver with
  duality, complementary slackness and cyclical-monotonicity
  certificates, plus the budgeted relaxed dual.
* ``otlab.circle`` / ``otlab.tau`` / ``otlab.duals`` / ``otlab.gap`` --
  a discrete model of circle rotations on Z/MZ that constructs, level by
  level, interval permutations whose dual approximants concentrate a
  singular mass, and the truncated-cost families exhibiting the gap
  between the primal value and the relaxed dual value.
"""

from .rational import INF, as_fraction, format_rational, parse_rational_str

__all__ = ["INF", "as_fraction", "format_rational", "parse_rational_str"]
__version__ = "0.1.0"
