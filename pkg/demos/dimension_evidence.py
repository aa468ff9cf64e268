"""Dimension of W_beta near the Komornik-Loreti constant.

Lower bounds come from Moran systems of admissible words; the upper side is
the cover sum for the mirror base, which a binary-tree recursion evaluates.
The cover sum only starts to shrink once beta^(-s n) drops below 1 - beta^(-s),
which for small s happens late; the printout shows that.
"""

from __future__ import annotations

from fractions import Fraction

from univoque.cli import parse_beta
from univoque.dimension import prefix_count_slope, wbeta_dimension_series, ybeta_cover_sum
from univoque.mirror import komornik_loreti_domain
from univoque.numerics import PrecisionContext

trib = parse_beta("poly:x^3-x^2-x-1", 1, PrecisionContext())
print("Moran lower bounds at tribonacci:")
for K, s in wbeta_dimension_series(trib, range(2, 11, 2)):
    print(f"  K={K:2d}  dim >= {float(s):.4f}")

kl = komornik_loreti_domain(1)
pm = kl.expansion_of_one()
for s in (Fraction(1, 10), Fraction(1, 2), Fraction(2)):
    vals = [float(ybeta_cover_sum(pm, kl.beta, s, n)) for n in (5, 10, 15, 20)]
    print(f"cover sums at s={s}:", ", ".join(f"{v:.4g}" for v in vals))

print("prefix-count slope at the constant (upper-bound heuristic):")
for n in (10, 20, 30, 40):
    print(f"  n={n}  {prefix_count_slope(kl.beta, 1, n, domain=kl):.3f}")
