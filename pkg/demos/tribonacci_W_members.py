"""Explicit members of W_beta at the tribonacci base.

At beta with beta^3 = beta^2 + beta + 1, 1 = .110110110..., so the base is
above the Komornik-Loreti constant and W_beta has uncountably many points.
The run-length construction writes them down.
"""

from __future__ import annotations

from univoque.membership import in_U
from univoque.symseq import sequence
from univoque.cli import parse_beta
from univoque.numerics import PrecisionContext
from univoque.wconstruct import build_M0_key, omega_of_M, parse_rate, rate_checkpoints, subsequence, subsequence_for_rate

dom = parse_beta("poly:x^3-x^2-x-1", 1, PrecisionContext())
d = dom.expansion_of_one()
print("d(beta) =", "".join(map(str, d.prefix(12))), "...")

M0 = build_M0_key(d, horizon=2000)
print("run lengths M0:", M0.terms(8), "...")

omega = omega_of_M(M0)
print("omega(M0) =", "".join(map(str, omega.prefix(40))), "...")
# The sequence is not periodic, so the verdict is a horizon verdict: no shift up
# to the horizon breaks the condition.
v = in_U(omega, d, horizon=2000)
print("omega(M0) in U:", v.status.value, "| no failure up to horizon:", v.passes_to_horizon)

# Any subsequence of M0 is again a valid run-length sequence; skipping terms
# lengthens the runs and moves the point closer to the boundary.
for keep in ([1, 3, 5], [2, 4], [1]):
    M = subsequence(M0, keep, tail_from=6)
    w = omega_of_M(M)
    print(f"keep {keep}, lengths {M.terms(5)}: no failure up to horizon:", in_U(w, d, horizon=2000).passes_to_horizon)

# A prescribed approach rate: theta_n (1 - Pi(sigma^n omega)) stays bounded.
rate = parse_rate("theta=2^n")
Mr = subsequence_for_rate(M0, rate, dom.beta)
for cp in rate_checkpoints(Mr, rate, dom, count=5):
    print(f"  s={cp.s:4d}  value={float(cp.value.hi):.4f}  bound={float(cp.bound.hi):.4f}  ok={cp.ok}")
