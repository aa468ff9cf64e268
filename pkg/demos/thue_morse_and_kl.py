"""The Thue-Morse sequence as a mirror sequence, and the base it expands 1 in.

Run with ``python3 demos/thue_morse_and_kl.py``.
"""

from __future__ import annotations

from univoque import classify_base, pmirror, quasi_greedy
from univoque.mirror import admissible_words, komornik_loreti_domain

# Doubling the generator t = 0 (reflect, then bump the last digit) gives Thue-Morse.
tm = pmirror((0,), 1)
print("mirror sequence of t=0:", "".join(map(str, tm.prefix(32))))

# The smallest base whose quasi-greedy expansion of 1 is that sequence.
dom = komornik_loreti_domain(1)
lo, hi = dom.beta.enclosure.decimal_bounds(15)
print(f"Komornik-Loreti constant lies in [{lo}, {hi}]")

# Replaying the greedy algorithm at this base returns the same digits.
replay = quasi_greedy(1, dom, 32)
print("quasi-greedy replay agrees for 32 digits:", tuple(replay) == tm.prefix(32))

# From this base on, W_beta is nonempty.
c = classify_base(dom.beta, 1, horizon=500, domain=dom, with_dimension=False)
print("classification at the constant:", c.w_status.kind, "/", c.limsup_status.kind)

# Other generators of period 3 give other mirror bases.
for t in admissible_words(3, 1):
    print("admissible generator", "".join(map(str, t)), "->", "".join(map(str, pmirror(t, 1).prefix(24))))
