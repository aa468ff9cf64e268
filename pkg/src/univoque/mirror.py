"""Admissible words, p-mirror sequences and de Vries-Komornik bases."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import CrossCheckFailed, NoSignChange
from .expand import ExpansionDomain, base_from_expansion, projection_at, quasi_greedy
from .numerics import DEFAULT_CONTEXT, PrecisionContext, RefinableReal
from .symseq import Alphabet, PMirrorSequence, Word

REPLAY_DIGITS = 64


@dataclass(frozen=True)
class Admissibility:
    """Outcome of the admissibility test; ``family`` is 1, 2, or 0 for the last-digit rule."""

    ok: bool
    index: int | None = None
    family: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def is_admissible(t: Sequence[int], alpha: int) -> Admissibility:
    """Check t_p < alpha and, for every rotation point i, both cyclic inequalities.

    With u = t_1..t_p^+ the two families read

        reflect(t_i..t_p t_1..t_{i-1}) <= u
        t_i..t_p^+ reflect(t_1..t_{i-1}) <= u
    """
    t = Alphabet(alpha).check(t)
    if not t:
        raise ValueError("word must be nonempty")
    p = len(t)
    if t[-1] >= alpha:
        return Admissibility(False, p, 0, f"last digit {t[-1]} is not below alpha={alpha}")
    u = t[:-1] + (t[-1] + 1,)
    for i in range(1, p + 1):
        head, tail = t[i - 1 :], t[: i - 1]
        first = tuple(alpha - x for x in head + tail)
        if first > u:
            return Admissibility(False, i, 1, f"reflected rotation {first} exceeds {u}")
        second = head[:-1] + (head[-1] + 1,) + tuple(alpha - x for x in tail)
        if second > u:
            return Admissibility(False, i, 2, f"{second} exceeds {u}")
    return Admissibility(True)


def admissible_words(p: int, alpha: int):
    """All admissible words of length p, by exhaustive filtering (small p only)."""
    for t in itertools.product(range(alpha + 1), repeat=p):
        if is_admissible(t, alpha):
            yield t


def pmirror(t: Sequence[int] | str, alpha: int) -> PMirrorSequence:
    if isinstance(t, str):
        t = Word.parse(t, alpha).digits
    verdict = is_admissible(t, alpha)
    if not verdict:
        raise ValueError(f"generator {tuple(t)} is not admissible at i={verdict.index}: {verdict.detail}")
    return PMirrorSequence(tuple(t), alpha)


def _coarse_bracket(d, alpha: int, lo: Fraction, hi: Fraction, steps: int = 64) -> tuple[Fraction, Fraction]:
    """Narrow [lo, hi] to one grid cell where Pi_beta(d) - 1 changes sign.

    Pi_beta(d) is strictly decreasing in beta, so the first grid point with a
    value below one closes the bracket.
    """
    prev = lo
    for k in range(1, steps + 1):
        x = lo + (hi - lo) * k / steps
        iv = projection_at(d, alpha, x, 64)
        if iv.hi < 1:
            return prev, x
        if iv.lo > 1:
            prev = x
    if prev == lo:
        return lo, hi
    return prev, hi


def dvk_number(
    t: Sequence[int] | str,
    alpha: int,
    tol=Fraction(1, 10**12),
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    replay: int = REPLAY_DIGITS,
) -> RefinableReal:
    """The base whose quasi-greedy expansion of 1 is the p-mirror sequence generated by t.

    The enclosure is self-checked: at the midpoint of a much tighter
    enclosure the quasi-greedy algorithm must reproduce the first ``replay``
    digits of the sequence.
    """
    return dvk_domain(t, alpha, tol, ctx, replay).beta


def dvk_domain(t, alpha: int, tol=Fraction(1, 10**12), ctx: PrecisionContext = DEFAULT_CONTEXT, replay: int = REPLAY_DIGITS) -> ExpansionDomain:
    """Like dvk_number, but returns the domain with the p-mirror d attached."""
    d = pmirror(t, alpha)
    tol = Fraction(str(tol)) if isinstance(tol, float) else Fraction(tol)
    lo = 1 + Fraction(1, alpha + 1)
    hi = alpha + 1 - min(tol, Fraction(1, 10**6))
    a, b = _coarse_bracket(d, alpha, lo, hi)
    try:
        beta = base_from_expansion(d, alpha, (a, b), tol, ctx)
    except NoSignChange:
        beta = base_from_expansion(d, alpha, (lo, hi), tol, ctx)
    beta.label = f"dvk({''.join(map(str, d.generator)) if alpha <= 9 else d.generator})"
    _cross_check(d, beta, alpha, replay, ctx)
    beta.interval(_bits_for(tol))
    return ExpansionDomain(alpha, beta, ctx, d_hint=d)


def _bits_for(tol: Fraction) -> int:
    bits = 1
    while Fraction(1, 1 << bits) > tol:
        bits += 1
    return bits


def _cross_check(d: PMirrorSequence, beta: RefinableReal, alpha: int, replay: int, ctx) -> None:
    # an enclosure of width about beta^-(n + 16) keeps the midpoint's d(beta) equal to d
    # in the first n digits; log2(beta) > 1/2 for these bases, so 2 bits per digit suffice
    n = max(replay, REPLAY_DIGITS)
    bits = 2 * (n + 24)
    iv = beta.interval(bits)
    mid = iv.mid
    got = quasi_greedy(1, ExpansionDomain(alpha, RefinableReal.literal(mid), ctx), n, ctx).digits
    want = d.prefix(n)
    if got != want:
        k = next(i for i in range(n) if got[i] != want[i])
        raise CrossCheckFailed(f"quasi-greedy replay at the enclosure midpoint deviates at digit {k + 1}")


def komornik_loreti(alpha: int, tol=Fraction(1, 10**12), ctx: PrecisionContext = DEFAULT_CONTEXT) -> RefinableReal:
    """The smallest de Vries-Komornik base, generated by the single digit floor(alpha/2)."""
    return dvk_number((alpha // 2,), alpha, tol, ctx)


def komornik_loreti_domain(alpha: int, tol=Fraction(1, 10**12), ctx: PrecisionContext = DEFAULT_CONTEXT) -> ExpansionDomain:
    return dvk_domain((alpha // 2,), alpha, tol, ctx)
