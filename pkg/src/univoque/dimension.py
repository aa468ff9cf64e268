"""Hausdorff-dimension bounds: Moran equations, binary-tree sums and cover sums."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import LevelTooDeep, PrefixFreenessViolated
from .expand import ExpansionDomain
from .numerics import (
    DEFAULT_CONTEXT,
    Interval,
    Ordering,
    PrecisionContext,
    RefinableReal,
    as_real,
    compare,
    find_poly_root,
    rpow,
)
from .symseq import PMirrorSequence, SymbolicSequence

MAX_TREE_LEVEL = 25


def _bits_for(tol) -> int:
    tol = Fraction(str(tol)) if isinstance(tol, float) else Fraction(tol)
    return max(32, math.ceil(-math.log2(tol)) + 8) if tol > 0 else 64


@dataclass
class WordSystem:
    """A finite prefix-free set of words with contraction ratio ``lam`` per digit."""

    words: list[tuple[int, ...]]
    lam: RefinableReal

    def __post_init__(self):
        self.words = [tuple(w) for w in self.words]
        self.lam = as_real(self.lam)
        if not self.words:
            raise ValueError("a word system needs at least one word")
        if any(len(w) == 0 for w in self.words):
            raise ValueError("words must be nonempty")
        if compare(self.lam, 0) is not Ordering.GREATER or compare(self.lam, 1) is not Ordering.LESS:
            raise ValueError("lambda must lie strictly between 0 and 1")
        self.check_prefix_free()

    def check_prefix_free(self) -> None:
        # after sorting, a word that is a prefix of another sits right before some extension of it
        ordered = sorted(set(self.words))
        if len(ordered) != len(self.words):
            raise PrefixFreenessViolated("the system lists a word twice")
        for u, v in zip(ordered, ordered[1:]):
            if v[: len(u)] == u:
                raise PrefixFreenessViolated(f"{u} is a prefix of {v}")

    @property
    def length_multiset(self) -> Counter:
        return Counter(len(w) for w in self.words)

    def with_word(self, w) -> WordSystem:
        return WordSystem(self.words + [tuple(w)], self.lam)


def moran_polynomial(lengths: Counter) -> list[int]:
    """Coefficients (leading first) of sum_L c_L x^L - 1, with x = lam^s."""
    top = max(lengths)
    coeffs = [0] * (top + 1)
    for L, c in lengths.items():
        coeffs[top - L] += c
    coeffs[top] -= 1
    return coeffs


def moran_dimension(V: WordSystem, tol=Fraction(1, 10**12)) -> RefinableReal:
    """The s with sum over v in V of lam^(s |v|) = 1.

    Substituting x = lam^s turns the equation into a polynomial one with a
    single root in (0, 1]; then s = log x / log lam.
    """
    lengths = V.length_multiset
    if len(V.words) == 1:
        return RefinableReal.literal(0, label="moran")
    x = find_poly_root(moran_polynomial(lengths), 0, 1, label="moran-x")
    exact = _rational_log_ratio(x.exact, V.lam.exact)
    if exact is not None:
        return RefinableReal.literal(exact, label="moran")
    s = x.log() / V.lam.log()
    s.label = "moran"
    s.interval(_bits_for(tol))
    return s


def _rational_log_ratio(x: Fraction | None, lam: Fraction | None, qmax: int = 8) -> Fraction | None:
    """r = p/q with x = lam^r, when both are rational and q is small."""
    if x is None or lam is None:
        return None
    for q in range(1, qmax + 1):
        xq, p, power = x**q, 0, Fraction(1)
        while power > xq:
            power *= lam
            p += 1
        if power == xq:
            return Fraction(p, q)
    return None


def moran_residual(V: WordSystem, s: Fraction, bits: int = 96) -> Interval:
    """Enclosure of sum lam^(s |v|) - 1 at a rational s."""
    lam = V.lam.interval(bits + 32)
    total = Interval(0)
    for L, c in V.length_multiset.items():
        total = total + rpow(lam, Interval(s * L), bits) * c
    return total - 1


# ---------------------------------------------------------------------------
# lower bound for dim W_beta from the key construction


def wbeta_words(domain: ExpansionDomain, K: int) -> list[tuple[int, ...]]:
    """v_k = d_1 .. d_{m_k}^- for the first K terms of M0."""
    from .wconstruct import build_M0_key

    d = domain.expansion_of_one()
    M0 = build_M0_key(d)
    words = []
    for k in range(1, K + 1):
        m = M0.term(k)
        w = list(d.prefix(m))
        w[-1] -= 1
        words.append(tuple(w))
    return words


def wbeta_dimension_lower(beta, alpha: int, K: int, tol=Fraction(1, 10**9), domain: ExpansionDomain | None = None) -> RefinableReal:
    """Moran dimension of the first K words of the key construction, with lam = 1/beta.

    This bounds dim_H W_beta from below whenever the key construction applies
    (HypothesisFailed otherwise).
    """
    if domain is None:
        domain = ExpansionDomain(alpha, as_real(beta))
    words = wbeta_words(domain, K)
    V = WordSystem(words, 1 / domain.beta)
    return moran_dimension(V, tol)


def wbeta_dimension_series(domain: ExpansionDomain, Ks: Iterable[int], tol=Fraction(1, 10**9)) -> list[tuple[int, RefinableReal]]:
    """Lower bounds for several K; consecutive differences report the convergence gap."""
    Ks = sorted(set(Ks))
    words = wbeta_words(domain, Ks[-1])
    lam = 1 / domain.beta
    return [(K, moran_dimension(WordSystem(words[:K], lam), tol)) for K in Ks]


# ---------------------------------------------------------------------------
# binary-tree sums
#
# sigma_{1 i_2..i_n} = 1 + sigma_{i_2..i_n} and sigma_{2 i_2..i_n} = 2 sigma_{1 i_2..i_n} - 1,
# so with f_n(g) = S_n at gamma = g:   f_n(g) = g f_{n-1}(g) + g f_{n-1}(g^2),  f_0(g) = g.


def sigma_values(n: int) -> list[int]:
    """sigma_{i_1..i_n} over all 2^n index words, by direct tree enumeration."""
    if n > MAX_TREE_LEVEL:
        raise LevelTooDeep(f"tree enumeration is capped at level {MAX_TREE_LEVEL}")
    out = []
    for idx in itertools.product((1, 2), repeat=n):
        a = 1 if idx and idx[0] == 1 else 2
        sigma = 1 + (a if idx else 0)
        for j in idx[1:]:
            a *= j
            sigma += a
        out.append(sigma)
    return out


def _fixed(iv: Interval, bits: int | None) -> Interval:
    """Outward rounding to multiples of 2^-bits (absolute, so tiny powers stay cheap)."""
    if bits is None:
        return iv
    scale = 1 << bits
    lo = math.floor(iv.lo * scale)
    hi = -math.floor(-iv.hi * scale)
    return Interval(Fraction(lo, scale), Fraction(hi, scale))


def _tree_sum(gamma: Interval, n: int, bits: int | None) -> Interval:
    powers = [gamma]
    for _ in range(n):
        powers.append(_fixed(powers[-1] * powers[-1], bits))
    # level[k] holds f_j(gamma^(2^k)) for the current j
    level = list(powers[: n + 1])
    for j in range(1, n + 1):
        level = [_fixed(powers[k] * (level[k] + level[k + 1]), bits) for k in range(n + 1 - j)]
    return level[0]


@dataclass
class BinaryTreeSum:
    gamma: RefinableReal
    level: int
    value: RefinableReal

    def left(self) -> RefinableReal:
        """S_n^L = gamma S_{n-1}."""
        if self.level == 0:
            raise ValueError("level 0 has no left part")
        return self.gamma * binary_tree_sum(self.gamma, self.level - 1).value

    def right(self) -> RefinableReal:
        return self.value - self.left()


def binary_tree_sum(gamma, n: int, max_level: int = MAX_TREE_LEVEL) -> BinaryTreeSum:
    """S_n = sum over {1,2}^n of gamma^sigma; exact for rational gamma."""
    if n < 0:
        raise ValueError("level must be nonnegative")
    if n > max_level:
        raise LevelTooDeep(f"level {n} exceeds the limit {max_level}")
    g = as_real(gamma)
    if compare(g, 0) is not Ordering.GREATER or compare(g, 1) is not Ordering.LESS:
        raise ValueError("gamma must lie strictly between 0 and 1")
    exact = g.exact
    if exact is not None and n <= 12:
        v = _tree_sum(Interval(exact), n, None).lo
        return BinaryTreeSum(g, n, RefinableReal.literal(v, label=f"S_{n}"))

    def enclose(bits: int) -> Interval:
        return _tree_sum(_fixed(g.interval(bits + 2 * n + 16), bits + n + 16), n, bits + n + 16)

    return BinaryTreeSum(g, n, RefinableReal(enclose, label=f"S_{n}"))


def binary_tree_sum_enumerated(gamma: Fraction, n: int) -> Fraction:
    """The same sum from the explicit 2^n leaves (used as a cross-check)."""
    return sum((Fraction(gamma) ** s for s in sigma_values(n)), Fraction(0))


# ---------------------------------------------------------------------------
# covers of Y_beta at p-mirror bases


def _gamma(beta: RefinableReal, p: int, s) -> RefinableReal:
    s = Fraction(str(s)) if isinstance(s, float) else Fraction(s)
    if s <= 0:
        raise ValueError("s must be positive")
    return RefinableReal(lambda bits: rpow(beta.interval(bits + 16), Interval(-p * s), bits + 8), label="gamma")


def ybeta_cover_sum(pm: PMirrorSequence, beta, s, n: int, max_level: int = MAX_TREE_LEVEL + 1) -> RefinableReal:
    """Sum of |C|^s over the 2^n level-n cylinders covering Y_beta.

    A level-n cylinder has depth p (1 + sigma_{i_1..i_{n-1}}), so the sum is
    2 gamma S_{n-1} with gamma = beta^(-p s).
    """
    if n < 1:
        raise ValueError("level must be at least 1")
    g = _gamma(as_real(beta), pm.p, s)
    return 2 * g * binary_tree_sum(g, n - 1, max_level - 1).value


def ybeta_cover_sum_direct(pm: PMirrorSequence, beta, s, n: int, bits: int = 96) -> Interval:
    """Cylinder-by-cylinder evaluation over the enumerated depths.

    The depth of C_{i_1..i_n} ignores i_n, so each sigma of level n - 1
    accounts for two cylinders.
    """
    beta = as_real(beta)
    s = Fraction(str(s)) if isinstance(s, float) else Fraction(s)
    b = beta.interval(bits + 16)
    total = Interval(0)
    for sigma in sigma_values(n - 1):
        total = total + rpow(b, Interval(-s * pm.p * (1 + sigma)), bits) * 2
    return total


# ---------------------------------------------------------------------------
# box-count cross-check


def _borders(d: Sequence[int]) -> list[int]:
    """KMP failure function: fail[L] = longest proper border of d_1..d_L."""
    fail = [0] * (len(d) + 1)
    fail[0] = -1
    k = -1
    for i in range(len(d)):
        while k >= 0 and d[k] != d[i]:
            k = fail[k]
        k += 1
        fail[i + 1] = k
    return fail


def prefix_count_estimate(beta, alpha: int, n: int, domain: ExpansionDomain | None = None, constrained: bool = True) -> int:
    """Upper-bound heuristic: length-n words whose windows never exceed the matching prefix of d.

    Every factor u of the word, and of its reflection, must satisfy
    u <= d_1 .. d_|u|.  Words of U_beta satisfy this, so the count bounds
    the number of depth-n cylinders meeting U_beta from above.
    """
    if not constrained:
        return (alpha + 1) ** n
    if domain is None:
        domain = ExpansionDomain(alpha, as_real(beta))
    d = domain.expansion_of_one().prefix(n + 1)
    fail = _borders(d)
    # for a live match of length L, the admissible next digits and the new match length
    trans: dict[int, list[tuple[int, int]]] = {}

    def moves(L: int) -> list[tuple[int, int]]:
        if L not in trans:
            chain = []
            j = L
            while j >= 0:
                chain.append(j)
                j = fail[j]
            cap = min(d[j] for j in chain)
            out = []
            for c in range(cap + 1):
                nxt = max((j + 1 for j in chain if d[j] == c), default=0)
                out.append((c, nxt))
            trans[L] = out
        return trans[L]

    states = Counter({(0, 0): 1})
    for _ in range(n):
        new: Counter = Counter()
        for (L, R), cnt in states.items():
            rmoves = dict(moves(R))
            for c, L2 in moves(L):
                cbar = alpha - c
                if cbar in rmoves:
                    new[(L2, rmoves[cbar])] += cnt
        states = new
    return sum(states.values())


def prefix_count_slope(beta, alpha: int, n: int, domain: ExpansionDomain | None = None) -> float:
    """log(count) / (n log beta), an upper-bound dimension estimate."""
    if domain is None:
        domain = ExpansionDomain(alpha, as_real(beta))
    count = prefix_count_estimate(beta, alpha, n, domain)
    return math.log(count) / (n * math.log(float(domain.beta)))
