"""Projection, quasi-greedy expansions and the brute-force expansion oracle.

The inner loops work in fixed point: an interval [lo, hi] * 2**-B is held as
a pair of Python integers, rounded outward after every product.  When a
digit decision falls on an integer boundary, the decision is made exactly
(rational arithmetic for rational bases, a polynomial gcd test for
algebraic bases) or by recomputing at higher precision.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import NoSignChange, PrecisionExhausted
from .numerics import (
    DEFAULT_CONTEXT,
    AlgebraicForm,
    Interval,
    Ordering,
    PrecisionContext,
    RefinableReal,
    as_real,
    compare,
    monomial,
    poly_add,
    poly_eval,
    poly_eval_interval,
    poly_mul,
    poly_scale,
    solve_monotone,
    vanishes_at,
)
from .symseq import Alphabet, EventuallyPeriodic, SymbolicSequence, Word

GUARD = 32


def _floor_fixed(q: Fraction, B: int) -> int:
    return (q.numerator << B) // q.denominator


def _ceil_fixed(q: Fraction, B: int) -> int:
    return -((-q.numerator << B) // q.denominator)


def _fixed(iv: Interval, B: int) -> tuple[int, int]:
    return _floor_fixed(iv.lo, B), _ceil_fixed(iv.hi, B)


def _mul_fixed(al: int, ah: int, bl: int, bh: int, B: int) -> tuple[int, int]:
    """Interval product of fixed-point values, rounded outward."""
    if al >= 0 and bl >= 0:
        return (al * bl) >> B, -((-ah * bh) >> B)
    ps = (al * bl, al * bh, ah * bl, ah * bh)
    return min(ps) >> B, -((-max(ps)) >> B)


def beta_exact(beta: RefinableReal) -> Fraction | None:
    return beta.exact if beta.tag == "literal" else None


@dataclass
class ExpansionDomain:
    """Alphabet plus base; ``d_hint`` may carry a known expansion of 1."""

    alpha: int
    beta: RefinableReal
    ctx: PrecisionContext = DEFAULT_CONTEXT
    d_hint: SymbolicSequence | None = None
    _d: SymbolicSequence | None = field(default=None, repr=False)

    def __post_init__(self):
        Alphabet(self.alpha)
        self.beta = as_real(self.beta)
        if compare(self.beta, 1, self.ctx) is not Ordering.GREATER:
            raise ValueError("base must be certified greater than 1")
        if compare(self.beta, self.alpha + 1, self.ctx) is not Ordering.LESS:
            raise ValueError(f"base must be certified below alpha + 1 = {self.alpha + 1}")
        self._lock = threading.Lock()

    @property
    def alphabet(self) -> Alphabet:
        return Alphabet(self.alpha)

    @property
    def jprime_hi(self) -> RefinableReal:
        """Right end alpha/(beta - 1) of the interval of expandable numbers."""
        b = beta_exact(self.beta)
        if b is not None:
            return RefinableReal.literal(Fraction(self.alpha) / (b - 1))
        return self.alpha / (self.beta - 1)

    def expansion_of_one(self, probe: int = 512) -> SymbolicSequence:
        """d(beta), as an exact periodic sequence whenever that can be certified."""
        with self._lock:
            if self._d is None:
                if self.d_hint is not None:
                    self._d = self.d_hint
                else:
                    stream = QuasiGreedyStream(1, self)
                    stream.prefix(probe)
                    ep = stream.eventually_periodic()
                    self._d = EventuallyPeriodic(*ep, self.alpha).canonical() if ep else stream
            return self._d


# ---------------------------------------------------------------------------
# projection


def periodic_form(pre: Sequence[int], per: Sequence[int]) -> tuple[tuple, tuple]:
    """(num, den) polynomials in beta with value pre per per ... == num/den."""
    k, q = len(pre), len(per)
    cyc = (Fraction(1),) + (Fraction(0),) * (q - 1) + (Fraction(-1),)
    head = tuple(Fraction(a) for a in pre) if pre else (Fraction(0),)
    num = poly_add(poly_mul(head, cyc), tuple(Fraction(a) for a in per))
    den = poly_mul(monomial(k), cyc)
    return num, den


def _horner_fixed(digits: Sequence[int], xl: int, xh: int, B: int) -> tuple[int, int]:
    """Fixed-point enclosure of sum digits[i] * x**(i+1) for x in [xl, xh]."""
    lo = hi = 0
    for a in reversed(digits):
        lo = ((lo + (a << B)) * xl) >> B
        hi = -((-(hi + (a << B)) * xh) >> B)
    return lo, hi


def _digits_for(bits: int, alpha: int, beta_lo: Fraction) -> int:
    lb = math.log2(float(beta_lo))
    extra = math.log2(alpha / (float(beta_lo) - 1) + 1)
    return int((bits + extra + 4) / lb) + 2


def project_prefix(omega: SymbolicSequence, beta_iv: Interval, alpha: int, bits: int) -> Interval:
    """Enclosure of the full projection from a truncated sum plus tail bound."""
    B = bits + GUARD
    n = _digits_for(bits, alpha, beta_iv.lo)
    xl, xh = _floor_fixed(1 / beta_iv.hi, B), _ceil_fixed(1 / beta_iv.lo, B)
    digits = omega.prefix(n)
    lo, hi = _horner_fixed(digits, xl, xh, B)
    # tail sum_{j>n} omega_j beta^-j lies in [0, alpha x^n / (1 - x)]
    x_hi = Fraction(xh, 1 << B)
    tail = alpha * x_hi ** n / (1 - x_hi) if x_hi < 1 else Fraction(alpha) / (beta_iv.lo - 1)
    return Interval(Fraction(lo, 1 << B), Fraction(hi, 1 << B) + tail)


def project(omega: SymbolicSequence, domain: ExpansionDomain, tol=None) -> RefinableReal:
    """Pi_beta(omega) = sum omega_j beta^-j.

    Eventually periodic inputs get a closed form (exact for rational bases,
    with an algebraic certificate for polynomial-root bases).
    """
    beta, alpha = domain.beta, domain.alpha
    ep = omega.eventually_periodic()
    if ep is not None:
        num, den = periodic_form(*ep)
        b = beta_exact(beta)
        if b is not None:
            return RefinableReal.literal(poly_eval(num, b) / poly_eval(den, b))

        def enclose(bits):
            biv = beta.interval(bits + GUARD + 2 * len(den))
            return (poly_eval_interval(num, biv, bits + GUARD) / poly_eval_interval(den, biv, bits + GUARD)).rounded(bits + 8)

        value = RefinableReal(enclose, tag="derived")
        value.form = AlgebraicForm(beta, num, den) if beta.poly is not None else None
    else:
        value = RefinableReal(lambda bits: project_prefix(omega, beta.interval(bits + GUARD), alpha, bits).rounded(bits + 8))
    if tol is not None:
        try:
            value.refine_to(tol, max_bits=max(domain.ctx.max_bits, 64))
        except PrecisionExhausted as e:
            raise PrecisionExhausted(f"projection width above {tol}", bits=e.bits) from None
    return value


def exact_sign(x: RefinableReal, c, ctx: PrecisionContext = DEFAULT_CONTEXT) -> int:
    """Sign of x - c, using an algebraic certificate when enclosures touch."""
    c = Fraction(c)
    if x.exact is not None:
        return (x.exact > c) - (x.exact < c)
    verdict = compare(x, c, PrecisionContext(min(ctx.working_bits, 64), min(ctx.max_bits, 512)))
    if verdict is Ordering.LESS:
        return -1
    if verdict is Ordering.GREATER:
        return 1
    form = x.form
    if form is not None and vanishes_at(poly_add(form.num, poly_scale(form.den, -c)), form.root):
        return 0
    verdict = compare(x, c, ctx)
    if verdict is Ordering.UNDECIDED:
        raise PrecisionExhausted(f"cannot order a real against {c}", bits=ctx.max_bits)
    return -1 if verdict is Ordering.LESS else 1


# ---------------------------------------------------------------------------
# quasi-greedy expansions


class QuasiGreedyStream(SymbolicSequence):
    """Digits of the quasi-greedy expansion of ``x``, produced on demand.

    Digit rule: the largest a <= alpha with a < beta * r, then
    r <- beta * r - a.  When beta * r is certified to equal an integer, the
    remainder becomes exactly 1; two such events (or one, when x == 1)
    prove the sequence is eventually periodic.
    """

    def __init__(self, x, domain: ExpansionDomain, ctx: PrecisionContext | None = None):
        super().__init__(domain.alpha)
        self.domain = domain
        self.ctx = ctx or domain.ctx
        self.x = as_real(x)
        if compare(self.x, 0, self.ctx) is not Ordering.GREATER:
            raise ValueError("quasi-greedy expansions need x > 0")
        if compare(self.x, domain.jprime_hi, self.ctx) is Ordering.GREATER:
            raise ValueError("x exceeds alpha/(beta-1)")
        self._beta = domain.beta
        self._bexact = beta_exact(self._beta)
        self._anchor_index = 0
        self._anchor = self.x
        self._hits: list[int] = []
        self._period: tuple[int, int] | None = None
        self._B = 0
        self._r = (0, 0)
        self._lb = math.log2(float(self._beta.enclosure.hi))
        self._recompute(self.ctx.working_bits + GUARD)

    # state handling -----------------------------------------------------

    def _recompute(self, B: int) -> None:
        """Recompute the remainder at index len(cache) from the anchor."""
        self._B = B
        bl, bh = _fixed(self._beta.interval(B + GUARD), B)
        self._bfix = (bl, bh)
        rl, rh = _fixed(self._anchor.interval(B + GUARD), B)
        digits = self._cache
        for a in digits[self._anchor_index :]:
            rl, rh = _mul_fixed(rl, rh, bl, bh, B)
            rl, rh = max(rl - (a << B), 0), rh - (a << B)
        self._r = (rl, rh)

    def _baseline(self) -> int:
        steps = len(self._cache) - self._anchor_index + 1
        return int(steps * self._lb) + self.ctx.working_bits + GUARD

    def _exact_tie(self, g: int) -> int | None:
        """Sign of beta * r - g decided exactly, or None if no exact route."""
        anchor = self._anchor.exact
        if anchor is None:
            return None
        digits = self._cache[self._anchor_index :]
        if self._bexact is not None:
            b = self._bexact
            r = anchor
            for a in digits:
                r = b * r - a
            y = b * r
            return (y > g) - (y < g)
        if self._beta.poly is not None:
            coeffs = [anchor] + [Fraction(-a) for a in digits] + [Fraction(-g)]
            if vanishes_at(coeffs, self._beta):
                return 0
        return None

    def _resolve(self, g: int) -> int:
        exact = self._exact_tie(g)
        if exact is not None:
            return exact
        ceiling = self._baseline() + self.ctx.max_bits
        B = self._B
        while True:
            B *= self.ctx.escalation_factor
            if B > ceiling:
                raise PrecisionExhausted(
                    f"cannot decide quasi-greedy digit {len(self._cache) + 1}", bits=self.ctx.max_bits, detail=g
                )
            self._recompute(B)
            rl, rh = self._r
            bl, bh = self._bfix
            yl, yh = _mul_fixed(rl, rh, bl, bh, B)
            if yl > g << B:
                return 1
            if yh < g << B:
                return -1

    def _step(self) -> int:
        alpha = self.alpha
        B = self._B
        rl, rh = self._r
        bl, bh = self._bfix
        yl, yh = _mul_fixed(rl, rh, bl, bh, B)
        hit = False
        if yl > alpha << B:
            a = alpha
        else:
            c = -((-yh) >> B)  # ceil
            g = c - 1
            if yl > g << B:
                a = min(g, alpha)
            elif g >= alpha + 1:
                a = alpha
            elif g <= 0:
                a = 0
            else:
                s = self._resolve(g)
                B = self._B
                if s > 0:
                    a = g
                else:
                    a = g - 1
                    hit = s == 0
                if not hit:
                    rl, rh = self._r
                    bl, bh = self._bfix
                    yl, yh = _mul_fixed(rl, rh, bl, bh, B)
        if not hit and yl == yh == (a + 1) << B:
            # beta * r is exactly the integer a + 1, so the remainder is exactly 1
            hit = True
        k = len(self._cache) + 1
        self._cache.append(a)
        if hit:
            self._anchor_index = k
            self._anchor = RefinableReal.literal(1)
            self._r = (1 << B, 1 << B)
            self._hits.append(k)
            if self.x.exact == 1 and len(self._hits) == 1:
                self._period = (0, k)
            elif len(self._hits) >= 2:
                self._period = (self._hits[0], k - self._hits[0])
            return a
        self._r = (max(yl - (a << B), 0), yh - (a << B))
        if self._r[1] - self._r[0] > 1 << max(B - self.ctx.working_bits, 0):
            self._recompute(max(2 * B, self._baseline() + B // 2))
        return a

    def _ensure(self, n: int) -> list[int]:
        cache = self._cache
        if n <= len(cache):
            return cache
        with self._lock:
            while len(self._cache) < n:
                if self._period is not None:
                    pre, per = self._period
                    k = len(self._cache)
                    self._cache.append(self._cache[pre + (k - pre) % per])
                else:
                    self._step()
            return self._cache

    def _digit(self, n):
        return self._ensure(n)[n - 1]

    def eventually_periodic(self):
        if self._period is None:
            return None
        pre, per = self._period
        self._ensure(pre + per)
        return tuple(self._cache[:pre]), tuple(self._cache[pre : pre + per])

    def describe(self):
        return "QuasiGreedy"


def quasi_greedy(x, domain: ExpansionDomain, n: int, ctx: PrecisionContext | None = None) -> Word:
    """First ``n`` digits of the quasi-greedy expansion of ``x``."""
    if n < 0:
        raise ValueError("length must be non-negative")
    return Word(QuasiGreedyStream(x, domain, ctx).prefix(n), domain.alpha)


# ---------------------------------------------------------------------------
# brute-force oracle


def _remainder_zero(x: RefinableReal, word: Sequence[int], domain: ExpansionDomain, target) -> bool | None:
    """Exact test of beta^n x - sum w_i beta^(n-i) == target; None if no exact route."""
    n = len(word)
    b = beta_exact(domain.beta)
    if b is not None and x.exact is not None:
        r = x.exact
        for a in word:
            r = b * r - a
        return r == target
    form = x.form
    if form is None and x.exact is not None and domain.beta.poly is not None:
        form = AlgebraicForm(domain.beta, (x.exact,), (Fraction(1),))
    if form is None or domain.beta.poly is None:
        return None
    # (num/den) beta^n - W(beta) - target == 0  <=>  num beta^n - den (W + target) == 0
    # W = sum w_i beta^(n-i): coefficients w_1..w_n for degrees n-1..0
    wpoly = tuple(Fraction(a) for a in word) if word else (Fraction(0),)
    lhs = poly_mul(form.num, monomial(n))
    rhs = poly_mul(form.den, poly_add(wpoly, (Fraction(target),)))
    return vanishes_at(poly_add(lhs, poly_scale(rhs, -1)), domain.beta)


def _remainder_jzero(x, word, domain) -> bool | None:
    """Exact test of remainder == alpha/(beta-1), i.e. (beta-1) R - alpha == 0."""
    b = beta_exact(domain.beta)
    if b is not None and x.exact is not None:
        r = x.exact
        for a in word:
            r = b * r - a
        return r * (b - 1) == domain.alpha
    form = x.form
    if form is None and x.exact is not None and domain.beta.poly is not None:
        form = AlgebraicForm(domain.beta, (x.exact,), (Fraction(1),))
    if form is None or domain.beta.poly is None:
        return None
    n = len(word)
    wpoly = tuple(Fraction(a) for a in word) if word else (Fraction(0),)
    bm1 = (Fraction(1), Fraction(-1))
    # ((num beta^n - den W) (beta - 1) - alpha den) == 0
    r_num = poly_add(poly_mul(form.num, monomial(n)), poly_scale(poly_mul(form.den, wpoly), -1))
    expr = poly_add(poly_mul(r_num, bm1), poly_scale(form.den, -domain.alpha))
    return vanishes_at(expr, domain.beta)


@dataclass
class OracleResult:
    counts: list[int]  # counts[n] = number of feasible words of length n
    truncated: bool = False  # True when the limit stopped the search early

    @property
    def final(self) -> int:
        return self.counts[-1]


def expansion_prefix_counts(
    x, domain: ExpansionDomain, depth: int, ctx: PrecisionContext | None = None, limit: int | None = None
) -> OracleResult:
    """Branch-and-bound count of extendable expansion prefixes at each length.

    A word w of length n is feasible when 0 <= beta^n (x - Pi(w 0^inf)) <=
    alpha/(beta-1).  Endpoint values of x are accepted as they are.
    """
    ctx = ctx or domain.ctx
    x = as_real(x)
    alpha = domain.alpha
    beta = domain.beta
    lb = math.log2(float(beta.enclosure.hi))
    base = ctx.working_bits + int(depth * lb) + GUARD
    jhi = domain.jprime_hi

    def setup(B):
        bl, bh = _fixed(beta.interval(B + GUARD), B)
        jl, jh = _fixed(jhi.interval(B + GUARD), B)
        xl, xh = _fixed(x.interval(B + GUARD), B)
        return bl, bh, jl, jh, xl, xh

    B = base
    bl, bh, jl, jh, xl, xh = setup(B)
    if xh < 0 or xl > jh:
        return OracleResult([0] * (depth + 1))
    # feasibility of the empty word itself
    ok = _classify(x, (), xl, xh, jl, jh, domain, ctx, base)
    if not ok:
        return OracleResult([0] * (depth + 1))
    counts = [1]
    frontier: list[tuple[tuple[int, ...], int, int]] = [((), xl, xh)]
    for _ in range(depth):
        nxt = []
        for word, rl, rh in frontier:
            yl, yh = _mul_fixed(rl, rh, bl, bh, B)
            for a in range(alpha + 1):
                cl, ch = yl - (a << B), yh - (a << B)
                if ch < 0 or cl > jh:
                    continue
                child = word + (a,)
                if cl >= 0 and ch <= jl:
                    nxt.append((child, cl, ch))
                    continue
                if _classify(x, child, cl, ch, jl, jh, domain, ctx, base):
                    nxt.append((child, max(cl, 0), min(ch, jh)))
        frontier = nxt
        counts.append(len(frontier))
        if limit is not None and len(frontier) > limit:
            counts.extend([len(frontier)] * (depth + 1 - len(counts)))
            return OracleResult(counts, truncated=True)
    return OracleResult(counts)


def _classify(x, word, cl, ch, jl, jh, domain, ctx, base) -> bool:
    """Decide feasibility of an ambiguous branch: exact test, else recompute finer."""
    if cl >= 0 and ch <= jl:
        return True
    if ch < 0 or cl > jh:
        return False
    near_zero = cl < 0 <= ch
    if near_zero:
        z = _remainder_zero(x, word, domain, 0)
        if z:
            return True
    else:
        z = _remainder_jzero(x, word, domain)
        if z:
            return True
    # not exactly on the boundary: refine the branch until it separates
    B = base
    while True:
        B *= ctx.escalation_factor
        if B > base + ctx.max_bits:
            raise PrecisionExhausted("oracle feasibility undecided", bits=ctx.max_bits, detail=tuple(word))
        bl, bh = _fixed(domain.beta.interval(B + GUARD), B)
        rl, rh = _fixed(x.interval(B + GUARD), B)
        for a in word:
            rl, rh = _mul_fixed(rl, rh, bl, bh, B)
            rl, rh = rl - (a << B), rh - (a << B)
        jl2, jh2 = _fixed(domain.jprime_hi.interval(B + GUARD), B)
        if rh < 0 or rl > jh2:
            return False
        if rl >= 0 and rh <= jl2:
            return True


def count_expansion_prefixes(x, domain: ExpansionDomain, depth: int, ctx: PrecisionContext | None = None) -> int:
    """Number of length-``depth`` words that extend to an expansion of ``x``."""
    return expansion_prefix_counts(x, domain, depth, ctx).final


# ---------------------------------------------------------------------------
# base recovery


def projection_at(d: SymbolicSequence, alpha: int, b: Fraction, bits: int) -> Interval:
    """Enclosure of Pi_b(d) at a rational base ``b``."""
    ep = d.eventually_periodic()
    if ep is not None:
        num, den = periodic_form(*ep)
        return Interval(poly_eval(num, b) / poly_eval(den, b)).rounded(bits + GUARD)
    return project_prefix(d, Interval(b), alpha, bits)


def base_from_expansion(d: SymbolicSequence, alpha: int | Alphabet, bracket, tol, ctx: PrecisionContext = DEFAULT_CONTEXT) -> RefinableReal:
    """The base in which ``d`` expands 1, found by bisection on Pi_beta(d) = 1."""
    alpha = alpha.alpha if isinstance(alpha, Alphabet) else int(alpha)
    if d.alpha != alpha:
        raise ValueError("sequence alphabet does not match")
    if all(a == 0 for a in d.prefix(4096)):
        raise ValueError("expansion must be nonzero")
    a, b = (Fraction(str(v)) if isinstance(v, float) else Fraction(v) for v in bracket)
    if not 1 < a < b:
        raise ValueError("bracket must satisfy 1 < a < b")
    root = solve_monotone(lambda x, bits: projection_at(d, alpha, x, bits), 1, a, b, tol, ctx, label="base")
    root.tag = "solver-output"
    return root
