"""Adaptive-precision real arithmetic on rational enclosures.

Every real number in the package is a :class:`RefinableReal`: a pair of
rational bounds that can be tightened on demand.  Arithmetic happens on
:class:`Interval` objects whose endpoints are exact ``Fraction`` values; the
only source of error is the explicit outward rounding done by
:meth:`Interval.rounded`, so every result is a rigorous enclosure.

Exact rationals with small denominators are never rounded, which lets the
quasi-greedy recursion certify boundary cases such as ``beta * r == 2`` when
``beta`` is an integer or a short decimal literal.
"""

from __future__ import annotations

import enum
import math
import os
import threading
from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .errors import IntervalDivisionError, NoSignChange, PrecisionExhausted

GUARD_BITS = 16


@dataclass(frozen=True)
class PrecisionContext:
    working_bits: int = 128
    max_bits: int = 4096
    escalation_factor: int = 2

    def __post_init__(self):
        if self.working_bits < 1 or self.max_bits < 1:
            raise ValueError("precision must be positive")
        if self.working_bits > self.max_bits:
            raise ValueError("working_bits exceeds max_bits")
        if self.escalation_factor < 2:
            raise ValueError("escalation_factor must be at least 2")

    @classmethod
    def from_env(cls, working_bits: int | None = None, max_bits: int | None = None):
        """Build a context, letting ``UNIVOQUE_MAX_BITS`` override the ceiling."""
        env = os.environ.get("UNIVOQUE_MAX_BITS")
        if max_bits is None:
            max_bits = int(env) if env else cls.max_bits
        if working_bits is None:
            working_bits = min(cls.working_bits, max_bits)
        return cls(working_bits=working_bits, max_bits=max_bits)

    def schedule(self, start: int | None = None) -> Iterator[int]:
        """Precisions to try, from ``start`` (or working_bits) up to max_bits."""
        bits = max(1, start or self.working_bits)
        while bits < self.max_bits:
            yield bits
            bits *= self.escalation_factor
        yield self.max_bits


DEFAULT_CONTEXT = PrecisionContext()


def _to_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, (int, float, Decimal)):
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Fraction")


def round_fraction(q: Fraction, bits: int, up: bool) -> Fraction:
    """Round ``q`` to a dyadic with about ``bits`` significant bits.

    Values whose denominator already fits in ``bits`` bits are returned
    unchanged, so short exact rationals stay exact.
    """
    n, d = q.numerator, q.denominator
    if d.bit_length() <= bits or n == 0:
        return q
    e = bits - (abs(n).bit_length() - d.bit_length())
    if e >= 0:
        num = n << e
        m, rem = divmod(num, d)
        if up and rem:
            m += 1
        return Fraction(m, 1 << e)
    den = d << (-e)
    m, rem = divmod(n, den)
    if up and rem:
        m += 1
    return Fraction(m << (-e))


class Interval:
    """Closed interval with exact rational endpoints.

    Operators are exact; call :meth:`rounded` to bound the size of the
    endpoints.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = _to_fraction(lo)
        hi = lo if hi is None else _to_fraction(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi

    @classmethod
    def coerce(cls, x) -> Interval:
        return x if isinstance(x, Interval) else cls(x)

    def __repr__(self):
        return f"Interval({float(self.lo)!r}, {float(self.hi)!r})"

    def __eq__(self, other):
        return isinstance(other, Interval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, x) -> bool:
        if isinstance(x, Interval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= _to_fraction(x) <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def intersect(self, other: Interval) -> Interval:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("disjoint enclosures of the same value")
        return Interval(lo, hi)

    def rounded(self, bits: int) -> Interval:
        return Interval(round_fraction(self.lo, bits, up=False), round_fraction(self.hi, bits, up=True))

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __add__(self, other):
        other = Interval.coerce(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __sub__(self, other):
        other = Interval.coerce(other)
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return Interval.coerce(other) - self

    def __mul__(self, other):
        other = Interval.coerce(other)
        if self.lo >= 0 and other.lo >= 0:
            return Interval(self.lo * other.lo, self.hi * other.hi)
        ps = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(ps), max(ps))

    __rmul__ = __mul__

    def reciprocal(self) -> Interval:
        if self.contains_zero():
            raise IntervalDivisionError(f"division by interval containing zero: {self!r}")
        return Interval(1 / self.hi, 1 / self.lo)

    def __truediv__(self, other):
        other = Interval.coerce(other)
        if other.is_point:
            if other.lo == 0:
                raise IntervalDivisionError("division by zero")
            q = (self.lo / other.lo, self.hi / other.lo)
            return Interval(min(q), max(q))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return Interval.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("use rpow for non-integer exponents")
        if k < 0:
            return (self ** (-k)).reciprocal()
        if k % 2 == 1 or self.lo >= 0:
            return Interval(self.lo ** k, self.hi ** k)
        if self.hi <= 0:
            return Interval(self.hi ** k, self.lo ** k)
        return Interval(0, max(self.lo ** k, self.hi ** k))

    def pow_rounded(self, k: int, bits: int) -> Interval:
        """Integer power by repeated squaring with rounding after each step."""
        if k < 0:
            return self.pow_rounded(-k, bits + GUARD_BITS).reciprocal().rounded(bits)
        result = Interval(1)
        base = self
        while k:
            if k & 1:
                result = (result * base).rounded(bits + GUARD_BITS)
            k >>= 1
            if k:
                base = (base * base).rounded(bits + GUARD_BITS)
        return result.rounded(bits)

    def decimal_bounds(self, digits: int = 25) -> tuple[str, str]:
        """Outward-rounded decimal strings for the two endpoints."""
        return _decimal(self.lo, digits, ROUND_FLOOR), _decimal(self.hi, digits, ROUND_CEILING)


def _decimal(q: Fraction, digits: int, rounding) -> str:
    ctx = Context(prec=digits, rounding=rounding)
    return str(ctx.divide(Decimal(q.numerator), Decimal(q.denominator)))


# ---------------------------------------------------------------------------
# elementary functions with rigorous error bounds


_LN2_CACHE: dict[int, Interval] = {}


def _atanh_series(z: Fraction, bits: int) -> Interval:
    """Enclosure of atanh(z) for |z| <= 1/2 via its odd power series."""
    z2 = Interval(z * z).rounded(bits + GUARD_BITS)
    power = Interval(z).rounded(bits + GUARD_BITS)
    total = Interval(0)
    az = abs(z)
    j = 0
    eps = Fraction(1, 1 << (bits + 4))
    while True:
        total = (total + power / (2 * j + 1)).rounded(bits + GUARD_BITS)
        j += 1
        power = (power * z2).rounded(bits + GUARD_BITS)
        bound = max(abs(power.lo), abs(power.hi))
        if bound <= eps or az == 0:
            break
    # remaining terms sum to at most |z|^(2j+1) / ((2j+1)(1-z^2))
    tail = bound / ((2 * j + 1) * (1 - az * az)) if az else Fraction(0)
    return Interval(total.lo - tail, total.hi + tail)


def ln2(bits: int) -> Interval:
    cached = _LN2_CACHE.get(bits)
    if cached is None:
        cached = (2 * _atanh_series(Fraction(1, 3), bits + 8)).rounded(bits + GUARD_BITS)
        _LN2_CACHE[bits] = cached
    return cached


def _ln_point(q: Fraction, bits: int) -> Interval:
    if q <= 0:
        raise ValueError("logarithm of a non-positive number")
    if q == 1:
        return Interval(0)
    k = q.numerator.bit_length() - q.denominator.bit_length()
    m = q / (Fraction(2) ** k)
    # bring m into [2/3, 4/3] so that |z| <= 1/7
    if m > Fraction(4, 3):
        m /= 2
        k += 1
    elif m < Fraction(2, 3):
        m *= 2
        k -= 1
    extra = max(k.bit_length(), 1) + GUARD_BITS
    z = (m - 1) / (m + 1)
    z = round_fraction(z, bits + extra, up=False) if z.denominator.bit_length() > bits + extra else z
    # rounding z moved it by at most one ulp; widen accordingly
    zlo, zhi = z, z
    exact_z = (m - 1) / (m + 1)
    if z != exact_z:
        ulp = Fraction(1, 1 << (bits + extra - 2))
        zlo, zhi = exact_z - ulp, exact_z + ulp
        zlo = round_fraction(zlo, bits + extra, up=False)
        zhi = round_fraction(zhi, bits + extra, up=True)
    lower = _atanh_series(zlo, bits + extra)
    upper = _atanh_series(zhi, bits + extra)
    core = Interval(2 * lower.lo, 2 * upper.hi)
    return (core + ln2(bits + extra) * k).rounded(bits + GUARD_BITS)


def ln(x: Interval, bits: int) -> Interval:
    x = Interval.coerce(x)
    if x.lo <= 0:
        raise ValueError("logarithm of an interval reaching non-positive values")
    lo = _ln_point(x.lo, bits)
    hi = lo if x.is_point else _ln_point(x.hi, bits)
    return Interval(lo.lo, hi.hi)


def _exp_small(r: Fraction, bits: int) -> Interval:
    """exp(r) for |r| <= 1 by Taylor series with a geometric tail bound."""
    total = Interval(1)
    term = Interval(1)
    j = 0
    eps = Fraction(1, 1 << (bits + 4))
    ar = abs(r)
    while True:
        j += 1
        term = (term * r / j).rounded(bits + GUARD_BITS)
        total = (total + term).rounded(bits + GUARD_BITS)
        bound = max(abs(term.lo), abs(term.hi))
        if bound * ar <= eps and 2 * ar <= j + 2:
            break
    # tail: sum_{i>j} |r|^i / i! <= |term| * |r|/(j+1) / (1 - |r|/(j+2))
    tail = bound * ar / (j + 1) / (1 - ar / (j + 2)) if ar else Fraction(0)
    return Interval(total.lo - tail, total.hi + tail)


def _exp_point(q: Fraction, bits: int) -> Interval:
    l2 = ln2(bits + 64)
    k = math.floor(q / l2.mid + Fraction(1, 2))
    extra = max(abs(k).bit_length(), 1) + GUARD_BITS
    r = Interval(q) - ln2(bits + extra + 8) * k
    lo = _exp_small(round_fraction(r.lo, bits + extra, up=False), bits + extra).lo
    hi = _exp_small(round_fraction(r.hi, bits + extra, up=True), bits + extra).hi
    scale = Fraction(2) ** k
    return Interval(lo * scale, hi * scale).rounded(bits + GUARD_BITS)


def exp(x: Interval, bits: int) -> Interval:
    x = Interval.coerce(x)
    lo = _exp_point(x.lo, bits)
    hi = lo if x.is_point else _exp_point(x.hi, bits)
    return Interval(lo.lo, hi.hi)


def rpow(base: Interval, s: Interval, bits: int) -> Interval:
    """base ** s for a positive base and a real exponent."""
    base = Interval.coerce(base)
    s = Interval.coerce(s)
    if s.is_point and s.lo.denominator == 1:
        return base.pow_rounded(int(s.lo), bits)
    return exp((s * ln(base, bits + 32)).rounded(bits + 32), bits)


# ---------------------------------------------------------------------------
# refinable reals


@dataclass(frozen=True)
class AlgebraicForm:
    """value == num(root) / den(root) exactly, coefficients highest degree first."""

    root: "RefinableReal"
    num: tuple[Fraction, ...]
    den: tuple[Fraction, ...] = (Fraction(1),)


class RefinableReal:
    """A real number given by a shrinkable rational enclosure.

    ``enclose(bits)`` must return an interval containing the value whose
    width is roughly ``2**-bits`` relative to the magnitude.  The cached
    enclosure only ever shrinks.
    """

    def __init__(self, enclose: Callable[[int], Interval], tag: str = "derived", label: str | None = None):
        self._enclose = enclose
        self.tag = tag
        self.label = label
        self._iv: Interval | None = None
        self._bits = 0
        self._lock = threading.Lock()
        self.poly: tuple[int, ...] | None = None
        self.isolating: Interval | None = None
        self.form: AlgebraicForm | None = None

    # construction -------------------------------------------------------

    @classmethod
    def literal(cls, value, label: str | None = None) -> RefinableReal:
        q = _to_fraction(value)
        iv = Interval(q)
        r = cls(lambda bits: iv, tag="literal", label=label or str(value))
        r._iv = iv
        r._bits = 1 << 30
        return r

    @classmethod
    def from_interval(cls, iv: Interval, tag: str = "derived") -> RefinableReal:
        """A fixed enclosure that cannot be refined further."""
        r = cls(lambda bits: iv, tag=tag)
        r._iv = iv
        return r

    @classmethod
    def poly_root(cls, coeffs: Sequence[int], lo, hi, label: str | None = None) -> RefinableReal:
        """The unique root of an integer polynomial inside ``[lo, hi]``.

        ``coeffs`` run from the leading coefficient down to the constant.
        The bracket must isolate exactly one distinct root and its endpoints
        must not be roots.
        """
        coeffs = tuple(int(c) for c in coeffs)
        lo, hi = _to_fraction(lo), _to_fraction(hi)
        flo, fhi = poly_eval(coeffs, lo), poly_eval(coeffs, hi)
        if flo == 0 or fhi == 0:
            raise ValueError("bracket endpoint is a root; choose an open bracket")
        nroots = count_real_roots(coeffs, lo, hi)
        if nroots != 1:
            raise NoSignChange(f"bracket [{lo}, {hi}] holds {nroots} distinct roots, need exactly one")
        state = {"lo": lo, "hi": hi, "slo": flo > 0}
        lock = threading.Lock()

        def enclose(bits: int) -> Interval:
            target = Fraction(1, 1 << bits)
            with lock:
                a, b = state["lo"], state["hi"]
                while b - a > target * max(1, abs(a)):
                    m = (a + b) / 2
                    fm = poly_eval(coeffs, m)
                    if fm == 0:
                        a = b = m
                        break
                    if (fm > 0) == state["slo"]:
                        a = m
                    else:
                        b = m
                state["lo"], state["hi"] = a, b
                return Interval(a, b)

        r = cls(enclose, tag="polynomial-root", label=label)
        r.poly = coeffs
        r.isolating = Interval(lo, hi)
        return r

    # access ---------------------------------------------------------------

    def interval(self, bits: int) -> Interval:
        with self._lock:
            if self._iv is not None and self._bits >= bits:
                return self._iv
        iv = self._enclose(bits)
        with self._lock:
            if self._iv is not None:
                iv = self._iv.intersect(iv)
            self._iv = iv
            self._bits = max(self._bits, bits)
            return iv

    @property
    def enclosure(self) -> Interval:
        if self._iv is None:
            return self.interval(DEFAULT_CONTEXT.working_bits)
        return self._iv

    @property
    def lo(self) -> Fraction:
        return self.enclosure.lo

    @property
    def hi(self) -> Fraction:
        return self.enclosure.hi

    @property
    def exact(self) -> Fraction | None:
        iv = self.enclosure
        return iv.lo if iv.is_point else None

    def refine(self, max_bits: int = 1 << 20) -> Interval:
        """Tighten the enclosure to at most half its current width."""
        current = self.enclosure
        if current.is_point:
            return current
        goal = current.width / 2
        bits = max(self._bits, 32)
        while True:
            bits *= 2
            if bits > max_bits:
                raise PrecisionExhausted("cannot halve enclosure width", bits=max_bits)
            iv = self.interval(bits)
            if iv.width <= goal:
                return iv

    def refine_to(self, tol, max_bits: int = 1 << 20) -> Interval:
        tol = _to_fraction(tol)
        iv = self.enclosure
        while iv.width > tol:
            iv = self.refine(max_bits)
        return iv

    def __float__(self):
        return float(self.enclosure.mid)

    def __repr__(self):
        iv = self.enclosure
        name = f" {self.label}" if self.label else ""
        return f"<RefinableReal{name} [{float(iv.lo)!r}, {float(iv.hi)!r}] {self.tag}>"

    # arithmetic -------------------------------------------------------------

    def _binary(self, other, op) -> RefinableReal:
        other = as_real(other)
        a, b = self, other
        return RefinableReal(
            lambda bits: op(a.interval(bits + GUARD_BITS), b.interval(bits + GUARD_BITS)).rounded(bits + 4)
        )

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y)

    def __radd__(self, other):
        return as_real(other) + self

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y)

    def __rsub__(self, other):
        return as_real(other) - self

    def __mul__(self, other):
        return self._binary(other, lambda x, y: x * y)

    def __rmul__(self, other):
        return as_real(other) * self

    def __truediv__(self, other):
        return self._binary(other, lambda x, y: x / y)

    def __rtruediv__(self, other):
        return as_real(other) / self

    def __neg__(self):
        a = self
        return RefinableReal(lambda bits: -a.interval(bits))

    def __pow__(self, k: int):
        a = self
        extra = GUARD_BITS + abs(k).bit_length()
        return RefinableReal(lambda bits: a.interval(bits + extra).pow_rounded(k, bits + 4))

    def log(self) -> RefinableReal:
        a = self
        return RefinableReal(lambda bits: ln(a.interval(bits + GUARD_BITS), bits + 4))

    def exp(self) -> RefinableReal:
        a = self
        return RefinableReal(lambda bits: exp(a.interval(bits + GUARD_BITS + 8), bits + 4))


def as_real(x) -> RefinableReal:
    return x if isinstance(x, RefinableReal) else RefinableReal.literal(x)


# ---------------------------------------------------------------------------
# comparison and root finding


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1
    UNDECIDED = None


def compare_intervals(a: Interval, b: Interval) -> Ordering:
    if a.hi < b.lo:
        return Ordering.LESS
    if a.lo > b.hi:
        return Ordering.GREATER
    if a.is_point and b.is_point and a.lo == b.lo:
        return Ordering.EQUAL
    return Ordering.UNDECIDED


def compare(a, b, ctx: PrecisionContext = DEFAULT_CONTEXT) -> Ordering:
    """Order two reals, refining until their enclosures separate.

    Equality is reported only when both enclosures collapse to the same
    rational point; otherwise an overlap at ``ctx.max_bits`` yields
    ``Ordering.UNDECIDED``.
    """
    a, b = as_real(a), as_real(b)
    for bits in ctx.schedule():
        verdict = compare_intervals(a.interval(bits), b.interval(bits))
        if verdict is not Ordering.UNDECIDED:
            return verdict
    return Ordering.UNDECIDED


def decide_sign(evaluate: Callable[[int], Interval], ctx: PrecisionContext, start: int | None = None) -> int:
    """Sign of a quantity given by ``evaluate(bits)``; 0 only for an exact zero."""
    for bits in ctx.schedule(start):
        iv = evaluate(bits)
        if iv.lo > 0:
            return 1
        if iv.hi < 0:
            return -1
        if iv.is_point:
            return 0
    raise PrecisionExhausted("sign undecided at maximum precision", bits=ctx.max_bits)


def solve_monotone(
    f: Callable[[Fraction, int], Interval],
    target,
    a,
    b,
    tol,
    ctx: PrecisionContext = DEFAULT_CONTEXT,
    label: str | None = None,
) -> RefinableReal:
    """Root of ``f(x) = target`` for a strictly monotone ``f`` on ``[a, b]``.

    ``f(x, bits)`` must return an enclosure of ``f`` at the rational point
    ``x`` computed with about ``bits`` bits.  The returned real can be
    refined further by continuing the bisection.
    """
    a, b = _to_fraction(a), _to_fraction(b)
    if a >= b:
        raise ValueError("empty bracket")
    target = as_real(target)

    def sign_at(x: Fraction) -> int:
        return decide_sign(lambda bits: f(x, bits) - target.interval(bits + GUARD_BITS), ctx)

    sa, sb = sign_at(a), sign_at(b)
    if sa == 0:
        return _solved_point(a, label)
    if sb == 0:
        return _solved_point(b, label)
    if sa == sb:
        raise NoSignChange(f"f - target has sign {sa} at both ends of [{a}, {b}]")
    state = {"lo": a, "hi": b}
    lock = threading.Lock()

    def enclose(bits: int) -> Interval:
        width_goal = Fraction(1, 1 << bits)
        with lock:
            lo, hi = state["lo"], state["hi"]
            while hi - lo > width_goal:
                m = round_fraction((lo + hi) / 2, max(bits + 8, 64), up=False)
                if not lo < m < hi:
                    m = (lo + hi) / 2
                s = sign_at(m)
                if s == 0:
                    lo = hi = m
                    break
                if s == sa:
                    lo = m
                else:
                    hi = m
            state["lo"], state["hi"] = lo, hi
            return Interval(lo, hi)

    root = RefinableReal(enclose, tag="solver-output", label=label)
    tol = _to_fraction(tol)
    bits = max(1, math.ceil(-math.log2(tol)) + 1) if tol < 1 else 1
    root.interval(bits)
    return root


def _solved_point(x: Fraction, label):
    r = RefinableReal.literal(x, label=label)
    r.tag = "solver-output"
    return r


# ---------------------------------------------------------------------------
# integer polynomials


def poly_eval(coeffs: Sequence, x):
    """Horner evaluation; coefficients from highest degree down."""
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


def poly_eval_interval(coeffs: Sequence, x: Interval, bits: int) -> Interval:
    acc = Interval(0)
    for c in coeffs:
        acc = (acc * x + c).rounded(bits)
    return acc


def _sympy_poly(coeffs):
    import sympy

    x = sympy.Symbol("x")
    return sympy.Poly([sympy.Rational(str(Fraction(c))) for c in coeffs], x, domain="QQ")


def count_real_roots(coeffs: Sequence[int], lo, hi) -> int:
    """Number of distinct real roots in the closed interval ``[lo, hi]``."""
    import sympy

    p = _sympy_poly(coeffs)
    sqf = p.sqf_part()
    return int(sqf.count_roots(sympy.Rational(str(_to_fraction(lo))), sympy.Rational(str(_to_fraction(hi)))))


def vanishes_at(coeffs: Sequence, root: RefinableReal) -> bool:
    """Exact test of ``coeffs(root) == 0`` for a polynomial-root real.

    The gcd with the defining polynomial keeps only common roots; the
    isolating bracket of ``root`` contains exactly one root of the defining
    polynomial, so the gcd has a root there iff it vanishes at ``root``.
    """
    import sympy

    if root.poly is None or root.isolating is None:
        raise ValueError("exact zero test needs a polynomial root")
    q = _sympy_poly(coeffs)
    if q.is_zero:
        return True
    g = sympy.gcd(_sympy_poly(root.poly), q)
    if g.degree() < 1:
        return False
    lo, hi = root.isolating.lo, root.isolating.hi
    return int(g.count_roots(sympy.Rational(str(lo)), sympy.Rational(str(hi)))) > 0


def find_poly_root(coeffs: Sequence[int], lo, hi, label: str | None = None) -> RefinableReal:
    """Isolate the largest real root of ``coeffs`` in ``(lo, hi)``."""
    import sympy

    p = _sympy_poly(coeffs).sqf_part()
    lo, hi = _to_fraction(lo), _to_fraction(hi)
    found = []
    for (a, b), _ in p.intervals():
        a, b = Fraction(str(a)), Fraction(str(b))
        if b > lo and a < hi:
            found.append((a, b))
    if not found:
        raise NoSignChange(f"no real root in ({lo}, {hi})")
    a, b = max(found)
    if a == b:
        return RefinableReal.literal(a, label=label)
    a, b = max(a, lo), min(b, hi)
    # shrink until both endpoints are non-roots strictly inside the window
    while poly_eval(coeffs, a) == 0 or poly_eval(coeffs, b) == 0 or count_real_roots(coeffs, a, b) != 1:
        m = (a + b) / 2
        if poly_eval(coeffs, m) == 0:
            return RefinableReal.literal(m, label=label)
        if (poly_eval(coeffs, a) > 0) != (poly_eval(coeffs, m) > 0) and poly_eval(coeffs, a) != 0:
            b = m
        else:
            a = m
    return RefinableReal.poly_root(coeffs, a, b, label=label)


def poly_mul(p: Sequence, q: Sequence) -> tuple:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return tuple(out)


def poly_add(p: Sequence, q: Sequence) -> tuple:
    n = max(len(p), len(q))
    p = (0,) * (n - len(p)) + tuple(p)
    q = (0,) * (n - len(q)) + tuple(q)
    return tuple(Fraction(a) + b for a, b in zip(p, q))


def poly_scale(p: Sequence, c) -> tuple:
    return tuple(Fraction(a) * c for a in p)


def monomial(k: int) -> tuple:
    return (Fraction(1),) + (Fraction(0),) * k
