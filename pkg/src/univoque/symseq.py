"""Digits, words and infinite digit sequences over {0, ..., alpha}.

Sequences are 1-indexed, as in the usual notation w = w_1 w_2 ...  Every
backend computes ``digit(n)`` exactly; prefixes are memoized so repeated
scans over long prefixes cost amortized O(1) per digit.
"""

from __future__ import annotations

import bisect
import enum
import math
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import IndistinguishableToHorizon
from .numerics import RefinableReal, as_real, compare, Ordering, DEFAULT_CONTEXT

DEFAULT_HORIZON = 10_000
INF = math.inf


@dataclass(frozen=True)
class Alphabet:
    alpha: int

    def __post_init__(self):
        if not isinstance(self.alpha, int) or self.alpha < 1:
            raise ValueError(f"alpha must be a positive integer, got {self.alpha!r}")

    def __contains__(self, a) -> bool:
        return isinstance(a, int) and 0 <= a <= self.alpha

    def check(self, digits: Iterable[int]) -> tuple[int, ...]:
        digits = tuple(digits)
        for a in digits:
            if a not in self:
                raise ValueError(f"digit {a!r} outside 0..{self.alpha}")
        return digits


def format_digits(digits: Sequence[int], alpha: int) -> str:
    if alpha > 9:
        return ",".join(str(a) for a in digits)
    return "".join(str(a) for a in digits)


@dataclass(frozen=True)
class Word:
    """A finite word; ``digits`` is a tuple, indexing is 0-based like Python."""

    digits: tuple[int, ...]
    alpha: int

    def __post_init__(self):
        object.__setattr__(self, "digits", Alphabet(self.alpha).check(self.digits))

    @classmethod
    def parse(cls, text: str, alpha: int) -> Word:
        text = text.strip()
        if alpha > 9 or "," in text:
            parts = [p for p in text.replace(" ", "").split(",") if p]
            return cls(tuple(int(p) for p in parts), alpha)
        return cls(tuple(int(c) for c in text if not c.isspace()), alpha)

    def __len__(self):
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Word(self.digits[i], self.alpha)
        return self.digits[i]

    def __add__(self, other: Word) -> Word:
        return Word(self.digits + tuple(other), self.alpha)

    def __str__(self):
        return format_digits(self.digits, self.alpha)

    def __lt__(self, other: Word):
        return self.digits < tuple(other)

    def __le__(self, other: Word):
        return self.digits <= tuple(other)

    def reflect(self) -> Word:
        return Word(tuple(self.alpha - a for a in self.digits), self.alpha)

    def plus(self) -> Word:
        """Increase the last digit by one."""
        if not self.digits or self.digits[-1] >= self.alpha:
            raise ValueError(f"cannot increment the last digit of {self}")
        return Word(self.digits[:-1] + (self.digits[-1] + 1,), self.alpha)

    def minus(self) -> Word:
        """Decrease the last digit by one."""
        if not self.digits or self.digits[-1] == 0:
            raise ValueError(f"cannot decrement the last digit of {self}")
        return Word(self.digits[:-1] + (self.digits[-1] - 1,), self.alpha)


# ---------------------------------------------------------------------------
# infinite sequences


class SymbolicSequence:
    """Infinite sequence with memoized prefix; subclasses define ``_compute``."""

    def __init__(self, alpha: int):
        self.alpha = Alphabet(alpha).alpha
        self._cache: list[int] = []
        self._lock = threading.Lock()

    # subclasses override one of these
    def _digit(self, n: int) -> int:
        raise NotImplementedError

    def _compute(self, start: int, stop: int) -> list[int]:
        """Digits with indices start+1 .. stop."""
        return [self._digit(n) for n in range(start + 1, stop + 1)]

    # public access
    def digit(self, n: int) -> int:
        if n < 1:
            raise IndexError("sequences are indexed from 1")
        cache = self._cache
        if n <= len(cache):
            return cache[n - 1]
        if n > len(cache) + 4096:
            return self._digit(n)
        return self._ensure(n)[n - 1]

    def _ensure(self, n: int) -> list[int]:
        cache = self._cache
        if n <= len(cache):
            return cache
        with self._lock:
            have = len(self._cache)
            if n > have:
                # grow geometrically to keep extension amortized O(1)
                target = max(n, min(2 * have, n + (1 << 16)))
                self._cache.extend(self._compute(have, target))
            return self._cache

    def prefix(self, n: int) -> tuple[int, ...]:
        if n <= 0:
            return ()
        return tuple(self._ensure(n)[:n])

    def prefix_view(self, n: int) -> list[int]:
        """The memoized digit list, at least ``n`` long.  Do not mutate."""
        return self._ensure(n)

    def word(self, n: int) -> Word:
        return Word(self.prefix(n), self.alpha)

    def window(self, start: int, length: int) -> tuple[int, ...]:
        """Digits start+1 .. start+length, i.e. a prefix of the shift by start."""
        return tuple(self._ensure(start + length)[start : start + length])

    def __iter__(self):
        n = 1
        while True:
            yield self.digit(n)
            n += 1

    def shift(self, k: int = 1) -> SymbolicSequence:
        if k < 0:
            raise ValueError("shift count must be non-negative")
        if k == 0:
            return self
        return Shifted(self, k)

    def reflect(self) -> SymbolicSequence:
        return Reflected(self)

    def prepend(self, word: Sequence[int]) -> SymbolicSequence:
        word = tuple(word)
        if not word:
            return self
        return Prefixed(word, self)

    def eventually_periodic(self) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
        """(preperiod, period) when the backend is known to be eventually periodic."""
        return None

    def describe(self) -> str:
        return type(self).__name__

    def __repr__(self):
        head = format_digits(self.prefix(20), self.alpha)
        return f"<{self.describe()} alpha={self.alpha} {head}...>"


class EventuallyPeriodic(SymbolicSequence):
    def __init__(self, preperiod: Sequence[int], period: Sequence[int], alpha: int):
        super().__init__(alpha)
        ab = Alphabet(alpha)
        self.preperiod = ab.check(preperiod)
        self.period = ab.check(period)
        if not self.period:
            raise ValueError("period must be nonempty")

    @classmethod
    def periodic(cls, period: Sequence[int], alpha: int) -> EventuallyPeriodic:
        return cls((), period, alpha)

    @classmethod
    def constant(cls, digit: int, alpha: int) -> EventuallyPeriodic:
        return cls((), (digit,), alpha)

    def _digit(self, n):
        k = len(self.preperiod)
        if n <= k:
            return self.preperiod[n - 1]
        return self.period[(n - k - 1) % len(self.period)]

    def _compute(self, start, stop):
        pre, per = self.preperiod, self.period
        out = list(pre[start:stop])
        n = start + len(out)
        k, q = len(pre), len(per)
        while n < stop:
            off = (n - k) % q
            take = min(q - off, stop - n)
            out.extend(per[off : off + take])
            n += take
        return out

    def eventually_periodic(self):
        return self.preperiod, self.period

    def canonical(self) -> EventuallyPeriodic:
        """Shortest preperiod and primitive period describing the same sequence."""
        per = _primitive(self.period)
        pre = list(self.preperiod)
        # rotate the period backwards while the preperiod ends with its last digit
        while pre and pre[-1] == per[-1]:
            pre.pop()
            per = (per[-1],) + per[:-1]
        return EventuallyPeriodic(tuple(pre), per, self.alpha)

    def shift(self, k=1):
        if k < 0:
            raise ValueError("shift count must be non-negative")
        pre, per = self.preperiod, self.period
        if k <= len(pre):
            return EventuallyPeriodic(pre[k:], per, self.alpha)
        j = (k - len(pre)) % len(per)
        return EventuallyPeriodic((), per[j:] + per[:j], self.alpha)

    def reflect(self):
        a = self.alpha
        return EventuallyPeriodic(tuple(a - x for x in self.preperiod), tuple(a - x for x in self.period), a)

    def prepend(self, word):
        return EventuallyPeriodic(tuple(word) + self.preperiod, self.period, self.alpha)

    def describe(self):
        return "EventuallyPeriodic"


def _primitive(word: tuple[int, ...]) -> tuple[int, ...]:
    n = len(word)
    for q in range(1, n + 1):
        if n % q == 0 and word[:q] * (n // q) == word:
            return word[:q]
    return word


class PMirrorSequence(SymbolicSequence):
    """Sequence generated by the reflect-and-increment doubling rule.

    d_1..d_p = t^+ and each block d_{2^m p + 1} .. d_{2^{m+1} p} is the
    reflection of d_1 .. d_{2^m p} with its last digit increased by one.
    """

    def __init__(self, generator: Sequence[int], alpha: int):
        super().__init__(alpha)
        t = Alphabet(alpha).check(generator)
        if not t:
            raise ValueError("generator must be nonempty")
        if t[-1] >= alpha:
            raise ValueError("generator must end with a digit below alpha")
        self.generator = t
        self.p = len(t)
        self._first = t[:-1] + (t[-1] + 1,)

    def _digit(self, n):
        p, a = self.p, self.alpha
        flips = 0
        bump = False  # whether the current position is a block end that got incremented
        while n > p:
            size = p
            while size * 2 < n:
                size *= 2
            # n lies in the second half of the block of length 2*size
            j = n - size
            if j == size:
                # last digit of a doubled block: reflect(d_size) + 1, where d_size is
                # itself computed at the reflected level
                bump = True
                break
            n = j
            flips ^= 1
        if bump:
            inner = self._digit(size)
            value = (a - inner) + 1
        else:
            value = self._first[n - 1]
        return a - value if flips else value

    def _compute_from_scratch(self, stop):
        full = list(self._first)
        a = self.alpha
        while len(full) < stop:
            block = [a - x for x in full]
            block[-1] += 1
            full.extend(block)
        return full[:stop]

    def _ensure(self, n):
        cache = self._cache
        if n <= len(cache):
            return cache
        with self._lock:
            if n > len(self._cache):
                size = self.p
                while size < n:
                    size *= 2
                self._cache[:] = self._compute_from_scratch(size)
            return self._cache

    def block(self, m: int) -> Word:
        """b_m = d_1 .. d_{2^(m-1) p}."""
        if m < 1:
            raise ValueError("block index starts at 1")
        return self.word(self.p << (m - 1))

    def reflect(self):
        return Reflected(self)

    def describe(self):
        return f"PMirror(t={format_digits(self.generator, self.alpha)})"


class IndexSequence:
    """Positive integers m_1, m_2, ...; the protocol used by :class:`MConcatSequence`."""

    def term(self, k: int) -> int:
        raise NotImplementedError

    def terms(self, count: int) -> list[int]:
        return [self.term(k) for k in range(1, count + 1)]

    def unbounded(self) -> bool | None:
        """True/False when known structurally, None when unknown."""
        return None


class PeriodicIndices(IndexSequence):
    def __init__(self, preperiod: Sequence[int], period: Sequence[int]):
        self.preperiod = tuple(int(m) for m in preperiod)
        self.period = tuple(int(m) for m in period)
        if not self.period:
            raise ValueError("index period must be nonempty")
        if any(m < 1 for m in self.preperiod + self.period):
            raise ValueError("index terms must be positive")

    def term(self, k):
        if k <= len(self.preperiod):
            return self.preperiod[k - 1]
        return self.period[(k - len(self.preperiod) - 1) % len(self.period)]

    def unbounded(self):
        return False


class FunctionIndices(IndexSequence):
    def __init__(self, fn: Callable[[int], int], unbounded: bool | None = None):
        self._fn = fn
        self._unbounded = unbounded

    def term(self, k):
        return self._fn(k)

    def unbounded(self):
        return self._unbounded


class MConcatSequence(SymbolicSequence):
    """Concatenation of the blocks d_1 .. d_{m_k} with the last digit decreased."""

    def __init__(self, d: SymbolicSequence, m: IndexSequence):
        super().__init__(d.alpha)
        self.d = d
        self.m = m
        self._ends: list[int] = [0]  # _ends[k] = m_1 + ... + m_k
        self._mlock = threading.Lock()

    def _locate(self, n: int) -> tuple[int, int]:
        """Block index k and position inside the block for digit n."""
        ends = self._ends
        if ends[-1] < n:
            with self._mlock:
                while self._ends[-1] < n:
                    k = len(self._ends)
                    self._ends.append(self._ends[-1] + self.m.term(k))
            ends = self._ends
        k = bisect.bisect_left(ends, n)
        return k, n - ends[k - 1]

    def _digit(self, n):
        k, j = self._locate(n)
        a = self.d.digit(j)
        if j == self.m.term(k):
            if a == 0:
                from .errors import NotDPositive

                raise NotDPositive(k, j)
            a -= 1
        return a

    def _compute(self, start, stop):
        out: list[int] = []
        n = start + 1
        while n <= stop:
            k, j = self._locate(n)
            mk = self.m.term(k)
            take = min(mk - j + 1, stop - n + 1)
            chunk = list(self.d.window(j - 1, take))
            if j - 1 + take == mk:
                if chunk[-1] == 0:
                    from .errors import NotDPositive

                    raise NotDPositive(k, mk)
                chunk[-1] -= 1
            out.extend(chunk)
            n += take
        return out

    def eventually_periodic(self):
        if not isinstance(self.m, PeriodicIndices):
            return None
        terms = self.m.preperiod + self.m.period
        blocks = [self._block(k, m) for k, m in enumerate(terms, 1)]
        k0 = len(self.m.preperiod)
        pre = [a for b in blocks[:k0] for a in b]
        per = [a for b in blocks[k0:] for a in b]
        return tuple(pre), tuple(per)

    def _block(self, k: int, m: int) -> tuple[int, ...]:
        w = list(self.d.prefix(m))
        if w[-1] == 0:
            from .errors import NotDPositive

            raise NotDPositive(k, m)
        w[-1] -= 1
        return tuple(w)

    def block_start(self, k: int) -> int:
        """Number of digits before block k."""
        self._locate(1)
        while len(self._ends) <= k - 1:
            self._locate(self._ends[-1] + 1)
        return self._ends[k - 1]

    def describe(self):
        return "MConcat"


class BlockProduct(SymbolicSequence):
    """Product of (word, repeat count) blocks; counts may be huge integers.

    ``blocks`` is either a finite list whose last count is ``INF`` or a
    callable returning the i-th block (i >= 1) of an infinite list.
    """

    def __init__(self, blocks, alpha: int, few_choices: bool = False):
        super().__init__(alpha)
        ab = Alphabet(alpha)
        if callable(blocks):
            self._source = blocks
            self._blocks: list[tuple[tuple[int, ...], object]] = []
            self._finite = False
        else:
            blocks = [(ab.check(w), c) for w, c in blocks]
            if not blocks or blocks[-1][1] != INF:
                raise ValueError("a finite block list must end with an infinite repeat")
            if any(c == INF for _, c in blocks[:-1]):
                raise ValueError("only the last block may repeat forever")
            self._source = None
            self._blocks = blocks
            self._finite = True
        for w, _ in self._blocks:
            if not w:
                raise ValueError("blocks must be nonempty words")
        self.few_choices = few_choices
        self._ends: list[int] = [0]
        self._blk_lock = threading.Lock()

    def block_spec(self, i: int) -> tuple[tuple[int, ...], object]:
        if self._finite:
            return self._blocks[i - 1]
        with self._blk_lock:
            while len(self._blocks) < i:
                w, c = self._source(len(self._blocks) + 1)
                w = Alphabet(self.alpha).check(w)
                if not w or c == INF or c < 1:
                    raise ValueError("streamed blocks need a nonempty word and a finite positive count")
                self._blocks.append((w, c))
        return self._blocks[i - 1]

    def _locate(self, n: int) -> tuple[int, int]:
        """Block index i and offset (0-based) of digit n inside that block."""
        with self._blk_lock:
            ends = self._ends
        while ends[-1] < n:
            i = len(ends)
            w, c = self.block_spec(i)
            if c == INF:
                return i, n - 1 - ends[-1]
            with self._blk_lock:
                if len(self._ends) == i:
                    self._ends.append(self._ends[-1] + len(w) * c)
                ends = self._ends
        i = bisect.bisect_left(ends, n)
        return i, n - 1 - ends[i - 1]

    def _digit(self, n):
        i, off = self._locate(n)
        w, _ = self.block_spec(i)
        return w[off % len(w)]

    def _compute(self, start, stop):
        out: list[int] = []
        n = start + 1
        while n <= stop:
            i, off = self._locate(n)
            w, c = self.block_spec(i)
            q = len(w)
            length = INF if c == INF else q * c
            take = int(min(length - off, stop - n + 1))
            r = off % q
            reps = w[r:] + w * ((take - len(w[r:])) // q + 1)
            out.extend(reps[:take])
            n += take
        return out

    def unbounded_structure(self) -> bool:
        return self.few_choices and not self._finite

    def describe(self):
        return "BlockProduct"


class Shifted(SymbolicSequence):
    def __init__(self, base: SymbolicSequence, k: int):
        if isinstance(base, Shifted):
            base, k = base.base, base.k + k
        super().__init__(base.alpha)
        self.base = base
        self.k = k

    def _digit(self, n):
        return self.base.digit(n + self.k)

    def _compute(self, start, stop):
        return list(self.base.window(start + self.k, stop - start))

    def shift(self, k=1):
        return Shifted(self.base, self.k + k) if k else self

    def describe(self):
        return f"Shift^{self.k}({self.base.describe()})"


class Reflected(SymbolicSequence):
    def __init__(self, base: SymbolicSequence):
        super().__init__(base.alpha)
        self.base = base

    def _digit(self, n):
        return self.alpha - self.base.digit(n)

    def _compute(self, start, stop):
        a = self.alpha
        return [a - x for x in self.base.window(start, stop - start)]

    def reflect(self):
        return self.base

    def eventually_periodic(self):
        ep = self.base.eventually_periodic()
        if ep is None:
            return None
        a = self.alpha
        return tuple(a - x for x in ep[0]), tuple(a - x for x in ep[1])

    def describe(self):
        return f"Reflect({self.base.describe()})"


class Prefixed(SymbolicSequence):
    def __init__(self, word: tuple[int, ...], base: SymbolicSequence):
        super().__init__(base.alpha)
        self.head = Alphabet(base.alpha).check(word)
        self.base = base

    def _digit(self, n):
        k = len(self.head)
        return self.head[n - 1] if n <= k else self.base.digit(n - k)

    def _compute(self, start, stop):
        k = len(self.head)
        out = list(self.head[start:stop])
        lo = max(start, k)
        if stop > lo:
            out.extend(self.base.window(lo - k, stop - lo))
        return out

    def shift(self, k=1):
        if k <= len(self.head):
            return Prefixed(self.head[k:], self.base) if k < len(self.head) else self.base
        return self.base.shift(k - len(self.head))

    def eventually_periodic(self):
        ep = self.base.eventually_periodic()
        if ep is None:
            return None
        return self.head + ep[0], ep[1]

    def describe(self):
        return f"Prefixed({self.base.describe()})"


class FunctionSequence(SymbolicSequence):
    def __init__(self, fn: Callable[[int], int], alpha: int, name: str = "Function"):
        super().__init__(alpha)
        self._fn = fn
        self._name = name

    def _digit(self, n):
        return self._fn(n)

    def describe(self):
        return self._name


def sequence(digits, alpha: int) -> EventuallyPeriodic:
    """Convenience: ``sequence("(10)", 1)`` style shorthand is in the grammar module;
    this builds a purely periodic sequence from a digit string or tuple."""
    if isinstance(digits, str):
        digits = Word.parse(digits, alpha).digits
    return EventuallyPeriodic.periodic(digits, alpha)


# ---------------------------------------------------------------------------
# lexicographic order and the metric


class Verdict(enum.Enum):
    LESS = "Less"
    GREATER = "Greater"
    EQUAL_TO_HORIZON = "EqualToHorizon"
    DECIDED_EQUAL = "DecidedEqual"


@dataclass(frozen=True)
class LexResult:
    verdict: Verdict
    witness: int | None = None  # first differing index
    horizon: int | None = None

    @property
    def less(self) -> bool:
        return self.verdict is Verdict.LESS

    @property
    def greater(self) -> bool:
        return self.verdict is Verdict.GREATER


def exact_bound(s: SymbolicSequence, t: SymbolicSequence) -> int | None:
    """Length after which two eventually periodic sequences cannot first differ."""
    es, et = s.eventually_periodic(), t.eventually_periodic()
    if es is None or et is None:
        return None
    return len(es[0]) + len(et[0]) + 2 * math.lcm(len(es[1]), len(et[1]))


def first_difference(s: SymbolicSequence, t: SymbolicSequence, limit: int) -> int | None:
    """Smallest n <= limit with s_n != t_n, or None."""
    n = 0
    chunk = 64
    while n < limit:
        size = min(chunk, limit - n)
        a = s.window(n, size)
        b = t.window(n, size)
        if a != b:
            for i, (x, y) in enumerate(zip(a, b)):
                if x != y:
                    return n + i + 1
        n += size
        chunk = min(chunk * 2, 1 << 16)
    return None


def lex_compare(s: SymbolicSequence, t: SymbolicSequence, horizon: int = DEFAULT_HORIZON) -> LexResult:
    if s.alpha != t.alpha:
        raise ValueError("sequences over different alphabets")
    bound = exact_bound(s, t)
    limit = bound if bound is not None else horizon
    n = first_difference(s, t, limit)
    if n is not None:
        verdict = Verdict.LESS if s.digit(n) < t.digit(n) else Verdict.GREATER
        return LexResult(verdict, n, limit)
    if bound is not None:
        return LexResult(Verdict.DECIDED_EQUAL, None, limit)
    return LexResult(Verdict.EQUAL_TO_HORIZON, None, limit)


@dataclass(frozen=True)
class MetricContext:
    beta: RefinableReal
    alpha: int | None = None

    def __post_init__(self):
        beta = as_real(self.beta)
        object.__setattr__(self, "beta", beta)
        if compare(beta, 1, DEFAULT_CONTEXT) is not Ordering.GREATER:
            raise ValueError("base must be certified greater than 1")
        if self.alpha is not None and compare(beta, self.alpha + 1, DEFAULT_CONTEXT) is not Ordering.LESS:
            raise ValueError("base must be certified below alpha + 1")


def rho(a: SymbolicSequence, b: SymbolicSequence, ctx: MetricContext | RefinableReal, horizon: int = DEFAULT_HORIZON) -> RefinableReal:
    """beta ** (1 - n) where n is the first index where a and b differ."""
    if not isinstance(ctx, MetricContext):
        ctx = MetricContext(ctx)
    res = lex_compare(a, b, horizon)
    if res.witness is None:
        raise IndistinguishableToHorizon(f"sequences agree on the first {res.horizon} digits")
    n = res.witness
    if n == 1:
        return as_real(1)
    return 1 / ctx.beta ** (n - 1)
