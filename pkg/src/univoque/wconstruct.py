"""Explicit members of W: d-positive index sequences and the sequences they build.

Given d = d(beta), a d-positive sequence M = (m_k) yields

    omega(M) = d_1 .. d_{m_1}^-  d_1 .. d_{m_2}^-  ...

which always satisfies sigma^n(omega) < d.  The builders below choose M so
that the reflected condition holds as well, following the two recursions
(bounded and unbounded run lengths of dbar against d).
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .errors import HorizonExhausted, HypothesisFailed, NotDPositive, PrecisionExhausted, RateTooSlow
from .expand import ExpansionDomain, project
from .membership import z_array
from .numerics import DEFAULT_CONTEXT, Interval, Ordering, RefinableReal, as_real, compare
from .symseq import (
    INF,
    BlockProduct,
    EventuallyPeriodic,
    IndexSequence,
    MConcatSequence,
    PMirrorSequence,
    SymbolicSequence,
    Verdict,
    lex_compare,
)

DEFAULT_BUDGET = 10**6


class RunLengths:
    """t_n = lcp(sigma^n(dbar), d), computed by a Z-function on growing prefixes.

    Every digit of d that gets read counts against ``budget``.
    """

    def __init__(self, d: SymbolicSequence, budget: int = DEFAULT_BUDGET):
        self.d = d
        self.budget = budget
        self.reads = 0
        self._t: list[int] = []
        self._valid = 0  # t_n is exact for n < _valid
        self._length = 0
        self._lock = threading.Lock()
        ep = d.eventually_periodic()
        self._ep = ep

    def _grow(self, need: int) -> None:
        if self._length >= self.budget:
            raise HorizonExhausted(f"run-length search needs more than {self.budget} digits of d")
        length = max(64, self._length * 2)
        while length < need:
            length *= 2
        length = min(length, self.budget)
        d = list(self.d.prefix(length))
        self.reads = length
        a = self.d.alpha
        dbar = [a - x for x in d]
        z = z_array(d + [-1] + dbar)
        off = length + 1
        self._t = [z[off + n] for n in range(length)]
        # t_n is reliable only if the match stopped before the end of the text
        valid = length
        for n in range(length - 1, -1, -1):
            if n + self._t[n] >= length:
                valid = n
        self._valid = valid
        self._length = length

    def __call__(self, n: int) -> int:
        if self._ep is not None:
            pre, per = self._ep
            if n > len(pre) + len(per):
                n = len(pre) + (n - len(pre)) % len(per)
        with self._lock:
            while n >= self._valid:
                self._grow(max(2 * n + 64, self._length + 1))
            return self._t[n]


@dataclass
class MSequence(IndexSequence):
    """A d-positive index sequence with its provenance.

    ``generate(k)`` extends ``terms`` to at least k entries; the provenance
    dictionary records the auxiliary quantities of the recursion.
    """

    d: SymbolicSequence
    provenance: str
    generate: Callable[[int], None] | None = None
    terms_list: list[int] = field(default_factory=list)
    info: dict = field(default_factory=dict)
    post_verified: bool = False  # True when soundness rests on a scan, not on a theorem
    increasing: bool = True

    def __post_init__(self):
        self._lock = threading.RLock()

    def term(self, k: int) -> int:
        if k < 1:
            raise IndexError("terms are indexed from 1")
        with self._lock:
            if len(self.terms_list) < k:
                if self.generate is None:
                    raise IndexError(f"only {len(self.terms_list)} terms are defined")
                self.generate(k)
            return self.terms_list[k - 1]

    def unbounded(self) -> bool | None:
        if self.increasing and self.generate is not None:
            return True
        return None

    def check_positive(self, count: int) -> None:
        """d-positivity of the first ``count`` terms that are already materialized."""
        for k in range(1, min(count, len(self.terms_list)) + 1):
            m = self.term(k)
            if self.d.digit(m) == 0:
                raise NotDPositive(k, m)

    def to_json(self, count: int) -> dict:
        return {"terms": self.terms(count), "provenance": self.provenance, "post_verified": self.post_verified}


def manual_M(d: SymbolicSequence, terms, periodic_tail: bool = False) -> MSequence:
    """A hand-written M; with ``periodic_tail`` the listed terms repeat forever."""
    terms = [int(m) for m in terms]
    if not terms or any(m < 1 for m in terms):
        raise ValueError("terms must be positive integers")
    if periodic_tail:
        base = list(terms)

        def gen(k):
            while len(seq.terms_list) < k:
                seq.terms_list.append(base[len(seq.terms_list) % len(base)])

        seq = MSequence(d, "Manual", gen, [], increasing=False)
        seq.info["period"] = base
        return seq
    return MSequence(d, "Manual", None, terms, increasing=False)


class _BoundedM(IndexSequence):
    def __init__(self, m: MSequence):
        self.m = m

    def term(self, k):
        return self.m.term(k)

    def unbounded(self):
        return False if "period" in self.m.info else None


def omega_of_M(M: MSequence, check: int = 32) -> MConcatSequence:
    """The concatenation of the blocks d_1 .. d_{m_k} with the last digit lowered.

    The first ``check`` terms are tested for d-positivity up front; later
    terms are tested as they are read.
    """
    if "period" in M.info:
        M.term(len(M.info["period"]))  # one period decides every term
    M.check_positive(check)
    if "period" in M.info:
        return MConcatSequence(M.d, _BoundedM(M))
    return MConcatSequence(M.d, M)


# ---------------------------------------------------------------------------
# bounded run lengths


def _periodic_tail_max(d: SymbolicSequence) -> int:
    """Longest prefix of d occurring in the periodic part of dbar; -1 if unbounded."""
    pre, per = d.eventually_periodic()
    a = d.alpha
    cyc = tuple(a - x for x in per)
    best = 0
    bound = len(pre) + 2 * len(per) + 2
    dp = d.prefix(bound + 1)
    for i in range(len(cyc)):
        rot = cyc[i:] + cyc[:i]
        L = 0
        while L <= bound and rot[L % len(rot)] == dp[L]:
            L += 1
        if L > bound:
            return -1
        best = max(best, L)
    return best


def build_M0_key(d: SymbolicSequence, horizon: int = 10_000, budget: int = DEFAULT_BUDGET) -> MSequence:
    """M0 for the case sup sigma^n(dbar) < d.

    k0 is the longest prefix of d occurring infinitely often in dbar, l0 the
    longest occurring at all, N the end of the last occurrence of any longer
    prefix; then n_k is the next occurrence of d_1..d_k0 after m_{k-1} and
    m_k = n_k + k0 + 1.
    """
    if isinstance(d, ExpansionDomain):
        d = d.expansion_of_one()
    t = RunLengths(d, budget)
    ep = d.eventually_periodic()
    exact = ep is not None
    if exact:
        pre, per = ep
        span = len(pre) + len(per)
        # hypothesis: every shift sigma^n(dbar), n >= 1, is below d (finitely many distinct shifts)
        dbar = d.reflect()
        for n in range(1, span + 1):
            res = lex_compare(dbar.shift(n), d, horizon)
            if res.verdict is not Verdict.LESS:
                raise HypothesisFailed(f"sigma^{n}(dbar) is not below d ({res.verdict.value})", witness=n)
        k0 = _periodic_tail_max(d)
        if k0 < 0:
            raise HypothesisFailed("the periodic part of dbar reaches d")
        scan_to = span
    else:
        scan_to = min(horizon, budget // 2)
        lengths = [t(n) for n in range(scan_to + 1)]
        if lengths and max(lengths[1:], default=0) >= scan_to // 2:
            raise HypothesisFailed("run lengths of dbar against d look unbounded; use the critical builder")
        # occurrences in the second half stand in for "infinitely often"
        k0 = max(lengths[scan_to // 2 :], default=0)
    l0 = max(t(n) for n in range(scan_to + 1))
    if exact:
        l0 = max(l0, k0)
    if l0 == k0:
        N = 0
        Nk = {}
    else:
        Nk = {}
        for k in range(k0 + 1, l0 + 1):
            last = max(n for n in range(scan_to + 1) if t(n) >= k)
            Nk[k] = last + k
        N = max(Nk.values())
    info = {"k0": k0, "l0": l0, "N": N, "N_k": Nk, "n": [], "exact": exact}
    seq = MSequence(d, "KeyConstruction", None, [], info, post_verified=not exact)

    def gen(count: int) -> None:
        while len(seq.terms_list) < count:
            prev = seq.terms_list[-1] if seq.terms_list else N
            if k0 > 0:
                n = prev + 1
                while t(n) < k0:
                    n += 1
                    if not exact and n > budget:
                        raise HorizonExhausted("no further occurrence of d_1..d_k0 within the budget")
            else:
                n = prev + 1
            m = n + k0 + 1
            if d.digit(m) == 0:
                raise NotDPositive(len(seq.terms_list) + 1, m)
            info["n"].append(n)
            seq.terms_list.append(m)

    seq.generate = gen
    return seq


# ---------------------------------------------------------------------------
# unbounded run lengths


def build_M0_critical(d: SymbolicSequence, count: int, budget: int = DEFAULT_BUDGET) -> MSequence:
    """M0 for the case where sigma^n(dbar) < d but the run lengths t_n are unbounded.

    l_1 = 1; n_k is the first n with t_n >= l_k; m_k = n_k + t_{n_k} + 1
    (the first index where dbar drops below d); l_{k+1} = max_{n <= m_k} t_n + 1.
    """
    if isinstance(d, ExpansionDomain):
        d = d.expansion_of_one()
    if d.eventually_periodic() is not None:
        pre, per = d.eventually_periodic()
        if _periodic_tail_max(d) >= 0:
            raise HypothesisFailed("run lengths are bounded for this d; use the key builder")
    t = RunLengths(d, budget)
    alpha = d.alpha
    info: dict[str, Any] = {"l": [1], "n": [], "t_max": []}
    seq = MSequence(d, "CriticalCase", None, [], info)
    state = {"scan": 0, "best": 0}  # running max of t_n for n < scan

    def running_max(upto: int) -> int:
        while state["scan"] <= upto:
            state["best"] = max(state["best"], t(state["scan"]))
            state["scan"] += 1
        return state["best"]

    def gen(k_target: int) -> None:
        while len(seq.terms_list) < k_target:
            k = len(seq.terms_list) + 1
            lk = info["l"][k - 1]
            # every n <= m_{k-1} has t_n < l_k, so the search may start past m_{k-1}
            n = seq.terms_list[-1] + 1 if seq.terms_list else 0
            while t(n) < lk:
                n += 1
            tn = t(n)
            # the first i with dbar_{n+i} < d_i: the mismatch right after the run
            i = tn + 1
            if alpha - d.digit(n + i) >= d.digit(i):
                raise HypothesisFailed(f"sigma^{n}(dbar) is not below d", witness=n)
            m = n + i
            if d.digit(m) == 0:
                raise NotDPositive(k, m)
            info["n"].append(n)
            seq.terms_list.append(m)
            nxt = running_max(m) + 1
            info["l"].append(nxt)
            info["t_max"].append(nxt - 1)

    seq.generate = gen
    gen(count)
    return seq


# ---------------------------------------------------------------------------
# subsequences


def subsequence(M0: MSequence, indices: Callable[[int], int] | list[int], tail_from: int | None = None) -> MSequence:
    """The subsequence (m_{k(j)}); a finite index list continues with every term past ``tail_from``."""
    if callable(indices):
        pick = indices
    else:
        chosen = sorted(set(int(i) for i in indices))
        start = tail_from if tail_from is not None else (chosen[-1] + 1 if chosen else 1)
        if chosen and start <= chosen[-1]:
            raise ValueError("tail must start after the chosen indices")

        def pick(j):
            return chosen[j - 1] if j <= len(chosen) else start + (j - len(chosen) - 1)

    sub = MSequence(M0.d, f"Subsequence({M0.provenance})", None, [], {"k": []}, post_verified=True)

    def gen(count):
        while len(sub.terms_list) < count:
            j = len(sub.terms_list) + 1
            k = pick(j)
            if sub.info["k"] and k <= sub.info["k"][-1]:
                raise ValueError("subsequence indices must increase")
            sub.info["k"].append(k)
            sub.terms_list.append(M0.term(k))

    sub.generate = gen
    return sub


@dataclass
class RateSpec:
    """theta(n) > 0; ``monotone`` declares theta increasing and unbounded."""

    theta: Callable[[int], Any]
    monotone: bool = False
    label: str = "theta"

    def value(self, n: int) -> RefinableReal:
        v = as_real(self.theta(n))
        if compare(v, 0) is not Ordering.GREATER:
            raise ValueError(f"theta_{n} must be positive")
        return v


_RATE = re.compile(r"^\s*(?:theta\s*=\s*)?(.+?)\s*$")


def parse_rate(text: str) -> RateSpec:
    """Rates of the forms ``c^n``, ``n^c``, ``n``, ``c`` (integer or decimal c)."""
    body = _RATE.match(text).group(1).replace("**", "^").replace(" ", "")
    num = r"(\d+(?:\.\d+)?)"
    if m := re.fullmatch(num + r"\^n", body):
        c = Fraction(m.group(1))
        return RateSpec(lambda n: c ** n, monotone=c > 1, label=body)
    if m := re.fullmatch(r"n\^" + num, body):
        c = Fraction(m.group(1))
        if c.denominator != 1:
            raise ValueError("use an integer exponent in n^c")
        e = int(c)
        return RateSpec(lambda n: Fraction(n) ** e, monotone=e > 0, label=body)
    if body == "n":
        return RateSpec(lambda n: n, monotone=True, label=body)
    if m := re.fullmatch(num, body):
        c = Fraction(m.group(1))
        return RateSpec(lambda n: c, monotone=False, label=body)
    raise ValueError(f"unsupported rate {text!r}; use c^n, n^c, n or a constant")


def _beta_power_at_least(beta: RefinableReal, m: int, theta: RefinableReal) -> bool:
    verdict = compare(beta ** m, theta)
    if verdict is Ordering.UNDECIDED:
        raise PrecisionExhausted(f"cannot compare beta^{m} with theta")
    return verdict in (Ordering.GREATER, Ordering.EQUAL)


def subsequence_for_rate(M0: MSequence, rate: RateSpec, beta, search_limit: int = 10**5) -> MSequence:
    """Greedy subsequence with beta^(m_{k(j+1)}) >= theta_{s_j} for every j >= 1."""
    beta = as_real(beta)
    sub = MSequence(M0.d, f"Rate({M0.provenance})", None, [], {"k": [], "s": [0]}, post_verified=True)

    def gen(count):
        while len(sub.terms_list) < count:
            j = len(sub.terms_list)
            k = sub.info["k"][-1] + 1 if sub.info["k"] else 1
            if j >= 1:
                theta = rate.value(sub.info["s"][-1])
                tries = 0
                while not _beta_power_at_least(beta, M0.term(k), theta):
                    k += 1
                    tries += 1
                    if tries > search_limit:
                        raise RateTooSlow(f"no term of M0 reaches theta_{sub.info['s'][-1]} within {search_limit} steps")
            m = M0.term(k)
            sub.info["k"].append(k)
            sub.terms_list.append(m)
            sub.info["s"].append(sub.info["s"][-1] + m)

    sub.generate = gen
    return sub


@dataclass(frozen=True)
class Checkpoint:
    j: int
    s: int
    value: Interval  # theta_s (1 - Pi(sigma^s omega))
    bound: Interval  # alpha / (beta - 1)

    @property
    def ok(self) -> bool:
        return self.value.hi <= self.bound.hi


def rate_checkpoints(M: MSequence, rate: RateSpec, domain: ExpansionDomain, count: int = 10, bits: int = 96) -> list[Checkpoint]:
    """theta_{s_j} (1 - Pi(sigma^{s_j} omega)) at the first ``count`` checkpoints.

    With L = lcp(sigma^s omega, d) the difference 1 - Pi(sigma^s omega) equals
    beta^-L (Pi(sigma^L d) - Pi(sigma^(L+s) omega)), which avoids cancellation.
    """
    omega = omega_of_M(M)
    d = domain.expansion_of_one()
    beta = domain.beta
    bound = (domain.jprime_hi).interval(bits)
    M.term(count + 1)
    out = []
    s = 0
    for j in range(1, count + 1):
        s += M.term(j)
        # sigma^s omega starts with d_1 .. d_{m_{j+1}}^-, so L = m_{j+1} - 1
        L = M.term(j + 1) - 1
        assert omega.window(s, L) == d.prefix(L)
        diff = project(d.shift(L), domain).interval(bits) - project(omega.shift(s + L), domain).interval(bits)
        scale = beta.interval(bits + 64).pow_rounded(-L, bits + 32)
        theta = rate.value(s).interval(bits + 32)
        value = (theta * scale * diff).rounded(bits)
        out.append(Checkpoint(j, s, value, bound))
    return out


# ---------------------------------------------------------------------------
# fast-growing block products at p-mirror bases


def _minimal_index(rate: RateSpec, target: RefinableReal, bound: int) -> int:
    """Least k >= 1 with theta_k >= target, for increasing theta."""

    def ok(k):
        v = compare(rate.value(k), target)
        if v is Ordering.UNDECIDED:
            raise PrecisionExhausted(f"cannot compare theta_{k} with the target")
        return v in (Ordering.GREATER, Ordering.EQUAL)

    hi = 1
    while not ok(hi):
        hi *= 2
        if hi > bound:
            raise RateTooSlow(f"theta stays below the target up to n = {bound}")
    lo = hi // 2  # 0, or an index known to fail
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def fast_block_sequence(
    rate: RateSpec, d: PMirrorSequence, beta, count: int = 5, bumps=(), search_bound: int = 10**40
) -> BlockProduct:
    """(b_1 b_1bar)^{k_1} (b_2 b_2bar)^{k_2} ... with k_i minimal such that theta_{k_i} >= beta^(2^(i+1) p).

    ``bumps`` lists block indices whose repeat count is increased by one,
    which gives further distinct sequences with the same property.
    """
    if not rate.monotone:
        raise RateTooSlow("the rate must be increasing and unbounded")
    if not isinstance(d, PMirrorSequence):
        raise TypeError("fast block sequences need a p-mirror d")
    beta = as_real(beta)
    p = d.p
    bumps = set(bumps)
    ks: dict[int, int] = {}
    lock = threading.Lock()

    def k_of(i):
        with lock:
            if i not in ks:
                target = beta ** ((2 ** (i + 1)) * p)
                ks[i] = _minimal_index(rate, target, search_bound) + (1 if i in bumps else 0)
            return ks[i]

    for i in range(1, count + 1):
        k_of(i)

    def block(i):
        b = d.block(i)
        return tuple(b) + tuple(b.reflect()), k_of(i)

    seq = BlockProduct(block, d.alpha, few_choices=True)
    seq.repeat_counts = ks
    return seq


def few_choices_violations(omega: SymbolicSequence, d: PMirrorSequence, horizon: int, levels: int) -> list[tuple[int, int]]:
    """Windows b_m (or its reflection) not followed as the few-choices rule requires.

    Returns (k, m) pairs: position k (0-based start) and level m.
    """
    bad = []
    a = d.alpha
    digits = omega.prefix(horizon + (d.p << levels))
    for m in range(1, levels + 1):
        bm = d.block(m).digits
        bmbar = tuple(a - x for x in bm)
        nxt = d.block(m + 1).digits
        ok_plus = {bm + bmbar, nxt}
        ok_minus = {bmbar + bm, tuple(a - x for x in nxt)}
        L = len(bm)
        for k in range(horizon):
            w = tuple(digits[k : k + L])
            if w == bm and tuple(digits[k : k + 2 * L]) not in ok_plus:
                bad.append((k, m))
            elif w == bmbar and tuple(digits[k : k + 2 * L]) not in ok_minus:
                bad.append((k, m))
    return bad
