"""Membership tests for univoque sequences and classification of bases.

All verdicts are three-valued.  A sequence is certified out only with an
explicit shift index where a strict inequality against d fails; it is
certified in only when finitely many comparisons cover every shift (for
eventually periodic input) or a structural argument applies.  Otherwise the
verdict reports how far the scan got.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

from .errors import DegenerateSequence, UnivoqueError
from .expand import ExpansionDomain
from .numerics import DEFAULT_CONTEXT, Interval, PrecisionContext, as_real
from .symseq import (
    DEFAULT_HORIZON,
    BlockProduct,
    EventuallyPeriodic,
    MConcatSequence,
    PMirrorSequence,
    SymbolicSequence,
    Verdict,
    Word,
    lex_compare,
)


class Status(enum.Enum):
    IN = "Certified-In"
    IN_W = "Certified-InW"
    OUT = "Certified-Out"
    UNDECIDED = "UndecidedToHorizon"


@dataclass(frozen=True)
class MembershipVerdict:
    status: Status
    witness: int | None = None  # shift index n where the condition fails
    condition: str | None = None  # "shift" or "reflected-shift"
    horizon: int | None = None
    exact: bool = False
    passes_to_horizon: bool = False  # no failure found among the scanned shifts
    evidence: dict = field(default_factory=dict)

    @property
    def is_in(self) -> bool:
        return self.status in (Status.IN, Status.IN_W)

    @property
    def is_out(self) -> bool:
        return self.status is Status.OUT


def z_array(s: list) -> list[int]:
    """Z-function: z[i] = length of the longest common prefix of s and s[i:]."""
    n = len(s)
    z = [0] * n
    if n:
        z[0] = n
    left = right = 0
    for i in range(1, n):
        if i < right:
            z[i] = min(right - i, z[i - left])
        while i + z[i] < n and s[z[i]] == s[i + z[i]]:
            z[i] += 1
        if i + z[i] > right:
            left, right = i, i + z[i]
    return z


def match_lengths(seq: SymbolicSequence, pattern: SymbolicSequence, count: int, cap: int, start: int = 0) -> list[int]:
    """lcp(sigma^n(seq), pattern) capped at ``cap`` for n = start .. start+count-1."""
    pat = list(pattern.prefix(cap))
    text = list(seq.window(start, count + cap))
    z = z_array(pat + [-1] + text)
    off = cap + 1
    return [z[off + n] for n in range(count)]


def _as_d(d) -> SymbolicSequence:
    if isinstance(d, ExpansionDomain):
        return d.expansion_of_one()
    return d


def _scan_condition(omega: SymbolicSequence, d: SymbolicSequence, first: int, last: int, cap: int):
    """Scan sigma^n(omega) < d for first <= n <= last.

    Returns (failing n or None, list of undecided n, max match length).
    """
    count = last - first + 1
    if count <= 0:
        return None, [], 0
    lengths = match_lengths(omega, d, count, cap, start=first)
    window = omega.prefix_view(first + count + cap)
    dpre = d.prefix_view(cap + 1)
    undecided = []
    best = 0
    for i, L in enumerate(lengths):
        n = first + i
        if L >= cap:
            undecided.append(n)
            continue
        best = max(best, L)
        if window[n + L] > dpre[L]:
            return n, undecided, best
    return None, undecided, best


def _check_eventually_periodic(omega, d, first_plus, first_minus, horizon):
    """Exact check for eventually periodic omega: only finitely many shifts differ."""
    pre, per = omega.eventually_periodic()
    last = len(pre) + len(per) - 1
    refl = omega.reflect()
    undecided = False
    # shifts past the preperiod repeat with the period, so one extra period covers them all
    for n in range(0, max(last, first_plus, first_minus) + len(per) + 1):
        for cond, seq, first in (("shift", omega, first_plus), ("reflected-shift", refl, first_minus)):
            if n < first:
                continue
            res = lex_compare(seq.shift(n), d, horizon)
            if res.verdict in (Verdict.GREATER, Verdict.DECIDED_EQUAL):
                return MembershipVerdict(
                    Status.OUT, n, cond, horizon, exact=True, evidence={"equality": res.verdict is Verdict.DECIDED_EQUAL}
                )
            if res.verdict is Verdict.EQUAL_TO_HORIZON:
                undecided = True
    if undecided:
        return MembershipVerdict(Status.UNDECIDED, horizon=horizon)
    return MembershipVerdict(Status.IN, horizon=horizon, exact=True, passes_to_horizon=True)


def _membership(omega, d, horizon, first_plus, first_minus, lookahead=None) -> MembershipVerdict:
    d = _as_d(d)
    if omega.alpha != d.alpha:
        raise ValueError("sequence and d use different alphabets")
    if omega.eventually_periodic() is not None:
        return _check_eventually_periodic(omega, d, first_plus, first_minus, horizon)
    limit = max(horizon, lookahead if lookahead is not None else 4 * horizon)
    worst: list[int] = []
    best = {}
    for cond, seq, first in (("shift", omega, first_plus), ("reflected-shift", omega.reflect(), first_minus)):
        # a shift whose match runs past the cap is rescanned with a doubled cap, up to ``limit``
        cap = horizon
        while True:
            fail, undecided, longest = _scan_condition(seq, d, first, horizon, cap)
            if fail is not None:
                return MembershipVerdict(Status.OUT, fail, cond, horizon, exact=True)
            if not undecided or cap >= limit:
                break
            cap = min(2 * cap, limit)
        best[cond] = longest
        worst.extend(undecided)
    return MembershipVerdict(
        Status.UNDECIDED,
        horizon=horizon,
        passes_to_horizon=not worst,
        evidence={"longest_match": best, "undecided_shifts": sorted(worst)[:10]},
    )


def in_U(omega: SymbolicSequence, d, horizon: int = DEFAULT_HORIZON, lookahead: int | None = None) -> MembershipVerdict:
    """Test sigma^n(omega) < d and sigma^n(reflect(omega)) < d for all n >= 0.

    Shifts n <= horizon are scanned; each comparison may read up to
    ``lookahead`` digits past n (default: four times the horizon).
    """
    return _membership(omega, d, horizon, 0, 0, lookahead)


def in_U_prime(omega: SymbolicSequence, d, horizon: int = DEFAULT_HORIZON, lookahead: int | None = None) -> MembershipVerdict:
    """Membership in the larger set with the thresholds m+ and m-."""
    d = _as_d(d)
    alpha = omega.alpha
    head = omega.prefix(horizon)
    m_plus = next((i + 1 for i, a in enumerate(head) if a < alpha), None)
    m_minus = next((i + 1 for i, a in enumerate(head) if a > 0), None)
    if m_plus is None or m_minus is None:
        raise DegenerateSequence(f"no digit below alpha / above 0 among the first {horizon}")
    verdict = _membership(omega, d, horizon, m_plus, m_minus, lookahead)
    evidence = dict(verdict.evidence, m_plus=m_plus, m_minus=m_minus)
    return MembershipVerdict(
        verdict.status, verdict.witness, verdict.condition, verdict.horizon, verdict.exact, verdict.passes_to_horizon, evidence
    )


def _cycle_max(period: tuple[int, ...]) -> tuple[int, ...]:
    """The lexicographically largest rotation: the limsup of shifts of period^inf."""
    return max(period[i:] + period[:i] for i in range(len(period)))


def is_strongly_univoque(omega: SymbolicSequence, d, horizon: int = DEFAULT_HORIZON) -> MembershipVerdict:
    """Certified-In (strongly univoque), Certified-InW (in U but not strongly), or undecided."""
    d = _as_d(d)
    base = in_U(omega, d, horizon)
    if base.is_out:
        return base
    if isinstance(omega, MConcatSequence):
        unb = omega.m.unbounded()
        if unb is True:
            return MembershipVerdict(Status.IN_W, horizon=horizon, exact=True, evidence={"reason": "m_k unbounded"})
        if unb is False:
            # limsup of the shifts is d_1..d_m^- ... for the largest recurring m, strictly below d
            return MembershipVerdict(Status.IN, horizon=horizon, exact=base.exact, evidence={"reason": "m_k bounded"})
    if isinstance(omega, BlockProduct) and omega.unbounded_structure():
        return MembershipVerdict(Status.IN_W, horizon=horizon, exact=True, evidence={"reason": "infinitely many distinct blocks"})
    if omega.eventually_periodic() is not None and base.status is Status.IN:
        # limsup over the periodic tail is attained by a rotation, which is < d already
        return MembershipVerdict(Status.IN, horizon=horizon, exact=True, evidence={"reason": "eventually periodic"})
    half = horizon // 2
    growth = {}
    for cond, seq in (("shift", omega), ("reflected-shift", omega.reflect())):
        lens = match_lengths(seq, d, horizon, horizon)
        growth[cond] = (max(lens[:half], default=0), max(lens[half:], default=0))
    growing = any(b > a for a, b in growth.values())
    return MembershipVerdict(
        Status.UNDECIDED, horizon=horizon, evidence={"match_growth": growth, "suggests_W": growing}
    )


# ---------------------------------------------------------------------------
# base classification


@dataclass(frozen=True)
class WStatus:
    kind: str  # Empty | NonemptyEvidence | DecidedNonempty
    witness: int | None = None
    equality: bool = False
    horizon: int | None = None


@dataclass(frozen=True)
class LimsupStatus:
    kind: str  # StrictlyBelow | EqualsD | Above | Unknown
    witness: int | None = None
    evidence: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DimHint:
    kind: str  # PositiveLowerBound | ZeroByPMirror | Unknown
    value: Interval | None = None


@dataclass
class BaseClassification:
    beta: Any
    alpha: int
    d_prefix: Word
    w_status: WStatus
    limsup_status: LimsupStatus
    dim_hint: DimHint
    horizon: int
    exact: bool

    def to_record(self, digits: int = 25) -> dict:
        lo, hi = self.beta.enclosure.decimal_bounds(digits)
        rec = {
            "alpha": self.alpha,
            "beta_enclosure": [lo, hi],
            "d_prefix": str(self.d_prefix),
            "w_status": {"kind": self.w_status.kind},
            "limsup_status": {"kind": self.limsup_status.kind},
            "dim_hint": {"kind": self.dim_hint.kind},
            "horizon": self.horizon,
            "exact": self.exact,
        }
        if self.w_status.witness is not None:
            rec["w_status"]["witness"] = self.w_status.witness
            rec["w_status"]["equality"] = self.w_status.equality
        if self.limsup_status.witness is not None:
            rec["limsup_status"]["witness"] = self.limsup_status.witness
        if self.limsup_status.evidence:
            rec["limsup_status"]["evidence"] = self.limsup_status.evidence
        if self.dim_hint.value is not None:
            rec["dim_hint"]["value"] = list(self.dim_hint.value.decimal_bounds(15))
        return rec


def _classify_periodic(d: SymbolicSequence, horizon: int):
    pre, per = d.eventually_periodic()
    dbar = d.reflect()
    w = None
    for n in range(1, len(pre) + len(per) + 1):
        res = lex_compare(dbar.shift(n), d, horizon)
        if res.verdict in (Verdict.GREATER, Verdict.DECIDED_EQUAL):
            w = WStatus("Empty", n, res.verdict is Verdict.DECIDED_EQUAL, horizon)
            break
    if w is None:
        w = WStatus("DecidedNonempty", horizon=horizon)
    # limsup of sigma^n(dbar) is the largest rotation of the reflected period
    alpha = d.alpha
    top = EventuallyPeriodic.periodic(_cycle_max(tuple(alpha - a for a in per)), alpha)
    res = lex_compare(top, d, horizon)
    lcp = (res.witness - 1) if res.witness else None
    if res.verdict is Verdict.LESS:
        lim = LimsupStatus("StrictlyBelow", evidence={"max_match": lcp})
    elif res.verdict is Verdict.DECIDED_EQUAL:
        lim = LimsupStatus("EqualsD", evidence={"exact": True})
    else:
        lim = LimsupStatus("Above", res.witness)
    return w, lim


def _classify_scan(d: SymbolicSequence, horizon: int):
    dbar = d.reflect()
    fail, _, _ = _scan_condition(dbar, d, 1, horizon, horizon)
    lengths = match_lengths(dbar, d, horizon, horizon, start=1)
    half = len(lengths) // 2
    first, second = max(lengths[:half], default=0), max(lengths[half:], default=0)
    evidence = {"max_match_first_half": first, "max_match_second_half": second}
    w = WStatus("Empty", fail, False, horizon) if fail is not None else WStatus("NonemptyEvidence", horizon=horizon)
    late, _, _ = _scan_condition(dbar, d, half + 1, horizon, horizon)
    if late is not None:
        lim = LimsupStatus("Above", late, evidence)
    else:
        # growing match lengths suggest the limsup reaches d; bounded ones that it stays below
        lim = LimsupStatus("EqualsD" if second > first else "StrictlyBelow", evidence=evidence)
    return w, lim


def classify_base(beta, alpha: int, horizon: int = 2000, ctx: PrecisionContext = DEFAULT_CONTEXT, domain=None, with_dimension: bool = True) -> BaseClassification:
    """Decide whether W is empty at ``beta`` and how close sigma^n(dbar) gets to d."""
    if domain is None:
        domain = ExpansionDomain(alpha, as_real(beta), ctx)
    d = domain.expansion_of_one()
    exact = False
    if d.eventually_periodic() is not None:
        w, lim = _classify_periodic(d, horizon)
        exact = True
    elif isinstance(d, PMirrorSequence):
        # rule-generated: every sigma^n(dbar) < d while the run lengths are unbounded
        w, lim = _classify_scan(d, horizon)
        if w.kind != "Empty":
            w = WStatus("DecidedNonempty", horizon=horizon)
            lim = LimsupStatus("EqualsD", evidence=dict(lim.evidence, rule="p-mirror"))
            exact = True
    else:
        w, lim = _classify_scan(d, horizon)
    hint = DimHint("Unknown")
    if w.kind != "Empty":
        if lim.kind == "EqualsD" and isinstance(d, PMirrorSequence):
            hint = DimHint("ZeroByPMirror")
        elif lim.kind == "StrictlyBelow" and with_dimension:
            from .dimension import wbeta_dimension_lower

            try:
                value = wbeta_dimension_lower(domain.beta, alpha, 6, 1e-9, domain=domain)
                hint = DimHint("PositiveLowerBound", value.enclosure)
            except UnivoqueError:  # a failed bound leaves the hint unknown
                hint = DimHint("Unknown")
    return BaseClassification(domain.beta, alpha, d.word(min(horizon, 64)), w, lim, hint, horizon, exact)
