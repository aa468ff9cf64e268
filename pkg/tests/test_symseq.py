from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from univoque.errors import IndistinguishableToHorizon
from univoque.numerics import RefinableReal
from univoque.symseq import (
    Alphabet,
    EventuallyPeriodic,
    MConcatSequence,
    PeriodicIndices,
    PMirrorSequence,
    Verdict,
    Word,
    format_digits,
    lex_compare,
    rho,
    sequence,
)

digits = st.lists(st.integers(0, 2), max_size=5)
periods = st.lists(st.integers(0, 2), min_size=1, max_size=5)


def test_alphabet_rejects_bad_alpha_and_digits():
    with pytest.raises(ValueError):
        Alphabet(0)
    with pytest.raises(ValueError):
        Alphabet(1).check([0, 2])
    assert 1 in Alphabet(1) and 2 not in Alphabet(1)


def test_word_plus_minus_reflect():
    w = Word((1, 0), 1)
    assert w.plus().digits == (1, 1)
    assert w.reflect().digits == (0, 1)
    with pytest.raises(ValueError):
        w.minus()
    with pytest.raises(ValueError):
        Word((1,), 1).plus()


def test_word_parse_large_alphabet():
    assert Word.parse("11,3,0", 12).digits == (11, 3, 0)
    assert format_digits((11, 3, 0), 12) == "11,3,0"


def test_periodic_prefix_and_shift():
    s = sequence("10", 1)
    assert s.prefix(5) == (1, 0, 1, 0, 1)
    assert s.shift(1).prefix(3) == (0, 1, 0)
    assert s.digit(1000) == 0
    with pytest.raises(IndexError):
        s.digit(0)


@given(digits, periods)
def test_canonical_form_is_same_sequence(pre, per):
    s = EventuallyPeriodic(pre, per, 2)
    c = s.canonical()
    assert c.prefix(40) == s.prefix(40)
    cpre, cper = c.eventually_periodic()
    assert len(cpre) <= len(pre) and len(cper) <= len(per)


@given(digits, periods, st.integers(0, 12))
def test_shift_and_reflect_commute(pre, per, k):
    s = EventuallyPeriodic(pre, per, 2)
    assert s.shift(k).reflect().prefix(20) == s.reflect().shift(k).prefix(20)
    assert s.reflect().reflect().prefix(20) == s.prefix(20)


@given(digits, periods, digits, periods)
def test_lex_compare_exact_for_periodic(p1, q1, p2, q2):
    a, b = EventuallyPeriodic(p1, q1, 2), EventuallyPeriodic(p2, q2, 2)
    res = lex_compare(a, b)
    # long enough prefix decides it the same way
    pa, pb = a.prefix(200), b.prefix(200)
    if pa == pb:
        assert res.verdict is Verdict.DECIDED_EQUAL
    else:
        assert res.less == (pa < pb)
        assert res.greater == (pa > pb)


def test_thue_morse_prefix():
    assert format_digits(PMirrorSequence((0,), 1).prefix(16), 1) == oracles.THUE_MORSE_16


def test_pmirror_p2_prefix():
    assert format_digits(PMirrorSequence((1, 0), 1).prefix(16), 1) == oracles.PMIRROR_T10_P2_16


def test_pmirror_blocks_double():
    tm = PMirrorSequence((0,), 1)
    b1, b2 = tm.block(1), tm.block(2)
    assert len(b2) == 2 * len(b1)
    assert b2.digits[: len(b1)] == b1.digits


def test_pmirror_random_access_agrees_with_prefix():
    tm = PMirrorSequence((0,), 1)
    far = tm.digit(100_000)
    assert tm.prefix(100_000)[-1] == far


def test_mconcat_blocks():
    d = sequence("110", 1)
    w = MConcatSequence(d, PeriodicIndices((), (4,)))
    # blocks d_1..d_4 with the last digit lowered: 1100 repeated
    assert w.prefix(12) == (1, 1, 0, 0) * 3


def test_rho_metric():
    beta = RefinableReal.literal(Fraction(3, 2))
    a, b = sequence("10", 1), sequence("1", 1)
    # first difference at index 2, so rho = beta^-1
    assert rho(a, b, beta).interval(40).mid == Fraction(2, 3)
    with pytest.raises(IndistinguishableToHorizon):
        rho(PMirrorSequence((0,), 1), PMirrorSequence((0,), 1), beta, horizon=100)
