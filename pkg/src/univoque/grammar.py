"""Text format for digit sequences.

    alpha=1; seq=(10)^inf
    alpha=1; seq=11(011)^inf
    alpha=2; seq=2(10)^3(1)^inf
    alpha=1; seq=pmirror(t=0,p=1)
    alpha=1; seq=mconcat(d=(110)^inf, m=(2)^inf)
    alpha=12; seq=11,3,(0,12)^inf

Digits are single characters when alpha <= 9 and comma-separated above
that.  Exactly one ``^inf`` repeat is required, and it must come last.
"""

from __future__ import annotations

import re

from .errors import GrammarError
from .symseq import (
    EventuallyPeriodic,
    MConcatSequence,
    PMirrorSequence,
    PeriodicIndices,
    Prefixed,
    Reflected,
    SymbolicSequence,
    format_digits,
)

_HEADER = re.compile(r"^\s*alpha\s*=\s*(\d+)\s*;\s*seq\s*=\s*(.+?)\s*$", re.S)
_CALL = re.compile(r"^(pmirror|mconcat)\s*\((.*)\)$", re.S)


def parse_sequence(text: str) -> SymbolicSequence:
    m = _HEADER.match(text)
    if not m:
        raise GrammarError(f"expected 'alpha=<int>; seq=<body>', got {text!r}")
    alpha = int(m.group(1))
    if alpha < 1:
        raise GrammarError("alpha must be at least 1")
    return parse_body(m.group(2), alpha)


def parse_body(body: str, alpha: int) -> SymbolicSequence:
    body = body.strip()
    call = _CALL.match(body)
    if call:
        name, inner = call.groups()
        args = _split_args(inner)
        if name == "pmirror":
            return _pmirror(args, alpha)
        return _mconcat(args, alpha)
    pre, per = _periodic_parts(body, alpha, int_terms=False)
    return EventuallyPeriodic(pre, per, alpha)


def _split_args(inner: str) -> dict[str, str]:
    """Split ``k1=v1, k2=v2`` at top level, allowing commas inside values."""
    keys = list(re.finditer(r"(?:^|,)\s*([a-z]+)\s*=", inner))
    out = {}
    depth = 0
    # keep only key matches at parenthesis depth zero
    top = []
    pos = 0
    for km in keys:
        depth += inner[pos : km.start()].count("(") - inner[pos : km.start()].count(")")
        pos = km.start()
        if depth == 0:
            top.append(km)
    for i, km in enumerate(top):
        end = top[i + 1].start() if i + 1 < len(top) else len(inner)
        key = km.group(1)
        if key in out:
            raise GrammarError(f"duplicate argument {key!r}")
        out[key] = inner[km.end() : end].strip()
    if not top or inner[: top[0].start()].strip():
        raise GrammarError(f"malformed argument list {inner!r}")
    return out


def _pmirror(args, alpha):
    if set(args) != {"t", "p"}:
        raise GrammarError("pmirror needs exactly the arguments t and p")
    t = _digits(args["t"], alpha)
    try:
        p = int(args["p"])
    except ValueError:
        raise GrammarError(f"p must be an integer, got {args['p']!r}") from None
    if p != len(t):
        raise GrammarError(f"p={p} does not match generator length {len(t)}")
    try:
        return PMirrorSequence(t, alpha)
    except ValueError as e:
        raise GrammarError(str(e)) from None


def _mconcat(args, alpha):
    if set(args) != {"d", "m"}:
        raise GrammarError("mconcat needs exactly the arguments d and m")
    d = parse_body(args["d"], alpha)
    pre, per = _periodic_parts(args["m"], alpha, int_terms=True)
    try:
        m = PeriodicIndices(pre, per)
    except ValueError as e:
        raise GrammarError(str(e)) from None
    return MConcatSequence(d, m)


_TOKEN = re.compile(r"\s*(?:(\()|(\))|(\^)|(inf)|(\d+)|(,))")


def _tokens(text: str):
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise GrammarError(f"unexpected character at {pos} in {text!r}")
        pos = m.end()
        kind = m.lastindex
        yield ("(", ")", "^", "inf", "num", ",")[kind - 1], m.group(kind)


def _atoms(tok: str, alpha: int, int_terms: bool) -> list[int]:
    if int_terms or alpha > 9:
        value = int(tok)
        if not int_terms and value > alpha:
            raise GrammarError(f"digit {value} exceeds alpha={alpha}")
        return [value]
    out = [int(c) for c in tok]
    for a in out:
        if a > alpha:
            raise GrammarError(f"digit {a} exceeds alpha={alpha}")
    return out


def _periodic_parts(text: str, alpha: int, int_terms: bool):
    toks = list(_tokens(text))
    pre: list[int] = []
    period = None
    i = 0
    while i < len(toks):
        kind, val = toks[i]
        if period is not None:
            raise GrammarError("nothing may follow an infinite repeat")
        if kind == "num":
            pre.extend(_atoms(val, alpha, int_terms))
            i += 1
        elif kind == ",":
            i += 1
        elif kind == "(":
            j = i + 1
            group: list[int] = []
            while j < len(toks) and toks[j][0] != ")":
                k2, v2 = toks[j]
                if k2 == "num":
                    group.extend(_atoms(v2, alpha, int_terms))
                elif k2 != ",":
                    raise GrammarError(f"unexpected {v2!r} inside a group")
                j += 1
            if j >= len(toks):
                raise GrammarError("unbalanced parenthesis")
            if not group:
                raise GrammarError("empty group")
            if j + 2 >= len(toks) + 1 or j + 1 >= len(toks) or toks[j + 1][0] != "^":
                raise GrammarError("a group must be followed by ^inf or ^<count>")
            if j + 2 >= len(toks):
                raise GrammarError("missing repeat count")
            k3, v3 = toks[j + 2]
            if k3 == "inf":
                period = tuple(group)
            elif k3 == "num":
                pre.extend(group * int(v3))
            else:
                raise GrammarError(f"bad repeat count {v3!r}")
            i = j + 3
        else:
            raise GrammarError(f"unexpected {val!r}")
    if period is None:
        raise GrammarError("sequence needs a final (w)^inf repeat")
    return tuple(pre), period


def _digits(text: str, alpha: int) -> tuple[int, ...]:
    out: list[int] = []
    for kind, val in _tokens(text):
        if kind == "num":
            out.extend(_atoms(val, alpha, False))
        elif kind != ",":
            raise GrammarError(f"unexpected {val!r} in a word")
    if not out:
        raise GrammarError("empty word")
    return tuple(out)


def _fmt(digits, alpha) -> str:
    return format_digits(digits, alpha)


def format_body(seq: SymbolicSequence) -> str:
    a = seq.alpha
    sep = "," if a > 9 else ""
    if isinstance(seq, PMirrorSequence):
        return f"pmirror(t={_fmt(seq.generator, a)},p={seq.p})"
    if isinstance(seq, MConcatSequence) and isinstance(seq.m, PeriodicIndices):
        m = seq.m
        head = ",".join(str(x) for x in m.preperiod)
        tail = "(" + ",".join(str(x) for x in m.period) + ")^inf"
        mtext = f"{head},{tail}" if head else tail
        return f"mconcat(d={format_body(seq.d)}, m={mtext})"
    ep = seq.eventually_periodic()
    if ep is not None:
        pre, per = ep
        head = _fmt(pre, a)
        return f"{head}{sep if head else ''}({_fmt(per, a)})^inf"
    raise GrammarError(f"{seq.describe()} has no finite text form")


def format_sequence(seq: SymbolicSequence) -> str:
    return f"alpha={seq.alpha}; seq={format_body(seq)}"


def format_prefix(seq: SymbolicSequence, n: int) -> str:
    """Truncated export: the first ``n`` digits followed by ``...``."""
    return f"alpha={seq.alpha}; seq={_fmt(seq.prefix(n), seq.alpha)}..."
