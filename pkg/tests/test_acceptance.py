"""The ten acceptance criteria, each at its stated tolerance.

Every test records one pass/fail line; conftest prints them at the end of the
run.  Criterion 9 cannot hold as stated (see the ledger); its test reports
FAIL and is marked as an expected failure.
"""

from __future__ import annotations

import json
import os
import random
import signal
import subprocess
import sys
import time
from fractions import Fraction

import pytest

import oracles
from conftest import ACCEPTANCE
from univoque.dimension import (
    WordSystem,
    binary_tree_sum,
    moran_dimension,
    prefix_count_slope,
    wbeta_dimension_lower,
    ybeta_cover_sum,
)
from univoque.expand import ExpansionDomain, expansion_prefix_counts, project, project_prefix, quasi_greedy
from univoque.membership import Status, in_U, in_U_prime
from univoque.mirror import komornik_loreti, pmirror
from univoque.numerics import Ordering, RefinableReal, compare, vanishes_at
from univoque.symseq import EventuallyPeriodic, PMirrorSequence, format_digits
from univoque.wconstruct import (
    build_M0_critical,
    build_M0_key,
    omega_of_M,
    parse_rate,
    rate_checkpoints,
    subsequence,
    subsequence_for_rate,
)


def record(k: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[k] = (ok, detail)
    print(f"ACCEPTANCE {k}: {'PASS' if ok else 'FAIL'} {detail}")


# 1 ---------------------------------------------------------------------------


def test_criterion_1_thue_morse():
    t0 = time.perf_counter()
    got = format_digits(pmirror((0,), 1).prefix(15), 1)
    dt = time.perf_counter() - t0
    ok = got == oracles.THUE_MORSE_15 and dt < 1
    record(1, ok, f"pmirror(t=0) = {got} in {dt:.3f}s")
    assert ok


# 2 ---------------------------------------------------------------------------


def test_criterion_2_quasi_greedy_golden():
    t0 = time.perf_counter()
    notes = []
    ok = True
    for name, poly, period in (
        ("phi", oracles.PHI_POLY, oracles.D_PHI_PERIOD),
        ("tribonacci", oracles.TRIBONACCI_POLY, oracles.D_TRIBONACCI_PERIOD),
    ):
        beta = RefinableReal.poly_root(poly, Fraction(3, 2), 2)
        dom = ExpansionDomain(1, beta)
        digits = quasi_greedy(1, dom, 200).digits
        want = (period * 200)[:200]
        # route 1: 256-bit evaluation of the periodic sequence
        d = EventuallyPeriodic.periodic(period, 1)
        iv = project_prefix(d, beta.interval(256), 1, 256)
        residual = max(abs(iv.lo - 1), abs(iv.hi - 1))
        # route 2: the closed form of the periodic sum is 1 exactly at the root
        # (sum d_j b^(p-j)) / (b^p - 1) = 1, i.e. b^p - sum d_j b^(p-j) - 1 = 0
        identity = (1,) + tuple(-x for x in period[:-1]) + (-period[-1] - 1,)
        exact = vanishes_at(identity, beta)
        good = digits == want and residual < Fraction(1, 10**30) and exact
        ok = ok and good
        notes.append(f"{name}: 200 digits {'match' if digits == want else 'DIFFER'}, residual<{float(residual):.1e}, identity {exact}")
    dt = time.perf_counter() - t0
    ok = ok and dt < 5
    record(2, ok, "; ".join(notes) + f" ({dt:.2f}s)")
    assert ok


# 3 ---------------------------------------------------------------------------


def test_criterion_3_komornik_loreti():
    t0 = time.perf_counter()
    beta = komornik_loreti(1, tol=Fraction(1, 10**12))
    iv = beta.enclosure
    width_ok = iv.width <= Fraction(1, 10**12)
    # replay at the midpoint of the same enclosure, refined far enough for 64 digits
    mid = beta.interval(2 * (64 + 24)).mid
    replay = quasi_greedy(1, ExpansionDomain(1, RefinableReal.literal(mid)), 64).digits
    tm = PMirrorSequence((0,), 1).prefix(64)
    phi_below = compare(RefinableReal.poly_root(oracles.PHI_POLY, Fraction(3, 2), 2), beta) is Ordering.LESS
    below_two = iv.hi < 2
    prefix_ok = iv.decimal_bounds(10)[0].startswith(oracles.BETA_C_1_DIGITS)
    dt = time.perf_counter() - t0
    ok = width_ok and replay == tm and phi_below and below_two and prefix_ok and dt < 30
    record(
        3,
        ok,
        f"beta_c in [{iv.decimal_bounds(14)[0]}, {iv.decimal_bounds(14)[1]}], width {float(iv.width):.1e}, "
        f"64-digit replay {'matches' if replay == tm else 'DIFFERS'}, phi < beta_c < 2: {phi_below and below_two} ({dt:.2f}s)",
    )
    assert ok


# 4 ---------------------------------------------------------------------------


def _criterion_4_bases():
    def root(poly):
        return ExpansionDomain(1, RefinableReal.poly_root(poly, Fraction(3, 2), 2))

    yield "phi", root(oracles.PHI_POLY)
    yield "tribonacci", root(oracles.TRIBONACCI_POLY)
    # the literal midpoint of the beta_c enclosure: its d agrees with Thue-Morse
    # far beyond the comparison depth but is only streamed to the horizon
    yield "beta_c midpoint", ExpansionDomain(1, RefinableReal.literal(komornik_loreti(1).enclosure.mid))
    yield "x^4-x^3-x^2-x-1", root(oracles.QUARTIC_POLY)
    yield "x^3-2x^2+x-1", root(oracles.CUBIC2_POLY)


def random_eventually_periodic(rng: random.Random, count: int, alpha: int = 1):
    """Distinct sequences with preperiod length 0..4 and period length 1..4, never constant."""
    seen = set()
    out = []
    while len(out) < count:
        pre = tuple(rng.randint(0, alpha) for _ in range(rng.randint(0, 4)))
        per = tuple(rng.randint(0, alpha) for _ in range(rng.randint(1, 4)))
        w = EventuallyPeriodic(pre, per, alpha).canonical()
        key = w.eventually_periodic()
        if key in seen or (not key[0] and len(set(key[1])) == 1):
            continue
        seen.add(key)
        out.append(w)
    return out


def _passes(verdict) -> bool:
    return verdict.is_in or (verdict.status is Status.UNDECIDED and verdict.passes_to_horizon)


def test_criterion_4_oracle_equivalence():
    rng = random.Random(20240501)
    total = disagreements = 0
    notes = []
    for name, dom in _criterion_4_bases():
        d = dom.expansion_of_one()
        jhi = dom.jprime_hi
        members = unique = 0
        for w in random_eventually_periodic(rng, 200):
            x = project(w, dom)
            oracle = expansion_prefix_counts(x, dom, 30, limit=1)
            one_everywhere = not oracle.truncated and all(c == 1 for c in oracle.counts)
            # U is the unique-expansion set cut down to Pi(w) < 1 and Pi(reflect w) < 1
            interior = compare(x, 1) is Ordering.LESS and compare(jhi - x, 1) is Ordering.LESS
            got_u = _passes(in_U(w, d, horizon=500))
            got_up = _passes(in_U_prime(w, d, horizon=500))
            total += 1
            if got_u != (one_everywhere and interior) or got_up != one_everywhere:
                disagreements += 1
            members += got_u
            unique += one_everywhere
        notes.append(f"{name} {members}/{unique}")
    ok = disagreements == 0 and total >= 200
    record(4, ok, f"{total} sequences, {disagreements} disagreements (in U / unique per base: {', '.join(notes)})")
    assert ok


# 5 ---------------------------------------------------------------------------


def _passes_both(omega, d, lookahead=None) -> bool:
    v = in_U(omega, d, horizon=10**4, lookahead=lookahead)
    return v.is_in or v.passes_to_horizon


def test_criterion_5_construction_soundness():
    t0 = time.perf_counter()
    trib = ExpansionDomain(1, RefinableReal.poly_root(oracles.TRIBONACCI_POLY, Fraction(3, 2), 2))
    d_trib = trib.expansion_of_one()
    d_crit = PMirrorSequence((0,), 1)
    cases = [
        ("tribonacci", build_M0_key(d_trib), d_trib, None),
        # skipping early terms puts a block of 4^8 digits right after a short one, so a
        # shift below the horizon can match d for 65535 digits before it is decided
        ("beta_c", build_M0_critical(d_crit, 9), d_crit, 2**17),
    ]
    notes = []
    ok = True
    masks = list(range(1, 128))[:100]
    for name, M0, d, lookahead in cases:
        base_ok = _passes_both(omega_of_M(M0), d, lookahead)
        prefixes = set()
        passing = 0
        for mask in masks:
            chosen = [i + 1 for i in range(7) if mask >> i & 1]
            w = omega_of_M(subsequence(M0, chosen, tail_from=8))
            passing += _passes_both(w, d, lookahead)
            prefixes.add(w.prefix(M0.term(8) + sum(M0.terms(7))))
        good = base_ok and passing == 100 and len(prefixes) == 100
        ok = ok and good
        notes.append(f"{name}: omega(M0) {'passes' if base_ok else 'FAILS'}, {passing}/100 subsequences pass, {len(prefixes)} distinct")
    dt = time.perf_counter() - t0
    ok = ok and dt < 60
    record(5, ok, "; ".join(notes) + f" (n <= 10^4, {dt:.1f}s)")
    assert ok


# 6 ---------------------------------------------------------------------------


def test_criterion_6_rate_construction():
    trib = ExpansionDomain(1, RefinableReal.poly_root(oracles.TRIBONACCI_POLY, Fraction(3, 2), 2))
    d = trib.expansion_of_one()
    rate = parse_rate("theta=2^n")
    M = subsequence_for_rate(build_M0_key(d), rate, trib.beta)
    checks = rate_checkpoints(M, rate, trib, 10)
    bound = trib.jprime_hi.interval(96).hi + Fraction(1, 10**9)
    worst = max(c.value.hi for c in checks)
    ok = len(checks) == 10 and all(c.value.hi <= bound for c in checks)
    record(6, ok, f"10 checkpoints at s = {[c.s for c in checks]}, max value {float(worst):.6f} <= alpha/(beta-1) + 1e-9 = {float(bound):.6f}")
    assert ok


# 7 ---------------------------------------------------------------------------


def _random_system(rng: random.Random) -> tuple[list[tuple[int, ...]], tuple[int, ...]]:
    """A random prefix-free system over {0, 1, 2} and one more word keeping it prefix-free."""
    while True:
        words: list[tuple[int, ...]] = []
        for _ in range(rng.randint(1, 5)):
            w = tuple(rng.randint(0, 2) for _ in range(rng.randint(1, 5)))
            if all(w[: len(u)] != u and u[: len(w)] != w for u in words):
                words.append(w)
        for _ in range(50):
            extra = tuple(rng.randint(0, 2) for _ in range(rng.randint(1, 6)))
            if all(extra[: len(u)] != u and u[: len(extra)] != extra for u in words):
                return words, extra


def test_criterion_7_moran_solver():
    notes = []
    ok = True
    for (alpha, beta), want in oracles.FULL_SHIFT.items():
        V = WordSystem([(a,) for a in range(alpha + 1)], 1 / RefinableReal.literal(beta))
        s = moran_dimension(V, tol=Fraction(1, 10**13)).interval(60)
        err = max(abs(float(s.lo) - want), abs(float(s.hi) - want))
        ok = ok and err < 1e-12
        notes.append(f"full shift ({alpha},{float(beta)}) err {err:.1e}")
    rng = random.Random(7)
    lam = Fraction(1, 3)
    monotone = 0
    for _ in range(50):
        words, extra = _random_system(rng)
        V = WordSystem(words, lam)
        a = moran_dimension(V, tol=Fraction(1, 10**12)).interval(60)
        b = moran_dimension(V.with_word(extra), tol=Fraction(1, 10**12)).interval(60)
        monotone += b.lo > a.hi
    ok = ok and monotone == 50
    trib = RefinableReal.poly_root(oracles.TRIBONACCI_POLY, Fraction(3, 2), 2)
    lower = wbeta_dimension_lower(trib, 1, 10).interval(60)
    ok = ok and lower.lo > 0
    record(7, ok, "; ".join(notes) + f"; adding a word raised s in {monotone}/50 systems; tribonacci K=10 lower bound {float(lower.lo):.4f}")
    assert ok


# 8 ---------------------------------------------------------------------------


def test_criterion_8_binary_tree():
    half = Fraction(1, 2)
    s1 = binary_tree_sum(half, 1).value.exact
    s2 = binary_tree_sum(half, 2).value.exact
    ok = s1 == oracles.S1_HALF and s2 == oracles.S2_HALF
    worst = Fraction(0)
    for g in (Fraction(3, 10), Fraction(1, 2), Fraction(7, 10)):
        S = [binary_tree_sum(g, n).value.interval(80) for n in range(26)]
        for n in range(25):
            rhs = (g + g ** (n + 2)) * S[n].lo
            ok = ok and S[n + 1].hi <= rhs
            worst = max(worst, S[n + 1].hi / rhs)
    s25 = binary_tree_sum(half, 25).value.interval(64)
    ok = ok and s25.hi < Fraction(1, 10**6)
    record(8, ok, f"S1 = {s1}, S2 = {s2}, contraction holds for n <= 24 (max ratio {float(worst):.4f}), S25(1/2) <= {float(s25.hi):.3e}")
    assert ok


# 9 ---------------------------------------------------------------------------


@pytest.mark.xfail(strict=True, reason="cover sums at s = 0.05 and 0.1 grow before decaying; see the ledger")
def test_criterion_9_dimension_zero_evidence(kl_domain):
    pm = kl_domain.expansion_of_one()
    beta = kl_domain.beta
    failing = []
    notes = []
    for s in (Fraction(1, 20), Fraction(1, 10), Fraction(1, 2)):
        v = [ybeta_cover_sum(pm, beta, s, n).interval(60) for n in range(5, 21)]
        decreasing = all(a.lo > b.hi for a, b in zip(v, v[1:]))
        if not decreasing:
            failing.append(str(float(s)))
        notes.append(f"s={float(s)}: {float(v[0].mid):.3g} -> {float(v[-1].mid):.3g}")
    slopes = [prefix_count_slope(None, 1, n, kl_domain) for n in range(10, 41)]
    slope_ok = all(a > b for a, b in zip(slopes, slopes[1:]))
    ok = not failing and slope_ok
    detail = (
        f"cover sums ({'; '.join(notes)}) not monotone for s in {{{', '.join(failing)}}}; "
        if failing
        else f"cover sums decrease ({'; '.join(notes)}); "
    )
    detail += f"prefix-count slope {'decreases' if slope_ok else 'does NOT decrease'} {slopes[0]:.3f} -> {slopes[-1]:.3f}"
    record(9, ok, detail)
    assert ok


# 10 --------------------------------------------------------------------------


SCAN_ARGS = ["scan", "--alpha", "1", "--start", "1.5", "--stop", "1.78", "--steps", "100", "--format", "csv", "--reproducible"]


def _scan(out, *extra, **kw):
    cmd = [sys.executable, "-m", "univoque", *SCAN_ARGS, "--output", str(out), *extra]
    return subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE, **kw)


def _done(ckpt) -> int:
    try:
        with open(ckpt) as fh:
            return json.load(fh)["done"]
    except (OSError, ValueError, KeyError):
        return 0


@pytest.mark.slow
def test_criterion_10_scan_reproducibility(tmp_path):
    full = tmp_path / "full.csv"
    t0 = time.perf_counter()
    proc = _scan(full, "--jobs", "4")
    proc.communicate()
    dt = time.perf_counter() - t0
    rows = full.read_text().splitlines()[1:]
    all_empty = len(rows) == 100 and all(r.split(",")[3] == "Empty" for r in rows)

    part = tmp_path / "part.csv"
    ckpt = str(part) + ".ckpt"
    proc = _scan(part, "--jobs", "1")
    while proc.poll() is None and _done(ckpt) < 30:
        time.sleep(0.05)
    proc.send_signal(signal.SIGKILL)
    proc.communicate()
    killed_at = _done(ckpt)
    interrupted = killed_at < 100
    proc = _scan(part, "--jobs", "4", "--resume")
    proc.communicate()
    identical = part.read_bytes() == full.read_bytes()

    ok = proc.returncode == 0 and all_empty and dt < 120 and interrupted and identical
    record(
        10,
        ok,
        f"100 points all Empty: {all_empty}, --jobs 4 in {dt:.1f}s ({os.cpu_count()} cpu), "
        f"killed after {killed_at} points, resumed output byte-identical: {identical}",
    )
    assert ok
