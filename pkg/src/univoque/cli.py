"""Command-line interface.

    univoque expand --alpha 1 --beta poly:x^2-x-1 --x 1 --digits 12
    univoque scan --alpha 1 --start 1.5 --stop 1.78 --steps 100 --format csv --output scan.csv --jobs 4

Every real number in the output is an enclosure [lo, hi] of decimal strings.
Exit codes: 0 success, 2 usage, 3 precision, 4 hypothesis failed, 5 internal.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import io
import json
import os
import sys
import time
from fractions import Fraction

from . import __version__
from .errors import (
    CrossCheckFailed,
    GrammarError,
    HypothesisFailed,
    NotDPositive,
    PrecisionExhausted,
    PrefixFreenessViolated,
    RateTooSlow,
    UnivoqueError,
)
from .expand import ExpansionDomain, count_expansion_prefixes, expansion_prefix_counts, project, quasi_greedy
from .grammar import format_body, format_prefix, parse_sequence
from .numerics import Interval, PrecisionContext, RefinableReal, find_poly_root
from .symseq import EventuallyPeriodic, format_digits

EXIT_OK, EXIT_USAGE, EXIT_PRECISION, EXIT_HYPOTHESIS, EXIT_INTERNAL = 0, 2, 3, 4, 5
CSV_COLUMNS = ["alpha", "beta_lo", "beta_hi", "w_status", "limsup_status", "dim_lower", "horizon"]
DIGITS = 25


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# input parsing


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a decimal or rational number: {text!r}") from None


def parse_polynomial(text: str) -> list[int]:
    """Integer coefficients (leading first) of a polynomial in x written like x^3-x^2-x-1."""
    import sympy

    x = sympy.Symbol("x")
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals={"x": x})
        poly = sympy.Poly(expr, x)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError, SyntaxError):
        raise UsageError(f"cannot read polynomial {text!r}") from None
    coeffs = poly.all_coeffs()
    if not all(c.is_integer for c in coeffs) or poly.degree() < 1:
        raise UsageError("the polynomial must have integer coefficients and positive degree")
    return [int(c) for c in coeffs]


def parse_beta(text: str, alpha: int, ctx: PrecisionContext, tol=Fraction(1, 10**12)) -> ExpansionDomain:
    """Decimal literal, ``poly:<p(x)>[@lo,hi]`` or ``dvk:<generator word>``."""
    text = text.strip()
    if text.startswith("poly:"):
        body = text[5:]
        lo, hi = Fraction(1), Fraction(alpha + 1)
        if "@" in body:
            body, window = body.split("@", 1)
            try:
                lo, hi = (parse_fraction(v) for v in window.split(","))
            except ValueError:
                raise UsageError("bracket must read @lo,hi") from None
        coeffs = parse_polynomial(body)
        try:
            beta = find_poly_root(coeffs, lo, hi, label=text)
        except UnivoqueError as e:
            raise UsageError(f"no root of {body} in ({lo}, {hi}): {e}") from None
        return _domain(alpha, beta, ctx)
    if text.startswith("dvk:"):
        from .mirror import dvk_domain

        try:
            return dvk_domain(text[4:], alpha, tol, ctx)
        except (ValueError, GrammarError) as e:
            raise UsageError(str(e)) from None
    return _domain(alpha, RefinableReal.literal(parse_fraction(text), label=text), ctx)


def _domain(alpha, beta, ctx):
    try:
        return ExpansionDomain(alpha, beta, ctx)
    except ValueError as e:
        raise UsageError(str(e)) from None


def enclosure(x, bits: int = 96) -> list[str]:
    iv = x if isinstance(x, Interval) else x.interval(bits)
    return list(iv.decimal_bounds(DIGITS))


# ---------------------------------------------------------------------------
# output


def _record(args, **fields) -> dict:
    rec = {"command": args.command, "version": __version__}
    rec.update(fields)
    rec["precision"] = {"bits": args.bits, "max_bits": args.max_bits}
    if not args.reproducible:
        rec["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
    return rec


def _emit(args, records) -> None:
    out = open(args.output, "w") if getattr(args, "output", None) else sys.stdout
    try:
        for rec in records if isinstance(records, list) else [records]:
            out.write(json.dumps(rec) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def _emit_csv(args, header, rows) -> None:
    out = open(args.output, "w", newline="") if getattr(args, "output", None) else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if out is not sys.stdout:
            out.close()


# ---------------------------------------------------------------------------
# commands


def cmd_expand(args, ctx) -> int:
    domain = parse_beta(args.beta, args.alpha, ctx, args.tol)
    x = parse_fraction(args.x)
    word = quasi_greedy(x, domain, args.digits, ctx)
    bits = max(args.bits, 2 * args.digits + 64)
    b = domain.beta.interval(bits)
    partial = Interval(0)
    for a in reversed(word.digits):
        partial = (partial + a) / b
    residual = Interval(x) - partial
    _emit(
        args,
        _record(
            args,
            input={"alpha": args.alpha, "beta": args.beta, "x": args.x, "digits": args.digits},
            beta_enclosure=enclosure(domain.beta),
            digits=format_digits(word.digits, args.alpha),
            residual=enclosure(residual),
        ),
    )
    return EXIT_OK


def cmd_dmap(args, ctx) -> int:
    domain = parse_beta(args.beta, args.alpha, ctx, args.tol)
    d = domain.expansion_of_one()
    periodic = d.eventually_periodic() is not None
    text = format_body(d) if periodic else format_prefix(d, args.digits).split("seq=", 1)[1]
    _emit(
        args,
        _record(
            args,
            input={"alpha": args.alpha, "beta": args.beta},
            beta_enclosure=enclosure(domain.beta),
            d=text,
            eventually_periodic=periodic,
            digits=format_digits(d.prefix(args.digits), args.alpha),
        ),
    )
    return EXIT_OK


def cmd_check(args, ctx) -> int:
    from .membership import classify_base, in_U, in_U_prime, is_strongly_univoque

    domain = parse_beta(args.beta, args.alpha, ctx, args.tol)
    if args.seq is None:
        c = classify_base(domain.beta, args.alpha, args.horizon, ctx, domain=domain)
        _emit(args, _record(args, input={"alpha": args.alpha, "beta": args.beta}, classification=c.to_record()))
        return EXIT_OK
    try:
        omega = parse_sequence(args.seq if args.seq.startswith("alpha") else f"alpha={args.alpha}; seq={args.seq}")
    except GrammarError as e:
        raise UsageError(str(e)) from None
    d = domain.expansion_of_one()
    test = {"U": in_U, "U'": in_U_prime, "strong": is_strongly_univoque}[args.set]
    v = test(omega, d, args.horizon)
    rec = {
        "status": v.status.value,
        "witness": v.witness,
        "condition": v.condition,
        "exact": v.exact,
        "passes_to_horizon": v.passes_to_horizon,
        "evidence": v.evidence,
    }
    _emit(args, _record(args, input={"alpha": args.alpha, "beta": args.beta, "seq": args.seq, "set": args.set}, horizon=args.horizon, verdict=rec))
    return EXIT_OK


def cmd_construct(args, ctx) -> int:
    from .membership import classify_base, in_U
    from . import wconstruct as wc

    domain = parse_beta(args.beta, args.alpha, ctx, args.tol)
    c = classify_base(domain.beta, args.alpha, args.horizon, ctx, domain=domain, with_dimension=False)
    if c.w_status.kind == "Empty" and not args.force:
        raise HypothesisFailed(f"W is empty at this base (witness n={c.w_status.witness})", witness=c.w_status.witness)
    d = domain.expansion_of_one()
    mode = args.mode
    if mode == "auto":
        mode = "critical" if c.limsup_status.kind == "EqualsD" else "key"
    if mode == "key":
        M = wc.build_M0_key(d, args.horizon)
    else:
        M = wc.build_M0_critical(d, args.terms)
    out = {"classification": c.to_record(), "mode": mode}
    if args.rate:
        rate = wc.parse_rate(args.rate)
        M = wc.subsequence_for_rate(M, rate, domain.beta)
        points = wc.rate_checkpoints(M, rate, domain, args.checkpoints)
        out["checkpoints"] = [
            {"j": p.j, "s": p.s, "value": list(p.value.decimal_bounds(15)), "bound": list(p.bound.decimal_bounds(15)), "ok": p.ok}
            for p in points
        ]
    M.term(args.terms)
    omega = wc.omega_of_M(M)
    out["M"] = M.to_json(args.terms)
    out["M"]["info"] = {k: v for k, v in M.info.items() if isinstance(v, (int, str, bool))}
    out["omega"] = format_prefix(omega, args.digits)
    v = in_U(omega, d, args.horizon)
    out["verification"] = {"status": v.status.value, "passes_to_horizon": v.passes_to_horizon, "witness": v.witness, "horizon": args.horizon}
    _emit(args, _record(args, input={"alpha": args.alpha, "beta": args.beta, "terms": args.terms}, **out))
    if v.is_out:
        return EXIT_INTERNAL
    return EXIT_OK


def cmd_mirror(args, ctx) -> int:
    from .mirror import dvk_number, is_admissible, pmirror

    from .symseq import Word

    try:
        t = Word.parse(args.t, args.alpha).digits
    except (ValueError, GrammarError) as e:
        raise UsageError(str(e)) from None
    verdict = is_admissible(t, args.alpha)
    if not verdict:
        raise HypothesisFailed(f"generator is not admissible (i={verdict.index}, family {verdict.family}): {verdict.detail}", witness=verdict.index)
    d = pmirror(t, args.alpha)
    rec = {"generator": format_digits(t, args.alpha), "p": len(t), "digits": format_digits(d.prefix(args.digits), args.alpha), "beta_enclosure": None}
    if args.solve_base:
        rec["beta_enclosure"] = enclosure(dvk_number(t, args.alpha, args.tol, ctx))
    _emit(args, _record(args, **rec))
    return EXIT_OK


def cmd_kl(args, ctx) -> int:
    from .mirror import komornik_loreti

    beta = komornik_loreti(args.alpha, args.tol, ctx)
    _emit(args, _record(args, alpha=args.alpha, generator=str(args.alpha // 2), beta_enclosure=enclosure(beta)))
    return EXIT_OK


def cmd_dimension(args, ctx) -> int:
    from . import dimension as dm

    kind = args.kind
    if kind == "tree":
        gamma = parse_fraction(args.gamma)
        rows = [(n, *enclosure(dm.binary_tree_sum(gamma, n).value)) for n in range(1, args.levels + 1)]
        _emit_csv(args, ["n", "S_lo", "S_hi"], rows)
    elif kind == "cover":
        from .mirror import dvk_domain

        domain = dvk_domain(args.t, args.alpha, args.tol, ctx)
        pm = domain.expansion_of_one()
        s = parse_fraction(args.s)
        rows = [(n, *enclosure(dm.ybeta_cover_sum(pm, domain.beta, s, n))) for n in range(1, args.levels + 1)]
        _emit_csv(args, ["n", "cover_sum_lo", "cover_sum_hi"], rows)
    elif kind in ("lower", "count") and args.beta is None:
        raise UsageError(f"{kind} needs --beta")
    elif kind == "lower":
        domain = parse_beta(args.beta, args.alpha, ctx, args.tol)
        series = dm.wbeta_dimension_series(domain, range(1, args.K + 1))
        _emit_csv(args, ["K", "lower_bound_lo", "lower_bound_hi"], [(K, *enclosure(v)) for K, v in series])
    elif kind == "count":
        domain = parse_beta(args.beta, args.alpha, ctx, args.tol)
        rows = []
        for n in range(1, args.levels + 1):
            cnt = dm.prefix_count_estimate(None, args.alpha, n, domain)
            rows.append((n, cnt, f"{dm.prefix_count_slope(None, args.alpha, n, domain):.6f}"))
        _emit_csv(args, ["n", "count_upper_bound", "slope_upper_estimate"], rows)
    else:  # moran
        from .symseq import Word

        if not args.words:
            raise UsageError("moran needs --words")
        words = [Word.parse(w, args.alpha).digits for w in args.words.split(",")]
        if args.lam is not None:
            lam = RefinableReal.literal(parse_fraction(args.lam))
        elif args.beta is not None:
            lam = 1 / parse_beta(args.beta, args.alpha, ctx, args.tol).beta
        else:
            raise UsageError("moran needs --lam or --beta")
        try:
            system = dm.WordSystem(words, lam)
        except (PrefixFreenessViolated, ValueError) as e:
            raise UsageError(str(e)) from None
        s = dm.moran_dimension(system, args.tol)
        _emit(args, _record(args, words=args.words, dimension=enclosure(s)))
    return EXIT_OK


def cmd_oracle(args, ctx) -> int:
    domain = parse_beta(args.beta, args.alpha, ctx, args.tol)
    if args.seq:
        omega = parse_sequence(f"alpha={args.alpha}; seq={args.seq}")
        x = project(omega, domain)
    else:
        x = RefinableReal.literal(parse_fraction(args.x))
    res = expansion_prefix_counts(x, domain, args.depth, ctx)
    _emit(
        args,
        _record(
            args,
            input={"alpha": args.alpha, "beta": args.beta, "x": args.x, "seq": args.seq, "depth": args.depth},
            x_enclosure=enclosure(x),
            counts=res.counts,
            truncated=res.truncated,
            unique=res.final == 1,
        ),
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# scan


def scan_grid(start: Fraction, stop: Fraction, steps: int) -> list[Fraction]:
    """``steps`` equally spaced interior points of (start, stop)."""
    return [start + (stop - start) * (i + 1) / (steps + 1) for i in range(steps)]


def scan_point(job: tuple) -> dict:
    """Classify one grid point; errors become part of the row."""
    alpha, beta_text, horizon, bits, max_bits, with_dimension = job
    from .membership import classify_base

    ctx = PrecisionContext(working_bits=bits, max_bits=max_bits)
    try:
        domain = parse_beta(beta_text, alpha, ctx)
        c = classify_base(domain.beta, alpha, horizon, ctx, domain=domain, with_dimension=with_dimension)
        rec = c.to_record(DIGITS)
    except (UnivoqueError, UsageError, ValueError) as e:
        rec = {"alpha": alpha, "beta_enclosure": [beta_text, beta_text], "error": f"{type(e).__name__}: {e}", "horizon": horizon}
    rec["beta_input"] = beta_text
    return rec


def _csv_row(rec: dict) -> list:
    if "error" in rec:
        return [rec["alpha"], *rec["beta_enclosure"], "Error", rec["error"], "", rec["horizon"]]
    dim = rec["dim_hint"]
    if dim["kind"] == "PositiveLowerBound":
        dim_lower = dim["value"][0]
    elif dim["kind"] == "ZeroByPMirror":
        dim_lower = "0"
    else:
        dim_lower = ""
    return [rec["alpha"], *rec["beta_enclosure"], rec["w_status"]["kind"], rec["limsup_status"]["kind"], dim_lower, rec["horizon"]]


def _format_row(rec: dict, fmt: str, reproducible: bool) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerow(_csv_row(rec))
        return buf.getvalue()
    if not reproducible:
        rec = dict(rec, timestamp=time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()))
    return json.dumps(rec) + "\n"


def _write_checkpoint(path: str, state: dict) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(state, fh)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def cmd_scan(args, ctx) -> int:
    if args.poly:
        betas = [f"poly:{p}" for p in args.poly]
    else:
        if args.start is None or args.stop is None:
            raise UsageError("scan needs --start and --stop, or --poly")
        start, stop = parse_fraction(args.start), parse_fraction(args.stop)
        if not (1 < start < stop < args.alpha + 1):
            raise UsageError("the grid must satisfy 1 < start < stop < alpha + 1")
        if args.steps < 0:
            raise UsageError("steps must be nonnegative")
        betas = [str(b) if b.denominator == 1 else f"{b.numerator}/{b.denominator}" for b in scan_grid(start, stop, args.steps)]
    config = {
        "alpha": args.alpha,
        "betas": len(betas),
        "first": betas[0] if betas else None,
        "last": betas[-1] if betas else None,
        "horizon": args.horizon,
        "format": args.format,
        "bits": args.bits,
    }
    jobs = [(args.alpha, b, args.horizon, args.bits, args.max_bits, not args.no_dimension) for b in betas]
    if not args.output:
        if args.format == "csv":
            sys.stdout.write(",".join(CSV_COLUMNS) + "\n")
        for job in jobs:
            sys.stdout.write(_format_row(scan_point(job), args.format, args.reproducible))
        return EXIT_OK

    ckpt = args.checkpoint or args.output + ".ckpt"
    done, offset = 0, 0
    if args.resume and os.path.exists(ckpt) and os.path.exists(args.output):
        with open(ckpt) as fh:
            state = json.load(fh)
        if state.get("config") != config:
            raise UsageError("checkpoint belongs to a different scan configuration")
        done, offset = state["done"], state["offset"]
    mode = "r+b" if done or offset else "wb"
    with open(args.output, mode) as out:
        out.truncate(offset)
        out.seek(offset)
        if offset == 0 and args.format == "csv":
            out.write((",".join(CSV_COLUMNS) + "\n").encode())
            offset = out.tell()
        out.flush()
        _write_checkpoint(ckpt, {"config": config, "done": done, "offset": offset})
        remaining = jobs[done:]
        if args.limit is not None:
            remaining = remaining[: args.limit]
        if args.jobs > 1 and len(remaining) > 1:
            pool = concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs)
            results = pool.map(scan_point, remaining, chunksize=1)
        else:
            pool = None
            results = map(scan_point, remaining)
        try:
            for rec in results:
                out.write(_format_row(rec, args.format, args.reproducible).encode())
                out.flush()
                os.fsync(out.fileno())
                done += 1
                _write_checkpoint(ckpt, {"config": config, "done": done, "offset": out.tell()})
        finally:
            if pool is not None:
                pool.shutdown(cancel_futures=True)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bits", type=int, default=None, help="working precision in bits")
    common.add_argument("--max-bits", type=int, default=None, help="precision ceiling (also UNIVOQUE_MAX_BITS)")
    common.add_argument("--reproducible", action="store_true", help="omit timestamps")
    common.add_argument("--output", "-o", default=None)
    common.add_argument("--tol", type=Fraction, default=Fraction(1, 10**12), help="enclosure width for solved bases")

    def base_args(p, beta_required=True):
        if beta_required:
            p.add_argument("--alpha", type=int, required=True)
        else:
            p.add_argument("--alpha", type=int, default=1)
        p.add_argument("--beta", required=beta_required, help="decimal, poly:<p(x)>[@lo,hi] or dvk:<word>")

    parser = argparse.ArgumentParser(prog="univoque", description="beta-expansions, univoque sets and their dimension")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", parents=[common], help="quasi-greedy digits of x")
    base_args(p)
    p.add_argument("--x", default="1")
    p.add_argument("--digits", type=int, default=32)

    p = sub.add_parser("dmap", parents=[common], help="the quasi-greedy expansion of 1")
    base_args(p)
    p.add_argument("--digits", type=int, default=64)

    p = sub.add_parser("check", parents=[common], help="membership of a sequence, or classification of the base")
    base_args(p)
    p.add_argument("--seq", default=None, help="sequence in the text grammar; omit to classify the base")
    p.add_argument("--set", choices=["U", "U'", "strong"], default="U")
    p.add_argument("--horizon", type=int, default=10_000)

    p = sub.add_parser("construct", parents=[common], help="explicit members of W")
    base_args(p)
    p.add_argument("--terms", type=int, default=10)
    p.add_argument("--mode", choices=["auto", "key", "critical"], default="auto")
    p.add_argument("--rate", default=None, help='e.g. "theta=2^n"')
    p.add_argument("--checkpoints", type=int, default=10)
    p.add_argument("--digits", type=int, default=80)
    p.add_argument("--horizon", type=int, default=2000)
    p.add_argument("--force", action="store_true", help="construct even when W is classified empty")

    p = sub.add_parser("mirror", parents=[common], help="p-mirror sequences")
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--t", required=True, help="generating word")
    p.add_argument("--digits", type=int, default=64)
    p.add_argument("--solve-base", action="store_true")

    p = sub.add_parser("kl", parents=[common], help="the Komornik-Loreti constant")
    p.add_argument("--alpha", type=int, required=True)

    p = sub.add_parser("dimension", parents=[common], help="dimension series as CSV")
    p.add_argument("kind", choices=["tree", "cover", "lower", "count", "moran"])
    base_args(p, beta_required=False)
    p.add_argument("--gamma", default="1/2")
    p.add_argument("--t", default="0", help="p-mirror generator for cover sums")
    p.add_argument("--s", default="1/10")
    p.add_argument("--levels", type=int, default=20)
    p.add_argument("--K", type=int, default=10)
    p.add_argument("--words", default=None, help="comma-separated words for moran")
    p.add_argument("--lam", default=None, help="contraction ratio for moran (default 1/beta)")

    p = sub.add_parser("scan", parents=[common], help="classify a grid of bases")
    p.add_argument("--alpha", type=int, required=True)
    p.add_argument("--start", default=None)
    p.add_argument("--stop", default=None)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--poly", action="append", default=None, help="polynomial base spec, repeatable")
    p.add_argument("--horizon", type=int, default=2000)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--limit", type=int, default=None, help="stop after this many new points")
    p.add_argument("--no-dimension", action="store_true")

    p = sub.add_parser("oracle", parents=[common], help="count expansions by branch and bound")
    base_args(p)
    p.add_argument("--x", default="1")
    p.add_argument("--seq", default=None)
    p.add_argument("--depth", type=int, default=30)
    return parser


COMMANDS = {
    "expand": cmd_expand,
    "dmap": cmd_dmap,
    "check": cmd_check,
    "construct": cmd_construct,
    "mirror": cmd_mirror,
    "kl": cmd_kl,
    "dimension": cmd_dimension,
    "scan": cmd_scan,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        env = PrecisionContext.from_env(args.bits, args.max_bits)
    except ValueError as e:
        parser.error(str(e))
    args.bits, args.max_bits = env.working_bits, env.max_bits
    try:
        return COMMANDS[args.command](args, env)
    except (UsageError, GrammarError) as e:
        parser.print_usage(sys.stderr)
        print(f"univoque {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionExhausted as e:
        print(f"precision exhausted: {e}", file=sys.stderr)
        return EXIT_PRECISION
    except (HypothesisFailed, NotDPositive, RateTooSlow) as e:
        print(f"hypothesis failed: {e}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (UnivoqueError, CrossCheckFailed) as e:
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
