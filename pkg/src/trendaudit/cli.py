"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 data error, 4 statistical
precondition violated.
"""
from __future__ import annotations

import argparse
import csv
import gzip
import io
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .audit import AuditConfig, audit, parse_series_csv
from .errors import DataError, PreconditionError
from .lexdiv import DEFAULT_SAMPLE, ingest_ngram_counts, ttr_series
from .montecarlo import WalkParams, run_monte_carlo
from .report import FORMATS, dumps_json, render, write_digest_csv
from .series import align, difference
from .stats import pearson
from .unitroot import adf_test

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PRECONDITION = 0, 2, 3, 4

log = logging.getLogger("trendaudit")


def _series_args(p, *names):
    p.add_argument("--time-col", default="time", help="time column name (default: time)")
    p.add_argument("--value-col", default="value", help="value column name (default: value)")
    for name in names:
        p.add_argument(f"--{name}-col", default=None,
                       help=f"value column for --{name}, overrides --value-col")


def _load(path, args, which=None):
    col = (getattr(args, f"{which}_col", None) if which else None) or args.value_col
    # a bare "value" column says nothing; name the series after its file instead
    label = Path(path).stem if col == "value" and path != "-" else col
    source = sys.stdin if path == "-" else path
    series, dropped = parse_series_csv(source, args.time_col, col, label)
    if dropped:
        log.info("%s: dropped %d rows with missing values", path, dropped)
    return series


def _emit(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_corr(args):
    pair = align(_load(args.a, args, "a"), _load(args.b, args, "b"))
    a, b = pair.a, pair.b
    if args.changes:
        a, b = difference(a), difference(b)
    res = pearson(a.values, b.values, "changes" if args.changes else "levels")
    print(f"{res.mode}: r = {res.r:.6f}  n = {res.n}  t = {res.t_stat:.4f}  "
          f"p (two-sided) = {res.p_two_sided:.6g}")
    if pair.dropped_a or pair.dropped_b:
        print(f"alignment dropped {pair.dropped_a} rows of a, {pair.dropped_b} of b")
    return EXIT_OK


def cmd_adf(args):
    s = _load(args.input, args)
    res = adf_test(s, args.lags, args.deterministic)
    cv = res.critical_values
    print(f"ADF {s.label}: statistic = {res.statistic:.4f}  lags = {res.lags}  "
          f"deterministic = {res.deterministic}  n_effective = {res.n_effective}")
    print("critical values: " + "  ".join(f"{k} {v:.4f}" for k, v in cv.items()))
    print(f"approx p = {res.approx_p:.3f}")
    print(f"5% decision: {res.verdict}")
    return EXIT_OK


def cmd_audit(args):
    cfg = AuditConfig(alpha=args.alpha, lags=args.lags, deterministic=args.deterministic,
                      min_overlap=args.min_overlap, walks=args.walks, seed=args.seed,
                      drift_min=args.drift_min, drift_max=args.drift_max, bins=args.bins,
                      threads=args.threads)
    report = audit(_load(args.a, args, "a"), _load(args.b, args, "b"), cfg)
    _emit(render(report, args.format), args.out)
    if args.out not in (None, "-"):
        print(f"{report.verdict.value}: report written to {args.out}", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args):
    target = _load(args.target, args)
    params = WalkParams(length=len(target), drift_min=args.drift_min,
                        drift_max=args.drift_max, start=target.start)
    mc = run_monte_carlo(target, args.walks, params, args.seed, args.threads, args.bins)
    if args.format == "json":
        text = dumps_json(mc.digest())
    else:
        buf = io.StringIO()
        write_digest_csv(buf, mc=mc)
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK


def _open_text(path):
    if path == "-":
        return sys.stdin
    if str(path).endswith(".gz"):
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, encoding="utf-8")


def _chain_lines(paths):
    for path in paths:
        fh = _open_text(path)
        try:
            yield from fh
        finally:
            if fh is not sys.stdin:
                fh.close()


def cmd_ttr(args):
    year_range = tuple(args.year_range) if args.year_range else None
    table = ingest_ngram_counts(_chain_lines(args.ngrams), args.min_count, year_range,
                                strict=args.strict)
    log.info("parsed %d rows (%d malformed, %d out of range, %d entries below min-count)",
             table.rows_parsed, table.rows_malformed, table.rows_out_of_range,
             table.entries_dropped_min)
    _, points = ttr_series(table, args.sample_size, args.min_corpus, args.seed,
                           args.repeats, args.threads)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["year", "ttr", "sampled_types", "corpus_total", "skipped"]
    if args.repeats > 1:
        header += ["ttr_mean", "ttr_sd"]
    w.writerow(header)
    for p in points:
        row = [p.year, "" if p.skipped else f"{p.ttr:.12g}",
               "" if p.skipped else p.sampled_types, p.corpus_total, int(p.skipped)]
        if args.repeats > 1:
            mean = math.fsum(p.ttr_draws) / len(p.ttr_draws) if p.ttr_draws else math.nan
            row += ["" if p.skipped else f"{mean:.12g}",
                    "" if p.skipped else f"{p.ttr_sd:.12g}"]
        w.writerow(row)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="trendaudit",
        description="Check correlations between trending time series for spuriousness.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("corr", help="Pearson correlation of two series")
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)
    c.add_argument("--changes", action="store_true",
                   help="correlate first differences instead of levels")
    _series_args(c, "a", "b")
    c.set_defaults(func=cmd_corr)

    a = sub.add_parser("adf", help="augmented Dickey-Fuller test of one series")
    a.add_argument("--input", required=True)
    a.add_argument("--lags", type=int, default=1)
    a.add_argument("--deterministic", default="constant",
                   choices=["none", "constant", "constant_trend"])
    _series_args(a)
    a.set_defaults(func=cmd_adf)

    au = sub.add_parser("audit", help="full spurious-correlation audit of a pair")
    au.add_argument("--a", required=True)
    au.add_argument("--b", required=True, help="second series, also the Monte Carlo target")
    au.add_argument("--walks", type=int, default=0, help="random walks for the null (0: skip)")
    au.add_argument("--seed", type=int, default=0)
    au.add_argument("--out", default=None, help="output path (default: stdout)")
    au.add_argument("--format", default="json", choices=FORMATS)
    au.add_argument("--alpha", type=float, default=0.05)
    au.add_argument("--lags", type=int, default=1)
    au.add_argument("--deterministic", default="constant",
                    choices=["none", "constant", "constant_trend"])
    au.add_argument("--min-overlap", type=int, default=20)
    au.add_argument("--drift-min", type=float, default=0.02)
    au.add_argument("--drift-max", type=float, default=0.2)
    au.add_argument("--bins", type=int, default=40)
    au.add_argument("--threads", type=int, default=None)
    _series_args(au, "a", "b")
    au.set_defaults(func=cmd_audit)

    s = sub.add_parser("simulate", help="random-walk null distribution against a target")
    s.add_argument("--target", required=True)
    s.add_argument("--walks", type=int, default=10_000)
    s.add_argument("--drift-min", type=float, default=0.02)
    s.add_argument("--drift-max", type=float, default=0.2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--bins", type=int, default=40)
    s.add_argument("--threads", type=int, default=None)
    s.add_argument("--format", default="json", choices=["json", "csv"])
    s.add_argument("--out", default=None)
    _series_args(s)
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("ttr", help="type-token ratios from 1-gram count files")
    t.add_argument("--ngrams", required=True, nargs="+",
                   help="TAB-separated 1-gram files (.gz accepted, - for stdin)")
    t.add_argument("--sample-size", type=int, default=DEFAULT_SAMPLE)
    t.add_argument("--min-corpus", type=int, default=DEFAULT_SAMPLE)
    t.add_argument("--min-count", type=int, default=1)
    t.add_argument("--year-range", type=int, nargs=2, metavar=("FIRST", "LAST"))
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--repeats", type=int, default=1)
    t.add_argument("--threads", type=int, default=None)
    t.add_argument("--strict", action="store_true", help="abort on malformed lines")
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_ttr)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (DataError, OSError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
