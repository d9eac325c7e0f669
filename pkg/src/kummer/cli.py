"""Command line interface: ``kummer <verb> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import bounds_lab, kummer_core
from .campaign import champions as champions_mod
from .campaign import histogram as hist_mod
from .campaign import scan as scan_mod
from .campaign import verify as verify_mod
from .campaign.records import ScanFormatError
from .dft_engine import PlanResourceError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _cmd_compute(args) -> int:
    kwargs = {}
    if args.method == "fft":
        kwargs = {"engine": args.engine, "max_bytes": args.max_bytes}
    res = kummer_core.kummer_r(args.q, args.method, **kwargs)
    print(f"q        {res.q}")
    print(f"g        {res.g}")
    print(f"method   {res.method}")
    print(f"r(q)     {res.r!r}")
    print(f"R(q)     {res.big_r!r}")
    print(f"log10 h1 {res.log10_h1:.12f}")
    print(f"h1 ~     {res.h1_leading_digits(12)}")
    acc = res.fft_accuracy
    if acc is not None and acc.measured_e2 is not None:
        print(f"E2/|x|2  {acc.measured_e2_rel:.3e}  (bound {acc.delta * (2 + acc.delta):.3e})")
        print(f"Einf     {acc.measured_einf:.3e}  (bound {acc.predicted_einf:.3e})")
    return EXIT_OK


def _print_ledgers(hi, lo) -> None:
    print(f"max champions (from q={hi.start_q}):")
    for q, r in hi.entries:
        print(f"  {q:>10d}  {r:.15g}")
    print(f"min champions (from q={lo.start_q}):")
    for q, r in lo.entries:
        print(f"  {q:>10d}  {r:.15g}")


def _cmd_scan(args) -> int:
    def progress(q):
        logging.getLogger("kummer.scan").info("reached q=%d", q)

    res = scan_mod.scan(
        args.max,
        args.out,
        resume=args.resume,
        workers=args.workers,
        engine=args.engine,
        max_bytes=args.max_bytes,
        min_start_q=args.min_start,
        progress=progress,
    )
    print(f"{res.path}: {res.rows_total} rows ({res.rows_written} new), last q={res.last_q}")
    return EXIT_OK


def _cmd_champions(args) -> int:
    hi, lo = champions_mod.champions(args.csv, min_start_q=args.min_start, max_start_q=args.max_start)
    _print_ledgers(hi, lo)
    return EXIT_OK


def _cmd_hist(args) -> int:
    spec = hist_mod.HistogramSpec(args.bins, args.lo, args.hi, args.filter, not args.no_overlay)
    out = Path(args.out)
    data = Path(args.data) if args.data else out.with_name(out.stem + ".bins.csv")
    try:
        res = hist_mod.histogram(args.csv, spec, svg_path=out, data_path=data)
    except hist_mod.EmptySelectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"filter {spec.filter}: n={res.n} mu={res.mu:.6f} sigma={res.sigma:.6f} "
          f"outside={res.n_outside} peak at {res.peak_center():.4f}")
    print(f"wrote {out} and {data}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    try:
        report = verify_mod.verify_table(args.csv, args.reference, digits=args.digits)
    except verify_mod.MissingRowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    for q, value, ref in report.failures:
        print(f"FAIL q={q}: computed {value:.15g}, reference {ref}")
    print(report.summary())
    return EXIT_OK if report.ok else EXIT_FAIL


def _cmd_bounds(args) -> int:
    k, c1 = bounds_lab.minimize_c1(args.c1_limit)
    print(f"C1 = c1({k}) = {c1:.12f}   (odd k <= {args.c1_limit})")
    print(f"lemma constant, m <= 2 isolated:  {bounds_lab.lemma_limit_constant(2):.10f}")
    print(f"lemma constant, m <= {args.m0} isolated: {bounds_lab.lemma_limit_constant(args.m0):.10f}")
    print(f"direct sum, T={args.lemma_T}, q -> inf: {bounds_lab.lemma_direct_sum(None, args.lemma_T):.10f}")
    return EXIT_OK


def _cmd_maillet(args) -> int:
    h1 = kummer_core.maillet_h1(args.q)
    print(f"h1({args.q}) = {h1}")
    rep = kummer_core.classical_h1_bounds_check(args.q, h1)
    carlitz = "n/a" if rep.carlitz is None else rep.carlitz
    print(f"Carlitz {carlitz}  Metsankyla {rep.metsankyla}  Feng {rep.feng}")
    return EXIT_OK


def _cmd_budget(args) -> int:
    rep = bounds_lab.fft_error_budget(args.q, bounds_lab.EPSILONS[args.eps])
    print(f"q={args.q} N={rep.n} eps=2^-{args.eps}")
    print(f"||x||_2          {rep.l2_input_norm:.10f}")
    print(f"Delta            {rep.delta:.6e}")
    print(f"Delta(2+Delta)   {rep.delta * (2 + rep.delta):.6e}")
    print(f"max-error bound  {rep.predicted_forward_sup:.6e}")
    print(f"E2 bound         {rep.predicted_e2:.6e}")
    print(f"Einf bound       {rep.predicted_einf:.6e}")
    return EXIT_OK


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kummer", description="Kummer ratio R(q) = h1(q)/G(q) for prime q")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)

    c = sub.add_parser("compute", help="r(q) and R(q) for one prime")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--method", choices=("fft", "direct", "digamma"), default="fft")
    c.add_argument("--engine", choices=("native", "pocketfft"), default="native")
    c.add_argument("--max-bytes", type=int, default=None, help="memory ceiling for the transform plan")
    c.set_defaults(func=_cmd_compute)

    s = sub.add_parser("scan", help="CSV row per odd prime up to --max")
    s.add_argument("--max", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--resume", action="store_true")
    s.add_argument("--workers", type=_positive, default=1)
    s.add_argument("--engine", choices=("native", "pocketfft"), default=scan_mod.DEFAULT_ENGINE)
    s.add_argument("--max-bytes", type=int, default=None)
    s.add_argument("--min-start", type=int, default=champions_mod.DEFAULT_MIN_START_Q)
    s.set_defaults(func=_cmd_scan)

    ch = sub.add_parser("champions", help="record maxima and minima from a scan CSV")
    ch.add_argument("--csv", required=True)
    ch.add_argument("--min-start", type=int, default=champions_mod.DEFAULT_MIN_START_Q)
    ch.add_argument("--max-start", type=int, default=champions_mod.DEFAULT_MAX_START_Q)
    ch.set_defaults(func=_cmd_champions)

    h = sub.add_parser("hist", help="histogram of r(q) with normal overlay, as SVG")
    h.add_argument("--csv", required=True)
    h.add_argument("--bins", type=_positive, default=hist_mod.DEFAULT_BINS)
    h.add_argument("--filter", default="all", help=", ".join(hist_mod.FILTERS))
    h.add_argument("--out", required=True)
    h.add_argument("--data", default=None, help="bins file (default: <out>.bins.csv)")
    h.add_argument("--lo", type=float, default=hist_mod.DEFAULT_RANGE[0])
    h.add_argument("--hi", type=float, default=hist_mod.DEFAULT_RANGE[1])
    h.add_argument("--no-overlay", action="store_true")
    h.set_defaults(func=_cmd_hist)

    v = sub.add_parser("verify", help="compare a scan CSV with the truncated reference table")
    v.add_argument("--csv", required=True)
    v.add_argument("--reference", default=None)
    v.add_argument("--digits", type=_positive, default=verify_mod.DEFAULT_DIGITS)
    v.set_defaults(func=_cmd_verify)

    b = sub.add_parser("bounds", help="c1 minimum and lemma constants")
    b.add_argument("--lemma-T", dest="lemma_T", type=int, default=2000)
    b.add_argument("--c1-limit", type=int, default=501)
    b.add_argument("--m0", type=int, default=10)
    b.set_defaults(func=_cmd_bounds)

    m = sub.add_parser("maillet", help="exact h1(q) by the Maillet determinant")
    m.add_argument("--q", type=int, required=True)
    m.set_defaults(func=_cmd_maillet)

    bu = sub.add_parser("budget", help="predicted FFT error budget")
    bu.add_argument("--q", type=int, required=True)
    bu.add_argument("--eps", type=int, choices=sorted(bounds_lab.EPSILONS), default=53)
    bu.set_defaults(func=_cmd_budget)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (PlanResourceError, MemoryError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ScanFormatError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, UsageError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
