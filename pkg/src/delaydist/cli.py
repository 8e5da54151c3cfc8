"""Command-line interface.

Exit codes:
    0  success
    1  other toolkit error
    2  usage error (bad or missing arguments)
    3  input could not be read or parsed (ping text, trace CSV)
    4  data cannot support the computation (too few samples, zero spread,
       equal sizes, non-positive capacity, ...)
    5  live measurement failed (no ping, unresolvable host, all lost)

Data goes to stdout (JSON with --json, otherwise a text table); messages and
warnings go to stderr.
"""
from __future__ import annotations

import argparse
import sys
import warnings

from . import __version__
from .decompose import SizeDelayPoint, min_delay_by_size, path_model_from_points
from .errors import DataError, DelayDistError, NegativeDminWarning, ParseError, ProbeError
from .fit import cdf_overlay, compare_models, reduce_for_fit, write_overlay_tsv
from .models import ExponentialDelayModel, Family, SizeAwareExponentialModel
from .prober import ProbeSpec, multi_size_probe, probe
from .report import (
    ReportDocument,
    build_fit_report,
    format_fit_table,
    headroom_rows,
    path_info,
    summary_info,
    trace_info,
)
from .synth import SynthSpec, generate
from .trace import format_trace_csv, read_trace_csv, rtt_to_owd, summarize, write_trace_csv

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_DATA = 4
EXIT_NETWORK = 5

FAMILIES = {
    "exp": Family.EXPONENTIAL,
    "exponential": Family.EXPONENTIAL,
    "tnorm": Family.TRUNCATED_NORMAL,
    "truncated-normal": Family.TRUNCATED_NORMAL,
}


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _percentiles(text):
    try:
        ps = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    bad = [p for p in ps if not 0.0 <= p < 1.0]
    if bad or not ps:
        raise argparse.ArgumentTypeError(f"percentiles must lie in [0, 1): {text!r}")
    return sorted(ps)


def _sizes(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of sizes: {text!r}") from None


def _host_label(trace):
    md = trace.metadata
    return f"{md.source}->{md.target}" if md.source else md.target or "-"


def _ms(us):
    return f"{us:.3f} us ({us / 1000:.3f} ms)"


def cmd_probe(args) -> int:
    spec = ProbeSpec(args.host, count=args.count, size_bytes=args.size,
                     interval_ms=args.interval_ms, timeout_ms=args.timeout_ms)
    trace = probe(spec, ping=args.ping)
    if args.out:
        write_trace_csv(trace, args.out)
    s = summarize(trace)
    if args.json:
        doc = ReportDocument(trace=trace_info(trace), summary=summary_info(s))
        sys.stdout.write(doc.to_json())
    else:
        print(f"host      {args.host}")
        print(f"W         {s.size_bytes} bytes (reply size)")
        print(f"received  {s.n_ok}/{s.n_ok + s.n_lost}")
        print(f"D_min     {_ms(s.d_min_us)}")
        print(f"D_av      {_ms(s.d_av_us)}")
    return EXIT_OK


def cmd_fit(args) -> int:
    trace = read_trace_csv(args.trace)
    if args.owd_from_rtt:
        trace = rtt_to_owd(trace)
    report = compare_models(trace)
    if args.plot:
        fitted = reduce_for_fit(trace).trace
        write_overlay_tsv(cdf_overlay(fitted, report.exp_model, report.nor_model), args.plot)
    doc = build_fit_report(trace, report, args.percentiles)
    if args.json:
        sys.stdout.write(doc.to_json())
        return EXIT_OK
    sizes = trace.sizes()
    w = sizes[0] if len(sizes) == 1 else "mixed"
    sys.stdout.write(format_fit_table(
        [(_host_label(trace), w, report.k_nor, report.k_exp, report.selected.value)]
    ))
    s = report.summary
    print(f"\nsamples   {report.n_samples} delivered, loss rate {report.loss_rate:.4f}")
    if report.path_model is not None:
        p = report.path_model
        print(f"path      D_min {_ms(p.d_min_us)}, C {p.capacity_bytes_per_us:.6g} bytes/us "
              f"({p.method}); {report.clamped} residual(s) clamped to 0")
    print(f"D_min     {_ms(s.d_min_us)}")
    print(f"D_av      {_ms(s.d_av_us)}")
    print(f"exp       lambda = {report.exp_model.lambda_per_us:.6g} /us")
    print(f"nor       sigma = {report.nor_model.sigma_us:.3f} us "
          f"(half-normal mean {report.nor_model.mean_us:.3f} us vs D_av {s.d_av_us:.3f} us)")
    for row in doc.headroom:
        print(f"p{row['p'] * 100:g}".ljust(10) + _ms(row["delay_us"]))
    return EXIT_OK


def cmd_pathmodel(args) -> int:
    if args.host:
        if not args.sizes:
            raise _Usage("--host requires --sizes")
        model = multi_size_probe(args.host, args.sizes, count=args.count, ping=args.ping)
        n_sizes = len(args.sizes)
    else:
        if not args.traces:
            raise _Usage("give trace files or --host")
        mins: dict[int, float] = {}
        for path in args.traces:
            for pt in min_delay_by_size(read_trace_csv(path)):
                mins[pt.size_bytes] = min(mins.get(pt.size_bytes, pt.min_delay_us), pt.min_delay_us)
        points = [SizeDelayPoint(w, d) for w, d in sorted(mins.items())]
        if args.sizes:
            points = [p for p in points if p.size_bytes in set(args.sizes)]
        n_sizes = len(points)
        model = path_model_from_points(points)
    if args.json:
        doc = {"schema_version": 1, "path_model": path_info(model), "n_sizes": n_sizes}
        import json
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    mode = "two-point" if model.method == "two-point" else f"regression over {n_sizes} sizes"
    print(f"mode      {mode}")
    print(f"D_min     {_ms(model.d_min_us)}")
    print(f"C         {model.capacity_bytes_per_us:.6g} bytes/us "
          f"({model.capacity_bytes_per_us * 8:.6g} Mbit/s)")
    print(f"D_fixed   {model.d_min_us:.3f} us + W / {model.capacity_bytes_per_us:.6g} bytes/us")
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = SynthSpec(FAMILIES[args.family], args.dmin, args.scale, args.n,
                     size_bytes=args.size, seed=args.seed, loss_rate=args.loss)
    text = format_trace_csv(generate(spec))
    if args.out and args.out != "-":
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_headroom(args) -> int:
    size = args.size
    if args.trace:
        fi = reduce_for_fit(read_trace_csv(args.trace))
        s = fi.summary
        if fi.path_model is not None:
            if size is None:
                raise _Usage("mixed-size trace: --size is required")
            exp = ExponentialDelayModel.from_moments(s.d_min_us, s.d_av_us)
            model = SizeAwareExponentialModel(
                fi.path_model.d_min_us, fi.path_model.capacity_bytes_per_us, exp.lambda_per_us
            )
            rows = headroom_rows(model, args.percentiles, size)
        else:
            if size is not None and size != s.size_bytes:
                raise DataError(
                    f"trace holds size {s.size_bytes} only; a path model (two sizes) "
                    f"is needed for size {size}"
                )
            size = s.size_bytes
            rows = headroom_rows(ExponentialDelayModel.from_moments(s.d_min_us, s.d_av_us),
                                 args.percentiles)
    else:
        if None in (args.dmin, args.capacity, args.rate):
            raise _Usage("give a trace file or all of --dmin, --capacity, --lambda")
        if size is None:
            raise _Usage("--size is required with model parameters")
        model = SizeAwareExponentialModel(args.dmin, args.capacity, args.rate)
        rows = headroom_rows(model, args.percentiles, size)
    if args.json:
        import json
        doc = {"schema_version": 1, "size_bytes": size, "headroom": rows}
        sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        return EXIT_OK
    print(f"W         {size} bytes")
    for row in rows:
        print(f"p{row['p'] * 100:g}".ljust(10) + _ms(row["delay_us"]))
    return EXIT_OK


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="delaydist", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("probe", help="ping a host and summarise D_min / D_av")
    p.add_argument("host")
    p.add_argument("--count", type=_positive_int, default=10)
    p.add_argument("--size", type=int, default=100, help="ICMP payload bytes")
    p.add_argument("--interval-ms", type=_positive_int, default=200)
    p.add_argument("--timeout-ms", type=_positive_int, default=1000)
    p.add_argument("--ping", help="ping executable (default: $DELAYDIST_PING or PATH)")
    p.add_argument("-o", "--out", help="also write the trace as canonical CSV")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("fit", help="compare exponential and truncated-normal fits")
    p.add_argument("trace")
    p.add_argument("--owd-from-rtt", action="store_true", help="halve RTTs first")
    p.add_argument("--percentiles", type=_percentiles, default=[0.9, 0.99])
    p.add_argument("--plot", metavar="OUT.tsv", help="write the CDF overlay table")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("pathmodel", help="estimate D_min and capacity from per-size minima")
    p.add_argument("traces", nargs="*")
    p.add_argument("--host")
    p.add_argument("--sizes", type=_sizes)
    p.add_argument("--count", type=_positive_int, default=10)
    p.add_argument("--ping")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_pathmodel)

    p = sub.add_parser("synth", help="generate a seeded synthetic trace")
    p.add_argument("--family", choices=sorted(FAMILIES), required=True)
    p.add_argument("--dmin", type=float, required=True, help="minimum delay, us")
    p.add_argument("--scale", type=float, required=True, help="1/lambda or sigma, us")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=_positive_int, default=100)
    p.add_argument("--loss", type=float, default=0.0, help="Bernoulli loss probability")
    p.add_argument("-o", "--out", help="output CSV (default stdout)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("headroom", help="delay budget at target percentiles")
    p.add_argument("trace", nargs="?")
    p.add_argument("--size", type=int)
    p.add_argument("--percentiles", type=_percentiles, default=[0.9, 0.99])
    p.add_argument("--dmin", type=float)
    p.add_argument("--capacity", type=float, help="bytes/us")
    p.add_argument("--lambda", dest="rate", type=float, help="per us")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_headroom)
    return ap


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    warnings.showwarning = _show_warning
    warnings.simplefilter("always", NegativeDminWarning)
    try:
        return args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"delaydist: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, OSError) as exc:
        print(f"delaydist: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DataError, ValueError) as exc:
        print(f"delaydist: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ProbeError as exc:
        print(f"delaydist: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except DelayDistError as exc:
        print(f"delaydist: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
