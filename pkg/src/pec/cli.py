"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 I/O or format error, 3 invariant
violation in a produced result.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from pec import analysis, bench, metrics
from pec.core import CorrectionParams, ExposureMode, correct, parse_schedule
from pec.image import (
    ImageFormatError,
    format_from_path,
    from_plane,
    histogram256,
    luminance,
    read_image,
    to_plane,
    write_image,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INVARIANT = 3

AUTO_THRESHOLD = 0.5


class UsageError(Exception):
    pass


class InvariantError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def default_threads() -> int:
    env = os.environ.get("PEC_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"PEC_THREADS must be a positive integer, got {env!r}") from None
        if n < 1:
            raise UsageError(f"PEC_THREADS must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


def _add_params(p: argparse.ArgumentParser, auto: bool = True) -> None:
    modes = ["under", "over", "auto"] if auto else ["under", "over"]
    p.add_argument("--mode", choices=modes, default="under", help="exposure mode (default: under)")
    p.add_argument("-c", type=float, default=None, help="exposure coefficient in [0, 1]")
    p.add_argument("-T", type=int, default=None, help="number of blocks (1-3)")
    p.add_argument("-K", default=None, help="per-block iteration counts, comma separated")


def _add_threads(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=None, help="worker threads (default: PEC_THREADS or CPU count)")


def build_params(mode: str, c, T, K) -> CorrectionParams:
    """Merge explicit flags with the mode's defaults."""
    base = CorrectionParams.default(mode)
    try:
        schedule = parse_schedule(K) if K is not None else None
        if schedule is not None and T is not None and len(schedule) != T:
            raise ValueError(f"-K lists {len(schedule)} counts but -T is {T}")
        if schedule is None:
            schedule = base.K if T is None else (base.K[0],) * T
        return CorrectionParams(base.c if c is None else c, schedule, mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _threads(args) -> int:
    if args.threads is None:
        return default_threads()
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    return args.threads


def _load(path: str) -> np.ndarray:
    return to_plane(read_image(path))


def _resolve_mode(args, y: np.ndarray) -> str:
    if args.mode != "auto":
        return args.mode
    mean = float(luminance(y, "gray").mean())
    mode = "over" if mean > AUTO_THRESHOLD else "under"
    print(f"auto mode (heuristic): {mode} (mean gray luminance {mean:.6f})", file=sys.stderr)
    return mode


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# -- subcommands ---------------------------------------------------------------


def cmd_correct(args) -> int:
    threads = _threads(args)
    if args.format == "jpeg":
        raise UsageError("JPEG output is not supported; use png or ppm")
    y = _load(args.input)
    params = build_params(_resolve_mode(args, y), args.c, args.T, args.K)
    x = correct(y, params, threads=threads)
    if not (x.min() >= 0.0 and x.max() <= 1.0):
        raise InvariantError("corrected values left [0, 1]")
    if params.mode is ExposureMode.UNDER and not (x >= y).all():
        raise InvariantError("under-exposure correction darkened some pixels")
    if params.mode is ExposureMode.OVER and not (x <= y).all():
        raise InvariantError("over-exposure correction brightened some pixels")
    write_image(args.output, from_plane(x), args.format or format_from_path(args.output))
    return EXIT_OK


_METRIC_NAMES = ("de", "psnr", "ssim", "loe")


def cmd_metrics(args) -> int:
    wanted = _METRIC_NAMES if args.metrics is None else tuple(m.strip() for m in args.metrics.split(",") if m.strip())
    unknown = [m for m in wanted if m not in _METRIC_NAMES]
    if unknown:
        raise UsageError(f"unknown metrics {unknown}; choose from {list(_METRIC_NAMES)}")
    needs_ref = [m for m in wanted if m != "de"]
    if args.metrics is not None and needs_ref and args.ref is None:
        raise UsageError(f"--ref is required for {', '.join(needs_ref)}")
    test = _load(args.test)
    ref = _load(args.ref) if args.ref is not None else None
    if ref is not None and ref.shape != test.shape:
        raise ImageFormatError(f"reference shape {ref.shape} differs from test shape {test.shape}")
    report = metrics.MetricReport(de=metrics.discrete_entropy(test))
    if ref is not None:
        if "psnr" in wanted:
            report.psnr = metrics.psnr(ref, test)
        if "ssim" in wanted:
            report.ssim = metrics.ssim(ref, test)
        if "loe" in wanted:
            report.loe = metrics.loe(ref, test, args.loe_max_side, threads=_threads(args))
    d = {k: v for k, v in report.to_dict().items() if k in wanted and v is not None}
    if args.json:
        sys.stdout.write(_dump_json(d))
    else:
        for k in _METRIC_NAMES:
            if k in d:
                print(f"{k}: {d[k]}")
    return EXIT_OK


_NORMS = {"l2": 2, "l1": 1, "inf": np.inf}


def cmd_trace(args) -> int:
    y = _load(args.input)
    params = build_params(_resolve_mode(args, y), args.c, args.T, args.K)
    trace = analysis.relative_error_trace(y, params, ord=_NORMS[args.norm])
    _write_text(args.csv, analysis.trace_csv(trace))
    return EXIT_OK


def cmd_curve(args) -> int:
    if args.n < 2:
        raise UsageError("-n must be >= 2")
    params = build_params(args.mode, args.c, args.T, args.K)
    _write_text(args.csv, analysis.curve_csv(analysis.transfer_curve(params, args.n)))
    return EXIT_OK


def cmd_hist(args) -> int:
    y = _load(args.input)
    if not 0 <= args.channel < y.shape[2]:
        raise UsageError(f"--channel {args.channel} out of range for a {y.shape[2]}-channel image")
    _write_text(args.csv, analysis.histogram_csv(histogram256(y, args.channel)))
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.width < 1 or args.height < 1:
        raise UsageError("-w and -h must be positive")
    if args.repeats < 3:
        raise UsageError("--repeats must be >= 3")
    if args.warmup < 0:
        raise UsageError("--warmup must be >= 0")
    params = build_params(args.mode, args.c, args.T, args.K)
    try:
        result = bench.time_correct(
            args.width,
            args.height,
            params,
            repeats=args.repeats,
            warmup=args.warmup,
            threads=_threads(args),
            seed=args.seed,
            backend=args.backend,
        )
    except RuntimeError as exc:
        raise UsageError(str(exc)) from None
    _write_text(args.json, _dump_json(result.to_dict()))
    print(
        f"{args.width}x{args.height} [{result.backend}, {result.threads} threads]: "
        f"median {result.median:.4f} s, mean {result.mean:.4f} s",
        file=sys.stderr,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pec", description="Training-free exposure correction and diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("correct", help="correct an image")
    _add_params(p)
    _add_threads(p)
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=["png", "ppm", "jpeg"], default=None, help="output format (default: from extension)")
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("metrics", help="image quality metrics")
    p.add_argument("test")
    p.add_argument("--ref", default=None, help="reference image; also the original for LOE")
    p.add_argument("--json", action="store_true", help="print a JSON report")
    p.add_argument("--metrics", default=None, help="comma list from de,psnr,ssim,loe")
    p.add_argument("--loe-max-side", type=int, default=metrics.LOE_MAX_SIDE)
    _add_threads(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("trace", help="relative-error trace of a correction run")
    p.add_argument("input")
    _add_params(p)
    p.add_argument("--norm", choices=sorted(_NORMS), default="l2")
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("curve", help="scalar transfer curve")
    _add_params(p, auto=False)
    p.add_argument("-n", type=int, default=256)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("hist", help="256-bin histogram of one channel")
    p.add_argument("input")
    p.add_argument("--channel", type=int, default=0)
    p.add_argument("--csv", default=None)
    p.set_defaults(func=cmd_hist)

    p = sub.add_parser("bench", help="time the correction kernel", add_help=False)
    p.add_argument("--help", action="help", help="show this help message and exit")
    p.add_argument("-w", "--width", type=int, required=True)
    p.add_argument("-h", "--height", type=int, required=True)
    _add_params(p, auto=False)
    _add_threads(p)
    p.add_argument("--repeats", type=int, default=bench.DEFAULT_REPEATS)
    p.add_argument("--warmup", type=int, default=bench.DEFAULT_WARMUP)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=["auto", "cython", "python"], default="auto")
    p.add_argument("--json", default=None, help="write the JSON report here (default: stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ImageFormatError) as exc:
        print(f"pec: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvariantError as exc:
        print(f"pec: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
