"""Time the compiled and pure-Python kernels side by side.

    python3 benchmarks/compare_backends.py --sizes 1280x720 2560x1440 --json out.json
"""
import argparse
import json
import os
import sys

from pec.bench import DEFAULT_REPEATS, DEFAULT_WARMUP, compare_backends
from pec.core import CorrectionParams


def _size(text):
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    return w, h


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", nargs="+", type=_size, default=[(1280, 720), (2560, 1440)])
    ap.add_argument("--mode", choices=("under", "over"), default="under")
    ap.add_argument("--repeats", type=int, default=DEFAULT_REPEATS)
    ap.add_argument("--warmup", type=int, default=DEFAULT_WARMUP)
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--json", help="also write the full results here")
    args = ap.parse_args(argv)

    params = CorrectionParams.default(args.mode)
    rows = []
    print(f"{'size':>11} {'backend':>8} {'median s':>10} {'mean s':>10} {'speedup':>8}  checksum")
    for w, h in args.sizes:
        res = compare_backends(
            w, h, params, repeats=args.repeats, warmup=args.warmup, threads=args.threads
        )
        slowest = max(r.median for r in res.values())
        for name, r in res.items():
            print(f"{w:>5}x{h:<5} {name:>8} {r.median:10.4f} {r.mean:10.4f} {slowest / r.median:7.1f}x  {r.checksum[:12]}")
            rows.append(r.to_dict())
        if len({r.checksum for r in res.values()}) != 1:
            print("  warning: backends disagree on output", file=sys.stderr)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
