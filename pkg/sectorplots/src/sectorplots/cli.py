"""Command line: sectorplots render --kind K --in PATHS --out PATH."""

import argparse
import sys

from .figures import KINDS, PlotSpec, render
from .io import EmptyInputError, ParseError


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sectorplots",
        description="Render simulator run outputs into figures.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("render", help="render one figure plus JSON sidecar")
    r.add_argument("--kind", choices=KINDS, required=True)
    r.add_argument("--in", dest="inputs", nargs="+", required=True,
                   metavar="PATH",
                   help="diagnostics CSV, or field snapshot basepath (.hdr/.bin)")
    r.add_argument("--out", required=True, metavar="PATH")
    r.add_argument("--no-timestamp", action="store_false", dest="timestamp",
                   help="omit the creation time from the sidecar "
                        "(makes re-renders byte-identical)")
    r.add_argument("--xscale", default="linear", choices=("linear", "log"))
    r.add_argument("--yscale", default="linear", choices=("linear", "log"))
    r.add_argument("--dpi", type=int, default=150)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = PlotSpec(kind=args.kind, inputs=tuple(args.inputs),
                        out=args.out, xscale=args.xscale, yscale=args.yscale,
                        timestamp=args.timestamp, dpi=args.dpi)
        side = render(spec)
    except (ParseError, EmptyInputError, FileNotFoundError,
            ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.out} and {side}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
