"""Command line entry: plot <kind> --in file.csv --out file.svg"""

import argparse
import sys

from .jobs import PlotJob, SchemaMismatch, KINDS
from .render import render


def build_parser():
    parser = argparse.ArgumentParser(
        prog="plot", description="Render a CSV table produced by the "
        "numerical toolkit into a figure.")
    parser.add_argument("kind", choices=sorted(KINDS))
    parser.add_argument("--in", dest="input_csv", required=True,
                        metavar="file.csv")
    parser.add_argument("--out", dest="output_image", required=True,
                        metavar="file.svg")
    parser.add_argument("--levels", type=str, default=None,
                        help="comma separated contour levels "
                        "(pseudo_contour only)")
    parser.add_argument("--window", type=float, default=None,
                        help="averaging window for steady_profile")
    parser.add_argument("--xi", type=float, default=None,
                        help="reference localization length for "
                        "wavefunction_log")
    return parser


def main(argv=None):
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = list(argv)
    # let --levels take negative values: argparse reads "-5,-4" as a flag
    for i in range(len(argv) - 1):
        if argv[i] == "--levels":
            argv[i:i + 2] = ["--levels=" + argv[i + 1]]
            break
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    options = {}
    if args.levels is not None:
        try:
            options["levels"] = [float(x) for x in args.levels.split(",") if x]
        except ValueError:
            print("plot: bad --levels value %r" % args.levels, file=sys.stderr)
            return 2
        if not options["levels"]:
            print("plot: --levels given but empty", file=sys.stderr)
            return 2
    if args.window is not None:
        options["window"] = args.window
    if args.xi is not None:
        options["xi"] = args.xi
    job = PlotJob(args.kind, args.input_csv, args.output_image, options)
    try:
        render(job)
    except SchemaMismatch as exc:
        print("plot: schema mismatch: %s" % exc, file=sys.stderr)
        return 3
    except OSError as exc:
        print("plot: %s" % exc, file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
