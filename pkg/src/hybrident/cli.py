"""Command line front-end.

Exit codes: 0 success, 2 config/usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import re
import sys
from pathlib import Path

from .config import dumps, load_config, params_from_config
from .errors import ConfigError, NumericalError
from .spectrum import write_trace
from .sweep import (
    PRESETS,
    SweepSpec,
    figure_preset,
    reproducible_timestamp,
    run_point,
    run_spectrum,
    run_sweep,
    write_csv,
    write_gnuplot_matrix,
    write_json,
)

log = logging.getLogger("hybrident")

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", label).strip("_")


def _emit_sweep(doc, args) -> None:
    spec = SweepSpec.from_config(doc)
    result = run_sweep(spec, threads=args.threads, timestamp=reproducible_timestamp())
    with _output(args.out) as fh:
        (write_json if args.format == "json" else write_csv)(result, fh)
    if args.out is None:
        if args.plot or args.matrix:
            log.warning("--plot/--matrix need --out; skipped")
        return
    stem = Path(args.out).with_suffix("")
    for label in result.values:
        if args.matrix:
            with open(f"{stem}.{_slug(label)}.dat", "w", encoding="utf-8") as fh:
                write_gnuplot_matrix(result, label, fh)
        if args.plot:
            from .plotting import plot_sweep

            plot_sweep(result, label, f"{stem}.{_slug(label)}.png")
    for label in result.values:
        for x, y, v in result.argmax(label):
            log.info("max %s = %.6g at %s=%.6g, %s=%.6g", label, v, spec.axis1.label, x, spec.axis2.label, y)


def _emit_spectrum(doc, args) -> None:
    trace = run_spectrum(doc)
    header = f"hybrident spectrum\nconfig: {json.dumps(doc, separators=(',', ':'))}"
    with _output(args.out) as fh:
        write_trace(trace, fh, header)
    if args.plot and args.out is not None:
        from .plotting import plot_spectrum

        plot_spectrum(trace, Path(args.out).with_suffix(".png"), doc.get("name", ""))


def cmd_point(args) -> None:
    report = run_point(load_config(args.config))
    with _output(args.out) as fh:
        if args.format == "json":
            fh.write(json.dumps(report, indent=2) + "\n")
            return
        fh.write("quantity,value\n")
        for key, value in report.items():
            if isinstance(value, dict):
                for sub, v in value.items():
                    fh.write(f"{key}.{sub},{format(v, '.17g')}\n")
            else:
                fh.write(f"{key},{value if isinstance(value, bool) else format(value, '.17g')}\n")


def cmd_sweep(args) -> None:
    _emit_sweep(load_config(args.config), args)


def cmd_spectrum(args) -> None:
    _emit_spectrum(load_config(args.config), args)


def cmd_figure(args) -> None:
    doc = figure_preset(args.name)
    if args.emit_config:
        with _output(args.out) as fh:
            fh.write(dumps(doc))
        return
    if "spectrum" in doc:
        _emit_spectrum(doc, args)
    else:
        _emit_sweep(doc, args)


def cmd_validate(args) -> None:
    doc = load_config(args.config)
    if "sweep" in doc:
        SweepSpec.from_config(doc)
    params_from_config(doc)
    print(f"{args.config}: ok")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hybrident", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="JSON config document")
        p.add_argument("--out", help="output path (default: stdout)")

    def sweep_opts(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--plot", action="store_true", help="also write PNG maps next to --out")
        p.add_argument("--matrix", action="store_true", help="also write gnuplot matrix files")

    p = sub.add_parser("point", help="report all entanglements and occupations at one point")
    common(p)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(func=cmd_point)

    p = sub.add_parser("sweep", help="two-parameter grid sweep")
    common(p)
    sweep_opts(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("spectrum", help="optical output spectrum")
    common(p)
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("figure", help=f"run a figure preset ({', '.join(PRESETS)})")
    p.add_argument("name")
    common(p, config=False)
    sweep_opts(p)
    p.add_argument("--emit-config", action="store_true", help="write the preset config and stop")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("validate", help="check a config document")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be >= 1")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return 0


if __name__ == "__main__":
    sys.exit(main())
