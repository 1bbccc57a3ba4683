"""``renyirobust`` command line entry point."""

from __future__ import annotations

import argparse
import sys

from .. import __version__
from .._accel import backend_name
from ..errors import ConfigError, IngestError
from .config import FORMATS, METHODS, DataSource, load_config, make_stats
from .emit import render
from .runner import run, run_calibration
from .tables import TABLE_IDS, table_config

EXIT_CONFIG = 2
EXIT_INGEST = 3


def _add_common(parser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", metavar="PATH", default=default, help="key = value run configuration")
    parser.add_argument("--seed", type=int, metavar="U64", default=default, help="master seed")
    parser.add_argument("--draws", type=int, metavar="N", default=default, help="Monte Carlo draws per cell")
    parser.add_argument("--format", choices=FORMATS, default=default, help="output format (default csv)")
    parser.add_argument("--out", metavar="PATH", default=default, help="write here instead of stdout")
    parser.add_argument("--workers", type=int, metavar="K", default=default, help="threads for grid cells")
    parser.add_argument("--method", choices=METHODS, default=default, help="mc, closed or auto (default)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="renyirobust",
        description="Prior robustness through the local curvature of the Renyi divergence.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({backend_name()})")
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def subparser(name, **kw):
        p = sub.add_parser(name, **kw)
        _add_common(p, suppress=True)
        return p

    subparser("run", help="evaluate every analysis listed in --config")
    subparser("curvature", help="curvature grid from --config")
    subparser("divergence", help="divergence and calibration grid from --config")

    cal = subparser("calibrate", help="map divergences to biased-coin probabilities")
    cal.add_argument("--d0", type=float, nargs="+", help="divergence values to calibrate")
    cal.add_argument("--order", type=float, nargs="+", default=[1.0], help="Renyi orders a (default 1)")

    rep = subparser("reproduce", help="rerun one of the published tables")
    rep.add_argument("table", choices=TABLE_IDS + tuple(str(i) for i in range(1, 7)), metavar="TABLE")
    rep.add_argument("--data", metavar="PATH", help="data file for table4 (AIDS status column)")
    rep.add_argument("--column", help="column to read from --data (default status)")
    rep.add_argument("--success", help="label counted as a success (default D)")
    rep.add_argument("--failure", help="label counted as a failure; others are then rejected")
    rep.add_argument("--stats", help="sufficient statistics instead of --data, e.g. 11,20")
    return parser


def _config_for(args):
    if args.command == "reproduce":
        source = None
        if args.stats:
            try:
                values = [float(v) for v in args.stats.split(",")]
            except ValueError:
                raise ConfigError(f"--stats expects comma-separated numbers, got {args.stats!r}") from None
            source = DataSource(stats=make_stats("beta", values))
        elif args.data:
            source = DataSource(path=args.data, column=args.column, success=args.success, failure=args.failure)
        if source is not None and args.table not in ("table4", "4"):
            raise ConfigError("--data and --stats only apply to table4")
        cfg = table_config(args.table, source)
        if args.config:
            raise ConfigError("reproduce does not take --config")
        return cfg
    if not args.config:
        raise ConfigError(f"{args.command} needs --config PATH")
    cfg = load_config(args.config)
    if args.command == "curvature":
        cfg = cfg.with_overrides(analyses=("curvature",))
    elif args.command == "divergence":
        wanted = tuple(a for a in cfg.analyses if a != "curvature") or ("divergence", "calibration")
        cfg = cfg.with_overrides(analyses=wanted)
    elif args.command == "calibrate":
        cfg = cfg.with_overrides(analyses=("calibration",))
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "calibrate" and args.d0 is not None:
            if args.config:
                raise ConfigError("give either --d0 or --config, not both")
            table = run_calibration(args.d0, args.order)
            fmt = args.format or "csv"
        else:
            if args.command == "calibrate" and not args.config:
                raise ConfigError("calibrate needs --d0 values or --config")
            cfg = _config_for(args).with_overrides(
                seed=args.seed, mc_draws=args.draws, output_format=args.format, method=args.method
            )
            if args.workers is not None and args.workers < 1:
                raise ConfigError("--workers must be at least 1")
            table = run(cfg, workers=args.workers or 1)
            fmt = cfg.output_format
    except IngestError as exc:
        print(f"renyirobust: ingest error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except ConfigError as exc:
        print(f"renyirobust: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    text = render(table, fmt)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
