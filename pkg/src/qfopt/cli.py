"""Command line entry point: ``qfopt <subcommand> ...``.

Exit codes: 0 success, 2 invalid input or configuration, 3 numerical failure.
"""

import argparse
import json
import logging
import sys

from .errors import BootstrapFailure, ConvergenceError, ValidationError
from .ext import amz_test, mmz_table, mmz_test
from .io import emit_mz_plotdata, emit_report, emit_summary_table, load_panel
from .mbb import MbbConfig
from .mono import HacConfig, mh_test
from .mz import fit_mz, mz_test
from .samples import AugmentedSample, MultiSeriesSample
from .simlab import ADL11, AR1, GARCH11, TESTS, SimConfig, run_size_power, size_power_table

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3

log = logging.getLogger("qfopt")


def _bootstrap_args(p):
    p.add_argument("--input", required=True, help="long-format panel CSV")
    p.add_argument("--block-length", type=int, default=4)
    p.add_argument("--draws", type=int, default=999, help="bootstrap draws B")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1, help="threads for bootstrap draws")
    _output_args(p)


def _output_args(p):
    p.add_argument("--out", default="-", help="output file ('-' for stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser():
    parser = argparse.ArgumentParser(prog="qfopt", description="Quantile forecast optimality tests")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mz-test", help="MZ autocalibration test")
    _bootstrap_args(p)
    p = sub.add_parser("amz-test", help="augmented MZ test (needs z_* columns)")
    _bootstrap_args(p)
    p = sub.add_parser("mmz-test", help="joint MZ test across series")
    _bootstrap_args(p)
    p.add_argument("--individual", action="store_true",
                   help="also test each series alone and emit a summary table")
    p = sub.add_parser("mh-test", help="horizon monotonicity of expected loss")
    _bootstrap_args(p)
    p.add_argument("--bandwidth", type=int, default=None,
                   help="Bartlett bandwidth for the HAC variance (default: block length)")

    p = sub.add_parser("simulate", help="warp-speed Monte Carlo size/power table")
    p.add_argument("--test", choices=TESTS, default="mz")
    p.add_argument("--dgp", choices=("ar1", "adl", "garch"), default="ar1")
    p.add_argument("--b", type=float, default=0.6)
    p.add_argument("--b-tilde", type=float, default=None,
                   help="forecast persistence (default: b for ar1, projection slope for adl)")
    p.add_argument("--c", type=float, default=0.5, help="ADL loading on lagged z")
    p.add_argument("--garch", type=float, nargs=4, default=(0.0, 0.05, 0.1, 0.85),
                   metavar=("B0", "B1", "B2", "B3"))
    p.add_argument("--garch-tilde", type=float, nargs=4, default=None,
                   metavar=("B0", "B1", "B2", "B3"))
    p.add_argument("--dof", type=float, default=30.0)
    p.add_argument("--P", type=int, nargs="+", default=[240], dest="sizes")
    p.add_argument("--block-length", type=int, nargs="+", default=[4], dest="lengths")
    p.add_argument("--H", type=int, default=None, help="horizons (default 4, or 1 for garch)")
    p.add_argument("--levels", type=float, nargs="+", default=None)
    p.add_argument("--replications", type=int, default=1999)
    p.add_argument("--nominal-size", type=float, default=0.05)
    p.add_argument("--swap-horizons", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    _output_args(p)

    p = sub.add_parser("plot-data", help="scatter data for one MZ regression line")
    p.add_argument("--input", required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--h", type=int, required=True)
    p.add_argument("--series", default=None, help="series id for multi-series panels")
    p.add_argument("--out", default="-")
    return parser


def _write(out, data):
    if out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        with open(out, "wb") as fh:
            fh.write(data)


def _cfg(args):
    return MbbConfig(args.block_length, args.draws, args.seed)


def _single(sample, what):
    if isinstance(sample, MultiSeriesSample):
        raise ValidationError(f"{what} needs a single-series panel; use mmz-test for several series")
    return sample


def _plain(sample):
    if isinstance(sample, AugmentedSample):
        return sample.base
    if isinstance(sample, MultiSeriesSample):
        return MultiSeriesSample(tuple(_plain(s) for s in sample.series))
    return sample


def cmd_mz(args):
    sample = _plain(_single(load_panel(args.input), "mz-test"))
    return emit_report(mz_test(sample, _cfg(args), workers=args.workers), args.format)


def cmd_amz(args):
    sample = _single(load_panel(args.input), "amz-test")
    if not isinstance(sample, AugmentedSample):
        raise ValidationError("amz-test needs at least one z_* column in the panel")
    return emit_report(amz_test(sample, _cfg(args), workers=args.workers), args.format)


def cmd_mmz(args):
    sample = _plain(load_panel(args.input))
    if not isinstance(sample, MultiSeriesSample):
        sample = MultiSeriesSample((sample,))
    if args.individual:
        rows = mmz_table(sample, _cfg(args), workers=args.workers)
        if args.format == "csv":
            return emit_summary_table(rows)
        from .io import report_dict
        payload = [dict(label=label, **report_dict(res)) for label, res in rows]
        return (json.dumps(payload, indent=2) + "\n").encode("utf-8")
    return emit_report(mmz_test(sample, _cfg(args), workers=args.workers), args.format)


def cmd_mh(args):
    sample = _plain(load_panel(args.input))
    result = mh_test(sample, _cfg(args), HacConfig(args.bandwidth), workers=args.workers)
    return emit_report(result, args.format)


def _dgp(args):
    if args.dgp == "ar1":
        return AR1(args.b, args.b if args.b_tilde is None else args.b_tilde)
    if args.dgp == "adl":
        return ADL11(args.b, args.c, args.b_tilde)
    tilde = args.garch if args.garch_tilde is None else args.garch_tilde
    return GARCH11(tuple(args.garch), tuple(tilde), args.dof)


def cmd_simulate(args):
    dgp = _dgp(args)
    garch = args.dgp == "garch"
    H = args.H if args.H is not None else (1 if garch else 4)
    levels = args.levels or ((0.01, 0.025, 0.05) if garch else (0.25, 0.5, 0.75))
    reports = {}
    for l in args.lengths:
        for P in args.sizes:
            cfg = SimConfig(dgp, P, H, tuple(levels), MbbConfig(l, 1, args.seed),
                            args.replications, args.nominal_size, args.swap_horizons)
            reports[(l, P)] = run_size_power(cfg, args.test, workers=args.workers)
    if args.format == "csv":
        return size_power_table(reports).encode("utf-8")
    payload = [
        {"block_length": l, "P": P, "rejection_rate": r.rejection_rate, "rejections": r.rejections,
         "replications": r.replications, "critical_value": r.critical_value,
         "failed_replications": r.failed_replications}
        for (l, P), r in sorted(reports.items())
    ]
    return (json.dumps({"test": args.test, "dgp": args.dgp, "seed": args.seed,
                        "cells": payload}, indent=2) + "\n").encode("utf-8")


def cmd_plot(args):
    sample = _plain(load_panel(args.input))
    if isinstance(sample, MultiSeriesSample):
        if args.series is None:
            raise ValidationError("--series is required for multi-series panels")
        matches = [s for s in sample.series if s.name == args.series]
        if not matches:
            raise ValidationError(f"unknown series {args.series!r}")
        sample = matches[0]
    hits = [k for k, tau in enumerate(sample.levels) if abs(tau - args.tau) < 1e-12]
    if not hits:
        raise ValidationError(f"tau={args.tau} not in {sample.levels.tolist()}")
    fit = fit_mz(sample, hits[0], args.h)
    return emit_mz_plotdata(sample, fit, args.tau, args.h)


COMMANDS = {
    "mz-test": cmd_mz,
    "amz-test": cmd_amz,
    "mmz-test": cmd_mmz,
    "mh-test": cmd_mh,
    "simulate": cmd_simulate,
    "plot-data": cmd_plot,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        data = COMMANDS[args.command](args)
    except (ValidationError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except (ConvergenceError, BootstrapFailure, ArithmeticError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    _write(args.out, data)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
