"""Command-line front end: ``scale-smooth {smooth,weights,compare-exponential,verify}``."""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import reports, verify
from .reports import InputError
from .smoother import step_from_samples

log = logging.getLogger("scalesmooth")

SEED_ENV = "SCALE_SMOOTH_SEED"


def _scales(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad scale list {text!r}") from None
    if not vals or any(not math.isfinite(v) or v < 0.0 for v in vals):
        raise argparse.ArgumentTypeError(f"scales must be finite and >= 0: {text!r}")
    return vals


def _finite(text: str) -> float:
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError("value must be finite")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--r", type=_finite, default=0.5, help="drift rate (1/time unit)")
    common.add_argument("--scales", type=_scales, default=None, help="comma-separated scales t")
    common.add_argument("--input", type=Path, help="CSV with header time,income")
    common.add_argument("--output", type=Path, help="output file (stdout when omitted)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--extension", choices=("constant", "zero"), default="constant",
                        help="income before the first sample")
    common.add_argument("--time-unit", default="unit", help="label for the time axis")
    common.add_argument("--seed", type=int, default=verify.Settings.seed)
    common.add_argument("--plot", action="store_true", help="also render a PNG next to --output")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="scale-smooth", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sm = sub.add_parser("smooth", parents=[common], help="smoothed income profiles u(t, x)")
    sm.add_argument("--points", type=int, default=201, help="profile points per scale")

    w = sub.add_parser("weights", parents=[common], help="weighting curves p_t(x0, y)")
    w.add_argument("--x0", type=_finite, default=0.0, help="averaging position (0 = present)")
    w.add_argument("--points", type=int, default=4001, help="samples per curve")

    sub.add_parser("compare-exponential", parents=[common], help="kernel vs exponential smoothing at x=0")

    v = sub.add_parser("verify", parents=[common], help="run every property check")
    v.add_argument("--quick", action="store_true", help="reduced grids")
    v.add_argument("--mc-paths", type=int)
    v.add_argument("--mc-dt", type=float, default=verify.Settings.mc_dt)
    v.add_argument("--pde-L", type=float, default=verify.Settings.pde_L)
    v.add_argument("--pde-n", type=int, default=verify.Settings.pde_n)
    v.add_argument("--pde-dt", type=float, default=verify.Settings.pde_dt)
    v.add_argument("--inject-fault", choices=verify.FAULTS, help=argparse.SUPPRESS)
    return p


def _config(args) -> dict:
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k in ("verbose", "plot"):
            continue
        cfg[k] = str(v) if isinstance(v, Path) else v
    return cfg


def _emit_rows(args, rows, extra_results=None):
    if args.format == "json":
        results = reports.rows_to_json(rows)
        if extra_results:
            results += extra_results
        text_target = args.output
        if text_target is None:
            json.dump({"config": _config(args), "results": results}, sys.stdout, indent=2, sort_keys=True)
            sys.stdout.write("\n")
        else:
            reports.write_json(text_target, _config(args), results)
    elif args.output is None:
        sys.stdout.write("scale,x,value\n")
        for r in rows:
            sys.stdout.write(f"{reports.fmt(r.scale)},{reports.fmt(r.x)},{reports.fmt(r.value)}\n")
    else:
        reports.write_rows_csv(args.output, rows)


def _figure_path(args) -> Path | None:
    if not args.plot:
        return None
    if args.output is None:
        log.warning("--plot needs --output; no figure written")
        return None
    return args.output.with_suffix(".png")


def _load(args):
    if args.input is None:
        raise InputError("--input is required")
    series = reports.read_income_csv(args.input)
    return series, step_from_samples(series, args.extension)


def cmd_smooth(args) -> int:
    scales = args.scales or [0.1, 1.0, 10.0]
    series, f = _load(args)
    start = series.times[0] if len(series.times) > 1 else -1.0
    xs = np.linspace(start, 0.0, args.points)
    rows = reports.smooth_rows(f, args.r, scales, xs)
    _emit_rows(args, rows)
    info = sys.stderr if args.output is None else sys.stdout
    for t in scales:
        g0 = [row.value for row in rows if row.scale == t][-1]
        print(f"g(0) at t={t:g} {args.time_unit}: {reports.fmt(g0)}", file=info)
    fig = _figure_path(args)
    if fig is not None:
        from .plotting import plot_smoothed

        plot_smoothed(rows, series, fig, args.r)
    return 0


def cmd_weights(args) -> int:
    scales = args.scales or [0.05, 0.5, 2.0, 10.0, 200.0]
    if any(t <= 0.0 for t in scales):
        raise InputError("weights need scales > 0")
    if args.x0 > 0.0:
        raise InputError("--x0 must be <= 0")
    if args.r <= 0.0:
        log.warning("r <= 0: no stationary exponential curve")
    kernel, gaussian, stationary = reports.weights_rows(args.r, scales, args.x0, args.points)
    _emit_rows(args, kernel + stationary, reports.rows_to_json(gaussian, curve="gaussian"))
    if args.output is not None and args.format == "csv":
        side = args.output.with_name(args.output.stem + "_gaussian.csv")
        reports.write_rows_csv(side, gaussian)
    fig = _figure_path(args)
    if fig is not None:
        from .plotting import plot_weights

        plot_weights(kernel, stationary, fig, args.r, args.x0)
    return 0


def cmd_compare_exponential(args) -> int:
    if args.r <= 0.0:
        raise InputError("compare-exponential needs r > 0")
    scales = args.scales or [0.01, 0.1, 1.0, 10.0, 100.0, 200.0]
    if any(t <= 0.0 for t in scales):
        raise InputError("scales must be > 0")
    _, f = _load(args)
    rows = reports.compare_rows(f, args.r, scales)
    header = ["scale", "kernel", "exponential", "flat_window"]
    if args.format == "json":
        results = [dict(zip(header, (r.scale, r.kernel, r.exponential, r.flat_window))) for r in rows]
        if args.output is None:
            json.dump({"config": _config(args), "results": results}, sys.stdout, indent=2, sort_keys=True)
            sys.stdout.write("\n")
        else:
            reports.write_json(args.output, _config(args), results)
    else:
        fmt_row = lambda r: [reports.fmt(v) for v in (r.scale, r.kernel, r.exponential, r.flat_window)]  # noqa: E731
        if args.output is None:
            sys.stdout.write(",".join(header) + "\n")
            for r in rows:
                sys.stdout.write(",".join(fmt_row(r)) + "\n")
        else:
            reports.write_table(args.output, header, rows, fmt_row)
    fig = _figure_path(args)
    if fig is not None:
        from .plotting import plot_comparison

        plot_comparison(rows, fig, args.r)
    return 0


def cmd_verify(args) -> int:
    seed = int(os.environ[SEED_ENV]) if os.environ.get(SEED_ENV) else args.seed
    settings = verify.Settings(
        quick=args.quick, seed=seed, mc_paths=args.mc_paths, mc_dt=args.mc_dt,
        pde_L=args.pde_L, pde_n=args.pde_n, pde_dt=args.pde_dt, fault=args.inject_fault,
    )
    checks = verify.run_all(settings)
    for c in checks:
        print(c.line(), file=sys.stderr)
    ok = all(c.passed for c in checks)
    if args.format == "json":
        cfg = _config(args)
        cfg["seed"] = seed
        text = json.dumps({"config": cfg, "results": verify.as_dicts(checks), "passed": ok}, indent=2, sort_keys=True)
        if args.output is None:
            print(text)
        else:
            args.output.write_text(text + "\n", encoding="utf-8")
    else:
        header = ["name", "measured", "tolerance", "passed"]
        fmt_row = lambda c: [c.name, reports.fmt(c.measured), reports.fmt(c.tolerance), str(c.passed).lower()]  # noqa: E731
        if args.output is None:
            print(",".join(header))
            for c in checks:
                print(",".join(fmt_row(c)))
        else:
            reports.write_table(args.output, header, checks, fmt_row)
    return 0 if ok else 1


COMMANDS = {
    "smooth": cmd_smooth,
    "weights": cmd_weights,
    "compare-exponential": cmd_compare_exponential,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (InputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
