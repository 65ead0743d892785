"""Command-line interface.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.
A firm found unstable is a result, not an error, and exits 0.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from firmdyn import export
from firmdyn.bifurcation import SweepConfig, sweep
from firmdyn.config import CONFIG_ENV, load_config
from firmdyn.dynamics import LogisticMap
from firmdyn.errors import ConfigError, DomainError, FirmDynError, IngestError, TheoryError
from firmdyn.forcing import time_grid, trace
from firmdyn.ingest import load_series, normalize_to_calibration
from firmdyn.lyapunov import classify, lyapunov_derivative, lyapunov_separation
from firmdyn.stability import THEORIES, evaluate_firm, uniform_channels

log = logging.getLogger("firmdyn")

USAGE_ERRORS = (ConfigError, DomainError, TheoryError, IngestError)

FIGURES = (
    ("orders", "cycles"),
    ("capital", "risk"),
    ("investments", "risk"),
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _lambdas_arg(values):
    """Expand ``2.5x8`` shorthand in a list of control parameters."""
    out = []
    for v in values:
        for part in v.split(","):
            part = part.strip().replace("×", "x")
            if not part:
                continue
            if "x" in part:
                value, count = part.split("x", 1)
                out += [float(value)] * int(count)
            else:
                out.append(float(part))
    return out


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        metavar="PATH",
        help=f"INI config file (default: ${CONFIG_ENV}, else built-in defaults)",
    )
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = _Parser(prog="firmdyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bifurcate", parents=[common], help="bifurcation diagram sweep")
    p.add_argument("--lmin", type=float, default=2.5, help="lowest control parameter (default 2.5)")
    p.add_argument("--lmax", type=float, default=4.0, help="highest control parameter (default 4.0)")
    p.add_argument("--grid", type=int, help="grid points (config bifurcation.grid, default 2000)")
    p.add_argument("--transient", type=int, help="discarded iterates per row (default 1000)")
    p.add_argument("--samples", type=int, help="recorded iterates per row (default 1000)")
    p.add_argument("--x0", type=float, help="initial state (default 0.371)")
    p.add_argument("--tolerance", type=float, help="period-detection tolerance (default 1e-4)")
    p.add_argument("--max-period", type=int, help="longest detectable period (default 64)")
    p.add_argument("--jump-threshold", type=float, help="crisis width ratio (default 1.5)")
    p.add_argument("--max-doublings", type=int, help="doubling transitions to locate (default 4)")
    p.add_argument("--density-bins", type=int, help="also write <out>.density.csv with N bins")
    p.add_argument("--out", required=True, help="output prefix for <out>.csv and <out>.summary.json")
    p.set_defaults(func=cmd_bifurcate)

    p = sub.add_parser("lyapunov", parents=[common], help="Lyapunov exponent table")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--lambda", dest="lambdas", type=float, action="append", help="control parameter (repeatable)")
    g.add_argument("--range", nargs=3, metavar=("LMIN", "LMAX", "N"), help="N evenly spaced values")
    p.add_argument("--method", choices=("derivative", "separation", "both"), default="derivative")
    p.add_argument("--n", type=int, help="averaged iterates (default 100000)")
    p.add_argument("--transient", type=int, help="discarded iterates (default 1000)")
    p.add_argument("--x0", type=float, help="initial state (default 0.371)")
    p.add_argument("--delta0", type=float, help="separation-method perturbation (default 1e-8)")
    p.add_argument("--renorm-interval", type=int, help="separation renormalization interval (default 1)")
    p.add_argument("--zero-band", type=float, help="marginal band half-width (default 0.01)")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_lyapunov)

    p = sub.add_parser("forcing", parents=[common], help="forcing trace t,amplitude,lambda")
    p.add_argument("--source", choices=("cycles", "risk"), help="business cycles or total risk (default cycles)")
    p.add_argument("--years", type=float, help="trace length in years (default 120)")
    p.add_argument("--dt", type=float, help="time step in years (default 0.25)")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(func=cmd_forcing)

    p = sub.add_parser("stability", parents=[common], help="firm stability report (JSON)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--metrics", metavar="CSV", help="date,theory,value metrics file")
    g.add_argument(
        "--lambdas",
        nargs="+",
        metavar="L",
        help="eight control parameters in theory order; '2.5x8' repeats",
    )
    p.add_argument("--x0", type=float, help="initial state for --lambdas channels (default 0.371)")
    p.add_argument("--horizon", choices=("short_1y", "long_3y"), help="closeness horizon (default short_1y)")
    p.add_argument("--n", type=int, help="iterates per exponent (default 100000)")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("reproduce", parents=[common], help="orders, capital and investments sweeps end to end")
    p.add_argument("--outdir", required=True, help="directory for all outputs")
    p.add_argument("--grid", type=int, help="grid points per sweep (default from config)")
    p.set_defaults(func=cmd_reproduce)
    return parser


def _sweep_config(cfg, lmin, lmax):
    d = cfg.dynamics
    return SweepConfig(lmin, lmax, cfg.bifurcation.grid, d.transient, d.samples, d.x0)


def _run_sweep(cfg, lmin, lmax):
    b = cfg.bifurcation
    return sweep(
        _sweep_config(cfg, lmin, lmax),
        tolerance=b.tolerance,
        max_period=b.max_period,
        jump_threshold=b.jump_threshold,
        max_doublings=b.max_doublings,
        crisis_gap=b.crisis_gap,
        resolution=b.resolution,
    )


def cmd_bifurcate(args, cfg):
    cfg = cfg.override("dynamics", transient=args.transient, samples=args.samples, x0=args.x0)
    cfg = cfg.override(
        "bifurcation",
        grid=args.grid,
        tolerance=args.tolerance,
        max_period=args.max_period,
        jump_threshold=args.jump_threshold,
        max_doublings=args.max_doublings,
    )
    diagram = _run_sweep(cfg, args.lmin, args.lmax)
    paths = export.write_diagram(diagram, args.out, density_bins=args.density_bins)
    log.info("wrote %s", ", ".join(map(str, paths)))
    return 0


def _output(path):
    return open(path, "w", newline="") if path else sys.stdout


def cmd_lyapunov(args, cfg):
    cfg = cfg.override("dynamics", x0=args.x0)
    cfg = cfg.override(
        "lyapunov",
        n=args.n,
        transient=args.transient,
        delta0=args.delta0,
        renorm_interval=args.renorm_interval,
        zero_band=args.zero_band,
    )
    ly = cfg.lyapunov
    if args.range:
        lo, hi, count = float(args.range[0]), float(args.range[1]), int(args.range[2])
        if count < 1:
            raise ConfigError("--range needs N >= 1")
        lambdas = np.linspace(lo, hi, count).tolist()
    else:
        lambdas = args.lambdas
    maps = [LogisticMap(lam) for lam in lambdas]

    rows = []
    for m in maps:
        estimates = []
        if args.method in ("derivative", "both"):
            estimates.append(lyapunov_derivative(m, cfg.dynamics.x0, ly.transient, ly.n))
        if args.method in ("separation", "both"):
            estimates.append(
                lyapunov_separation(
                    m, cfg.dynamics.x0, ly.delta0, ly.renorm_interval, ly.n, ly.transient
                )
            )
        for est in estimates:
            rows.append((m.lam, est.exponent, est.method, classify(est, ly.zero_band)))

    fh = _output(args.out)
    try:
        fh.write("lambda,exponent,method,classification\n")
        for lam, exp, method, cls in rows:
            fh.write(f"{export.fmt(lam)},{export.fmt(exp)},{method},{cls}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_forcing(args, cfg):
    cfg = cfg.override("forcing", source=args.source, years=args.years, dt=args.dt)
    f = cfg.forcing
    rows = trace(cfg.forcing_source(), cfg.calibration, time_grid(f.years, f.dt))
    fh = _output(args.out)
    try:
        fh.write("t,amplitude,lambda\n")
        for t, a, lam in rows:
            fh.write(f"{export.fmt(t)},{export.fmt(a)},{export.fmt(lam)}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_stability(args, cfg):
    cfg = cfg.override("dynamics", x0=args.x0)
    cfg = cfg.override("stability", horizon=args.horizon, n=args.n)
    if args.metrics:
        series = load_series(args.metrics)
        channels = [normalize_to_calibration(s, cfg.calibration) for s in series]
    else:
        try:
            lambdas = _lambdas_arg(args.lambdas)
        except ValueError:
            raise ConfigError(f"cannot parse --lambdas {' '.join(args.lambdas)!r}") from None
        if len(lambdas) != len(THEORIES):
            raise TheoryError(
                f"--lambdas needs {len(THEORIES)} values (one per theory), got {len(lambdas)}"
            )
        channels = uniform_channels(lambdas, cfg.dynamics.x0)
    report = evaluate_firm(channels, cfg.stability_params())
    text = export.dumps(report.to_dict())
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_reproduce(args, cfg):
    cfg = cfg.override("bifurcation", grid=args.grid)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    cal = cfg.calibration
    f = cfg.forcing
    t_grid = time_grid(f.years, f.dt)
    # the figures share the lambda axis and differ only in the forcing behind it
    diagram = _run_sweep(cfg, cal.lambda_min, cal.lambda_max)
    for name, source in FIGURES:
        export.write_diagram(diagram, outdir / name, calibration=cal)
        forcing = cfg.risk if source == "risk" else cfg.cycles
        export.write_rows(
            outdir / f"{name}.forcing.csv", ("t", "amplitude", "lambda"), trace(forcing, cal, t_grid)
        )
        log.info("%s: doubling points %s", name, diagram.doubling_points)
    return 0


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except USAGE_ERRORS as exc:
        print(f"firmdyn {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (FirmDynError, OSError, ArithmeticError, ValueError) as exc:
        print(f"firmdyn {args.command}: failed: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    try:
        code = run(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
    except Exception as exc:  # noqa: BLE001 - exit-code contract
        print(f"firmdyn: internal error: {exc}", file=sys.stderr)
        code = 1
    if code not in (0, 1, 2):
        code = 1
    sys.exit(code)


if __name__ == "__main__":
    main()
