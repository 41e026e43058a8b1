"""Command line entry point.

    iotagg run scenario.cfg [--out table.csv]
    iotagg preset fig3a --mode both --seed 3 --out fig3a.csv
    iotagg validate scenario.cfg
    iotagg dump-effective scenario.cfg

Relative ``--out`` paths are resolved against $IOTAGG_OUTPUT_DIR when set.
Without ``--out`` the CSV goes to stdout.

Exit status: 0 success, 1 configuration error, 2 I/O error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from . import config, sweep
from .montecarlo import SimulationResourceError
from .numerics import NumericalError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_NUMERIC = 3

OUTPUT_DIR_ENV = "IOTAGG_OUTPUT_DIR"
DISCREPANCY_Z = 3.0


def _output_path(out: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(out):
        return os.path.join(base, out)
    return out


def _report_discrepancies(rows, stream) -> None:
    pairs = sweep.discrepancies(rows)
    if not pairs:
        return
    flagged = [d for d in pairs if abs(d.z) > DISCREPANCY_Z]
    worst = max(pairs, key=lambda d: abs(d.z))
    print(
        f"analytic vs mc: {len(pairs)} pairs, {len(flagged)} beyond {DISCREPANCY_Z:g} std errors, "
        f"max |z| = {abs(worst.z):.2f} ({worst.strategy}, {worst.metric.value}, x={worst.axis_value:g})",
        file=stream,
    )
    for d in flagged:
        print(
            f"  {d.strategy} {d.metric.value} x={d.axis_value:g}: analytic={d.analytic:.9g} "
            f"mc={d.mc:.9g} se={d.std_error:.3g} z={d.z:.2f}",
            file=stream,
        )


def _run(cfg: config.LoadedConfig, out: str | None) -> int:
    rows = sweep.run_sweep(cfg.scenario, cfg.sweep, cfg.sim)
    if out is None:
        sweep.emit_csv(rows, sys.stdout)
    else:
        path = _output_path(out)
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        sweep.emit_csv(rows, path)
    if cfg.sweep.mode is sweep.Mode.BOTH:
        _report_discrepancies(rows, sys.stderr)
    return EXIT_OK


def cmd_run(args) -> int:
    return _run(config.load_config(args.config), args.out)


def cmd_preset(args) -> int:
    scenario, spec, sim = sweep.preset(args.name)
    spec = sweep.with_mode(spec, args.mode)
    if args.seed is not None:
        sim = dataclasses.replace(sim, seed=args.seed)
    if args.realizations is not None:
        sim = dataclasses.replace(sim, n_realizations=args.realizations)
    if args.workers is not None:
        sim = dataclasses.replace(sim, workers=args.workers)
    return _run(config.LoadedConfig(scenario, spec, sim), args.out)


def cmd_validate(args) -> int:
    cfg = config.load_config(args.config)
    n = len(cfg.sweep.grid) * len(cfg.sweep.strategies) * len(cfg.sweep.outputs)
    print(f"{args.config}: ok ({n} rows per mode)")
    return EXIT_OK


def cmd_dump_effective(args) -> int:
    sys.stdout.write(config.dumps(config.load_config(args.config)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iotagg", description="Uplink IoT power, lifetime and coverage per aggregator deployment."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="evaluate the sweep described by a config file")
    p.add_argument("config")
    p.add_argument("--out", help="CSV destination (default: stdout)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="evaluate a built-in figure sweep")
    p.add_argument("name", choices=sweep.PRESETS)
    p.add_argument("--mode", choices=[m.value for m in sweep.Mode], default="analytic")
    p.add_argument("--seed", type=int)
    p.add_argument("--realizations", type=int, help="Monte Carlo realizations per point")
    p.add_argument("--workers", type=int, help="simulation threads")
    p.add_argument("--out", help="CSV destination (default: stdout)")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("validate", help="check a config file without running it")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dump-effective", help="print the config with every default filled in")
    p.add_argument("config")
    p.set_defaults(func=cmd_dump_effective)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except config.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, SimulationResourceError, OverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        # invariant violations raised outside the config loader (e.g. CLI overrides)
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
