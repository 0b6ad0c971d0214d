"""Command-line entry points.

    gmmshock solve <config-file> [--output DIR] [--seed N] [--threads N]
    gmmshock analyze <snapshot> --features NAME --kmin 1 --kmax 6
    gmmshock bench-sensor <config-file> --steps 20

Config files may also name a preset (sedov-desk, dmr-paper, ...) instead
of a path. GMMSHOCK_THREADS sets the default thread count. Exit codes:
0 success, 2 configuration error, 3 numerical failure.
"""

import argparse
import os
import sys
from pathlib import Path

from . import driver
from .cases import preset_config, preset_names
from .config import CaseConfig, ConfigError, load_config

THREADS_ENV = "GMMSHOCK_THREADS"


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _resolve_config(spec: str, seed=None, threads=None) -> CaseConfig:
    overrides = {}
    if seed is not None:
        overrides["seed"] = str(seed)
    overrides["threads"] = str(threads if threads is not None else _default_threads())
    if Path(spec).exists():
        return load_config(spec, overrides)
    try:
        base = preset_config(spec)
    except ConfigError:
        raise ConfigError(
            f"{spec!r} is neither a config file nor a preset "
            f"(presets: {', '.join(preset_names())})")
    from .config import config_from_mapping
    return config_from_mapping(overrides, defaults=base)


def _cmd_solve(args) -> int:
    config = _resolve_config(args.config, seed=args.seed, threads=args.threads)
    report = driver.run_case(config, output_dir=args.output)
    print(f"{config.case}: {report.steps_completed} steps to t={report.final_time:.6g} "
          f"in {report.wall_seconds:.2f} s "
          f"(min rho {report.min_density:.3e}, min p {report.min_pressure:.3e})")
    if report.status != driver.EXIT_OK:
        print(f"numerical failure: {report.message}", file=sys.stderr)
    return report.status


def _cmd_analyze(args) -> int:
    rows = driver.analyze_snapshot(args.snapshot, features=args.features,
                                   k_min=args.kmin, k_max=args.kmax, seed=args.seed,
                                   feature_dump_path=args.dump_features)
    out = args.output or (str(Path(args.snapshot).with_suffix("")) + "_bic.txt")
    driver.write_bic_table(out, rows, args.snapshot, args.features, args.seed)
    print(f"{'K':>3} {'logL':>16} {'N_p':>5} {'AIC':>16} {'BIC':>16}")
    for k, log_l, n_params, aic, bic in rows:
        print(f"{k:>3d} {log_l:>16.6e} {n_params:>5d} {aic:>16.6e} {bic:>16.6e}")
    print(f"table written to {out}")
    return driver.EXIT_OK


def _cmd_bench(args) -> int:
    config = _resolve_config(args.config, threads=args.threads)
    rows = driver.measure_sensor_cost(config, n_steps=args.steps)
    out = args.output or "sensor_cost.txt"
    driver.write_cost_report(out, rows, config, args.steps)
    print(f"{'sensor':>9} {'cadence':>8} {'fraction':>10}")
    for row in rows:
        print(f"{row['sensor']:>9} {row['cadence']:>8d} {row['fraction']:>10.4f}")
    print(f"report written to {out}")
    return driver.EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gmmshock",
                                     description="DG flow solver with clustering-based shock sensing")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run a case to completion")
    solve.add_argument("config", help="config file or preset name")
    solve.add_argument("--output", default=None, help="snapshot/report directory")
    solve.add_argument("--seed", type=int, default=None)
    solve.add_argument("--threads", type=int, default=None)
    solve.set_defaults(func=_cmd_solve)

    analyze = sub.add_parser("analyze", help="BIC/AIC table from a snapshot")
    analyze.add_argument("snapshot")
    analyze.add_argument("--features", default="gradp2_divv2")
    analyze.add_argument("--kmin", type=int, default=1)
    analyze.add_argument("--kmax", type=int, default=6)
    analyze.add_argument("--seed", type=int, default=0)
    analyze.add_argument("--output", default=None)
    analyze.add_argument("--dump-features", default=None)
    analyze.set_defaults(func=_cmd_analyze)

    bench = sub.add_parser("bench-sensor", help="relative sensor cost over a few steps")
    bench.add_argument("config", help="config file or preset name")
    bench.add_argument("--steps", type=int, default=20)
    bench.add_argument("--threads", type=int, default=None)
    bench.add_argument("--output", default=None)
    bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return driver.EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return driver.EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
