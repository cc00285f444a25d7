"""Command-line entry point.

Exit codes: 0 success, 1 invalid arguments or configuration, 2 runtime
failure (e.g. unwritable output), 3 oracle self-test failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys

from .chain import Scenario, Scheme, compare_schemes
from .config import ConfigError, default_config, find_preset, list_presets, load_config
from .oracle import oracle_check
from .orbits import flyby_window

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_ORACLE = 3

ORACLE_TOLERANCE = 1e-12

SWEEP_COLUMNS = ("scheme", "L_km", "n", "P0", "R_rep_hz", "eX", "eZ", "r_inf",
                 "key_rate_hz", "flyby_s", "daily_bits", "reason")
COMPARE_COLUMNS = ("scheme", "L_km", "best_n", "key_rate_hz", "daily_bits")
FLYBY_COLUMNS = ("scheme", "L_km", "n", "altitude_km", "flyby_s")
PRESET_COLUMNS = ("name", "L_km", "ocean")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def render(rows, columns, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(columns, r)) for r in rows], indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _emit(text: str, path):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _run_config(args):
    cfg = load_config(args.config) if args.config else default_config()
    if getattr(args, "preset", None):
        cfg = dataclasses.replace(cfg, distances_km=(find_preset(args.preset).distance_km,))
    if getattr(args, "format", None):
        cfg = dataclasses.replace(cfg, output_format=args.format)
    if getattr(args, "output", None):
        cfg = dataclasses.replace(cfg, output_path=args.output)
    return cfg


def sweep_rows(cfg, schemes=None):
    rows = compare_schemes(cfg.distances_km, cfg.nesting_levels, cfg.hardware,
                           schemes=schemes or cfg.schemes, **cfg.scenario_kwargs())
    out = []
    for row in rows:
        r = row.result
        out.append((str(row.scheme), row.total_distance_km, row.nesting_level, r.p0,
                    r.repeater_rate, r.e_x, r.e_z, r.secret_fraction, r.key_rate,
                    r.flyby_duration, r.daily_key, r.reason))
    return out


def cmd_sweep(args):
    cfg = _run_config(args)
    _emit(render(sweep_rows(cfg), SWEEP_COLUMNS, cfg.output_format), cfg.output_path)
    return EXIT_OK


def cmd_compare(args):
    cfg = _run_config(args)
    full = sweep_rows(cfg, schemes=(Scheme.OO, Scheme.GG, Scheme.OG))
    best = {}
    for scheme, L, n, *_, key, _flyby, daily, _reason in full:
        current = best.get((scheme, L))
        if current is None or key > current[3]:
            best[(scheme, L)] = (scheme, L, n, key, daily)
    _emit(render(list(best.values()), COMPARE_COLUMNS, cfg.output_format), cfg.output_path)
    return EXIT_OK


def cmd_flyby(args):
    cfg = _run_config(args)
    rows = []
    schemes = [s for s in cfg.schemes if s is not Scheme.GG] or [Scheme.OO, Scheme.OG]
    for scheme in schemes:
        for L in cfg.distances_km:
            for n in cfg.nesting_levels:
                sc = Scenario(scheme, L, n, hardware=cfg.hardware, **cfg.scenario_kwargs())
                duration = flyby_window(sc.geometry_scenario()).duration
                rows.append((str(scheme), float(L), int(n), cfg.orbit.altitude / 1e3, duration))
    _emit(render(rows, FLYBY_COLUMNS, cfg.output_format), cfg.output_path)
    return EXIT_OK


def cmd_presets(args):
    rows = [(p.name, p.distance_km, "X" if p.ocean else "") for p in list_presets()]
    _emit(render(rows, PRESET_COLUMNS, args.format or "csv"), args.output)
    return EXIT_OK


def cmd_oracle(args):
    if args.trials < 1:
        raise ConfigError(f"--trials must be >= 1, got {args.trials}")
    worst = oracle_check(args.seed, args.trials)
    ok = worst < ORACLE_TOLERANCE
    print(f"oracle-check seed={args.seed} trials={args.trials} "
          f"max_deviation={worst:.3e} tolerance={ORACLE_TOLERANCE:.0e} "
          f"{'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_ORACLE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qrepsat", description="Key rates of satellite and fibre repeater chains.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, preset=True):
        p.add_argument("--config", metavar="PATH", help="INI run configuration")
        p.add_argument("--output", metavar="PATH", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        if preset:
            p.add_argument("--preset", metavar="NAME", help="city pair from `qrepsat presets`")

    p = sub.add_parser("sweep", help="key rate for every configured (scheme, L, n)")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", help="best-n key rate per scheme and distance")
    common(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("flyby", help="fly-by duration per scheme, distance and n")
    common(p)
    p.set_defaults(func=cmd_flyby)

    p = sub.add_parser("presets", help="list the city-pair distance presets")
    p.add_argument("--output", metavar="PATH")
    p.add_argument("--format", choices=("csv", "json"))
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("oracle-check", help="compare swapping against the density-matrix oracle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"qrepsat: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"qrepsat: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
