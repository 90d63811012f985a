"""Command line interface.

Verbs:

* ``coverage``  - coverage probability over a threshold grid
* ``sweep``     - run a preset or a TOML sweep spec, emit metrics CSV
* ``validate``  - closed form vs Monte Carlo agreement check
* ``presets``   - list the built-in runs

Exit codes: 0 success, 2 usage or configuration error, 3 validation
tolerance failure.  ``HETNET_WORKERS`` sets the default worker count.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import sys
from typing import Any, Sequence

import numpy as np

from .config import build_config, canonicalize_raw, default_raw, load_raw_file
from .coverage import QuadratureSpec, cue_coverage_curve, d2d_coverage_curve
from .errors import InvalidRange
from .montecarlo import estimate_coverage
from .sweeps import (
    PRESETS,
    ValidationReport,
    load_sweep_spec,
    run_sweep,
    validate_case,
)

_FMT = "{:.17g}"


def _resolve_workers(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("HETNET_WORKERS")
    if env is None:
        return 1
    try:
        workers = int(env)
    except ValueError as exc:
        raise InvalidRange(f"HETNET_WORKERS must be an integer, got {env!r}") from exc
    if workers < 1:
        raise InvalidRange(f"HETNET_WORKERS must be >= 1, got {workers}")
    return workers


def _parse_beta_grid(text: str) -> list[float]:
    parts = text.strip().split(":")
    if len(parts) != 3:
        raise InvalidRange(f"--beta-db expects LO:HI:N, got {text!r}")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1:
        raise InvalidRange("--beta-db point count must be >= 1")
    if n == 1:
        return [lo]
    if hi <= lo:
        raise InvalidRange("--beta-db needs HI > LO")
    return np.linspace(lo, hi, n).tolist()


def _parse_set(values: Sequence[str] | None) -> dict[str, Any]:
    overrides: dict[str, Any] = {}
    for item in values or ():
        if "=" not in item:
            raise InvalidRange(f"--set expects key=value, got {item!r}")
        key, text = item.split("=", 1)
        lowered = text.strip().lower()
        if lowered in ("true", "false"):
            overrides[key] = lowered == "true"
            continue
        try:
            overrides[key] = int(text)
        except ValueError:
            try:
                overrides[key] = float(text)
            except ValueError as exc:
                raise InvalidRange(f"cannot parse value in {item!r}") from exc
    return overrides


def _load_scenario(args: argparse.Namespace) -> dict[str, Any]:
    raw = default_raw()
    if args.config:
        raw.update(load_raw_file(args.config))
    raw.update(canonicalize_raw(_parse_set(getattr(args, "set", None))))
    return raw


def _open_out(path: str | None):
    if path is None:
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _cmd_coverage(args: argparse.Namespace) -> int:
    raw = _load_scenario(args)
    cfg = build_config(raw)
    workers = _resolve_workers(args.workers)
    beta_db = _parse_beta_grid(args.beta_db)
    betas = np.asarray([10.0 ** (b / 10.0) for b in beta_db])

    header = ["beta_db", "beta"]
    columns: list[list[str]] = [[_FMT.format(b) for b in beta_db],
                                [_FMT.format(b) for b in betas]]

    if args.engine in ("analytic", "both"):
        if args.tier == "d2d":
            values = d2d_coverage_curve(cfg, betas)
            flags = ["ok"] * len(beta_db)
        else:
            values, converged, _ = cue_coverage_curve(cfg, betas, QuadratureSpec())
            flags = ["ok" if c else "quad_not_converged" for c in converged]
        header.append("coverage_analytic")
        columns.append([_FMT.format(v) for v in values])

    if args.engine in ("mc", "both"):
        estimates = estimate_coverage(
            cfg, args.tier, betas, args.trials, args.seed,
            workers=workers, fastpath=args.fastpath_chisq,
        )
        header.extend(["coverage_mc", "ci95"])
        columns.append([_FMT.format(e.mean) for e in estimates])
        columns.append([_FMT.format(e.ci95) for e in estimates])

    if args.engine in ("analytic", "both"):
        header.append("flags")
        columns.append(flags)

    handle, owned = _open_out(args.out)
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow(row)
    finally:
        if owned:
            handle.close()
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    if bool(args.preset) == bool(args.spec):
        raise InvalidRange("pass exactly one of --preset or --spec")
    if args.preset:
        preset = PRESETS.get(args.preset)
        if preset is None:
            raise InvalidRange(f"unknown preset {args.preset!r}; see 'hetnet presets'")
        if preset.kind != "sweep":
            raise InvalidRange(
                f"preset {args.preset!r} is a validation run; use 'hetnet validate'"
            )
        spec = preset.build()
        default_name = f"{preset.name}.csv"
    else:
        spec = load_sweep_spec(args.spec)
        default_name = "sweep.csv"

    replacements: dict[str, Any] = {}
    if args.config:
        base = dict(spec.base)
        base.update(load_raw_file(args.config))
        replacements["base"] = base
    if args.engine is not None:
        replacements["engine"] = args.engine
    if args.trials is not None:
        replacements["trials"] = args.trials
    if args.seed is not None:
        replacements["seed"] = args.seed
    if args.fastpath_chisq:
        replacements["fastpath"] = True
    replacements["workers"] = _resolve_workers(args.workers)
    spec = dataclasses.replace(spec, **replacements)

    out = args.out or default_name
    result = run_sweep(spec, out=out)
    bad = sum(1 for row in result.rows if row.flags)
    print(f"wrote {len(result.rows)} rows to {out}"
          + (f" ({bad} rows flagged)" if bad else ""), file=sys.stderr)
    return 0


def _report_lines(report: ValidationReport) -> list[str]:
    lines = [f"case {report.label} (tier {report.tier})"]
    lines.append("  beta_db   analytic        mc      ci95   mc_fast       gap  ok")
    for row in report.rows:
        lines.append(
            f"  {row.beta_db:7.2f}   {row.analytic:8.5f}  {row.mc:8.5f}"
            f"  {row.ci95:8.5f}  {row.mc_fast:8.5f}  {row.gap:+8.5f}  "
            + ("yes" if row.ok else "NO")
        )
    verdict = "PASS" if report.passed else "FAIL"
    lines.append(f"  max |gap| = {report.max_abs_gap:.5f}  -> {verdict}")
    return lines


def _cmd_validate(args: argparse.Namespace) -> int:
    names = [args.preset] if args.preset else ["fig2a", "fig2b"]
    workers = _resolve_workers(args.workers)
    base = load_raw_file(args.config) if args.config else None
    reports: list[ValidationReport] = []
    for name in names:
        preset = PRESETS.get(name)
        if preset is None or preset.kind != "validate":
            raise InvalidRange(f"{name!r} is not a validation preset")
        for case in preset.cases:
            report = validate_case(
                case,
                preset.beta_db,
                base=base,
                trials=args.trials,
                seed=args.seed,
                workers=workers,
            )
            reports.append(report)
            print("\n".join(_report_lines(report)))

    if args.out:
        with open(args.out, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["case", "tier", "beta_db", "analytic", "mc", "ci95",
                             "mc_fast", "tolerance", "ok"])
            for report in reports:
                for row in report.rows:
                    writer.writerow([
                        report.label, report.tier,
                        _FMT.format(row.beta_db), _FMT.format(row.analytic),
                        _FMT.format(row.mc), _FMT.format(row.ci95),
                        _FMT.format(row.mc_fast), _FMT.format(row.tolerance),
                        "yes" if row.ok else "no",
                    ])

    if all(r.passed for r in reports):
        print("validation: PASS")
        return 0
    print("validation: FAIL")
    return 3


def _cmd_presets(args: argparse.Namespace) -> int:
    width = max(len(name) for name in PRESETS)
    for name, preset in PRESETS.items():
        print(f"{name:<{width}}  {preset.kind:<8}  {preset.description}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetnet",
        description="Coverage, rate, and energy metrics for a massive MIMO "
        "cell underlaid with device-to-device pairs.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(p: argparse.ArgumentParser, engine_default: str | None):
        p.add_argument("--config", help="TOML file with scenario parameters")
        p.add_argument("--engine", choices=["analytic", "mc", "both"],
                       default=engine_default)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--out", help="output CSV path")
        p.add_argument("--workers", type=int, default=None,
                       help="worker processes (default: HETNET_WORKERS or 1)")
        p.add_argument("--fastpath-chisq", action="store_true",
                       help="sample effective channel gains directly instead of "
                       "running the precoder")

    cov = sub.add_parser("coverage", help="coverage probability on a threshold grid")
    add_common(cov, "analytic")
    cov.add_argument("--tier", choices=["d2d", "cue"], required=True)
    cov.add_argument("--beta-db", default="-10:20:31",
                     help="threshold grid LO:HI:N in dB (default -10:20:31); "
                     "use --beta-db=-10:20:31 when LO is negative")
    cov.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override one scenario parameter")
    cov.set_defaults(func=_cmd_coverage)

    swp = sub.add_parser("sweep", help="run a sweep preset or TOML spec")
    add_common(swp, None)
    swp.add_argument("--preset", help="preset name (see 'hetnet presets')")
    swp.add_argument("--spec", help="TOML sweep spec path")
    swp.set_defaults(func=_cmd_sweep)

    val = sub.add_parser("validate", help="closed form vs Monte Carlo check")
    add_common(val, None)
    val.add_argument("--preset", choices=["fig2a", "fig2b"],
                     help="run one validation preset (default: both)")
    val.set_defaults(func=_cmd_validate)

    lst = sub.add_parser("presets", help="list built-in runs")
    lst.set_defaults(func=_cmd_presets)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "trials", None) is None and args.verb in ("coverage", "validate"):
        args.trials = 5000 if args.verb == "validate" else 2000
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
