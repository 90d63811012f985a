#!/usr/bin/env python
"""Run both validation presets and write their CSV reports.

Equivalent to::

    hetnet validate --out validation.csv

but kept as a script so the runs can be tweaked in one place (trial
count, output directory, worker processes).
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from hetnet.cli import main as cli_main


def run(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args(argv)

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    status = 0
    for preset in ("fig2a", "fig2b"):
        cli_args = [
            "validate", "--preset", preset,
            "--trials", str(args.trials),
            "--seed", str(args.seed),
            "--out", str(out_dir / f"{preset}_validation.csv"),
        ]
        if args.workers is not None:
            cli_args += ["--workers", str(args.workers)]
        status = max(status, cli_main(cli_args))
    return status


if __name__ == "__main__":
    sys.exit(run())
