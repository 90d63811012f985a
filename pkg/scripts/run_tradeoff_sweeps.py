#!/usr/bin/env python
"""Regenerate every tradeoff curve preset as CSV files.

Runs the analytic engine for all sweep presets (fig3a, fig3b, fig5,
fig6b, fig8a, fig8b, fig9, fig10) and writes one CSV per preset into
the chosen output directory.
"""

from __future__ import annotations

import argparse
import pathlib
import sys
import time

from hetnet.sweeps import PRESETS, run_sweep


def run(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--only", nargs="*", help="subset of preset names")
    args = parser.parse_args(argv)

    out_dir = pathlib.Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    names = args.only or [n for n, p in PRESETS.items() if p.kind == "sweep"]
    for name in names:
        preset = PRESETS.get(name)
        if preset is None or preset.kind != "sweep":
            print(f"skipping {name!r}: not a sweep preset", file=sys.stderr)
            continue
        spec = preset.build()
        if args.workers > 1:
            import dataclasses

            spec = dataclasses.replace(spec, workers=args.workers)
        path = out_dir / f"{name}.csv"
        start = time.perf_counter()
        result = run_sweep(spec, out=str(path))
        elapsed = time.perf_counter() - start
        flagged = sum(1 for row in result.rows if row.flags)
        note = f" ({flagged} flagged)" if flagged else ""
        print(f"{name}: {len(result.rows)} rows in {elapsed:.1f}s -> {path}{note}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
