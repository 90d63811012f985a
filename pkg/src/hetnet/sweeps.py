"""Parameter sweeps, validation runs, and the built-in presets.

A sweep walks a Cartesian grid of parameter values, evaluates the
rate / energy metrics at every grid cell, and streams the rows to a
CSV file whose bytes are reproducible run to run.  A validation run
compares the closed-form coverage curves against the Monte Carlo
estimator on a beta grid and reports per-point agreement.
"""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Literal, Sequence

import numpy as np

from .config import REQUIRED_KEYS, build_config, canonicalize_raw, default_raw
from .coverage import QuadratureSpec, cue_coverage_curve, d2d_coverage_curve
from .errors import InvalidRange
from .metrics import (
    average_sum_rate,
    best_constant_rate,
    energy_efficiency,
    power_model_from_raw,
    total_power,
)
from .montecarlo import draw_sinr_samples, estimate_coverage

Engine = Literal["analytic", "mc", "both"]

CSV_COLUMNS = (
    "asr_bps",
    "ee_bpj",
    "rate_cue_bps",
    "rate_d2d_bps",
    "beta_c_star",
    "beta_d_star",
    "flags",
)

# Parameters that a sweep axis may vary.  Everything else in a config
# file is either structural (noise-figure switch, carrier frequency) or
# a sweep-level knob rather than a physical quantity.
SWEEPABLE_KEYS = frozenset(REQUIRED_KEYS) | {"f", "eta", "c_0", "c_1", "c_2"}

_MC_GAP_FLOOR = 0.02
_MC_GAP_CI_MULT = 3.0


def log_grid(lo: float, hi: float, points_per_decade: int) -> tuple[float, ...]:
    """Logarithmically spaced grid from ``lo`` to ``hi`` inclusive."""
    if lo <= 0.0 or hi <= lo:
        raise InvalidRange(f"need 0 < lo < hi, got [{lo}, {hi}]")
    if points_per_decade < 1:
        raise InvalidRange("points_per_decade must be >= 1")
    decades = math.log10(hi) - math.log10(lo)
    n = max(2, int(round(decades * points_per_decade)) + 1)
    return tuple(np.logspace(math.log10(lo), math.log10(hi), n).tolist())


def db_grid(lo_db: float, hi_db: float, points: int) -> tuple[float, ...]:
    """Evenly spaced grid in dB, returned in dB."""
    if points < 2 or hi_db <= lo_db:
        raise InvalidRange("need at least two points and hi_db > lo_db")
    return tuple(np.linspace(lo_db, hi_db, points).tolist())


@dataclass(frozen=True)
class Axis:
    """One swept parameter and the values it takes, in output order."""

    param: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.param not in SWEEPABLE_KEYS:
            raise InvalidRange(f"parameter {self.param!r} cannot be swept")
        if len(self.values) == 0:
            raise InvalidRange(f"axis {self.param!r} has no values")


@dataclass(frozen=True)
class SweepSpec:
    """Full description of a sweep run."""

    axes: tuple[Axis, ...]
    base: dict[str, float] = field(default_factory=dict)
    engine: Engine = "analytic"
    antenna_ratio: float | None = None
    trials: int = 2000
    seed: int = 0
    workers: int = 1
    fastpath: bool = False
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)

    def __post_init__(self) -> None:
        if self.engine not in ("analytic", "mc", "both"):
            raise InvalidRange(f"unknown engine {self.engine!r}")
        names = [ax.param for ax in self.axes]
        if len(set(names)) != len(names):
            raise InvalidRange("duplicate sweep axes")
        if self.antenna_ratio is not None:
            if self.antenna_ratio < 1.0:
                raise InvalidRange("antenna_ratio must be >= 1")
            if "t_c" in names:
                raise InvalidRange("t_c cannot be swept when antenna_ratio is set")
        if self.trials < 1:
            raise InvalidRange("trials must be >= 1")
        if self.workers < 1:
            raise InvalidRange("workers must be >= 1")

    @property
    def axis_names(self) -> tuple[str, ...]:
        return tuple(ax.param for ax in self.axes)

    @property
    def header(self) -> tuple[str, ...]:
        return self.axis_names + CSV_COLUMNS

    def cells(self) -> Iterable[dict[str, float]]:
        """Axis-value combinations in lexicographic (row-major) order."""
        for combo in itertools.product(*(ax.values for ax in self.axes)):
            yield dict(zip(self.axis_names, combo))


@dataclass(frozen=True)
class SweepRow:
    axis_values: tuple[float, ...]
    metrics: dict[str, float]
    flags: tuple[str, ...]


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: tuple[SweepRow, ...]


def _cell_raw(spec: SweepSpec, cell: dict[str, float]) -> dict[str, object]:
    raw = default_raw()
    raw.update(canonicalize_raw(spec.base))
    raw.update(cell)
    if spec.antenna_ratio is not None:
        raw["t_c"] = max(
            int(round(spec.antenna_ratio * float(raw["u_c"]))), int(raw["u_c"])
        )
    return raw


def _cell_seeds(seed: int, index: int) -> tuple[int, int]:
    """Independent Monte Carlo seeds for the two tiers of one grid cell."""
    root = np.random.SeedSequence(seed, spawn_key=(2, index))
    state = root.generate_state(2, np.uint64)
    return int(state[0]), int(state[1])


def _mc_coverage_fn(samples: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    ordered = np.sort(samples)
    n = ordered.size

    def fn(betas: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(ordered, np.atleast_1d(betas), side="left")
        return (n - idx) / n

    return fn


def _evaluate_cell(
    raw: dict[str, object],
    engine: Engine,
    quadrature: QuadratureSpec,
    trials: int,
    seeds: tuple[int, int],
    mc_workers: int,
    fastpath: bool,
) -> tuple[dict[str, float], tuple[str, ...]]:
    """Metrics for one grid cell; errors become flags, not aborts."""
    flags: set[str] = set()
    nan = float("nan")
    metrics = {col: nan for col in CSV_COLUMNS if col != "flags"}
    try:
        cfg = build_config(raw)
        pm = power_model_from_raw(raw)

        def analytic_cue(betas: np.ndarray) -> np.ndarray:
            values, converged, _ = cue_coverage_curve(cfg, betas, quadrature)
            if not bool(np.all(converged)):
                flags.add("quad_not_converged")
            return values

        def analytic_d2d(betas: np.ndarray) -> np.ndarray:
            return d2d_coverage_curve(cfg, betas)

        samples: dict[str, np.ndarray] = {}
        if engine in ("mc", "both"):
            samples["cue"] = draw_sinr_samples(
                cfg, "cue", trials, seeds[0], workers=mc_workers, fastpath=fastpath
            )
            samples["d2d"] = draw_sinr_samples(
                cfg, "d2d", trials, seeds[1], workers=mc_workers, fastpath=fastpath
            )

        if engine == "mc":
            cue_fn: Callable[[np.ndarray], np.ndarray] = _mc_coverage_fn(samples["cue"])
            d2d_fn: Callable[[np.ndarray], np.ndarray] = _mc_coverage_fn(samples["d2d"])
        else:
            cue_fn = analytic_cue
            d2d_fn = analytic_d2d

        rate_c = best_constant_rate(cfg, "cue", cue_fn)
        rate_d = best_constant_rate(cfg, "d2d", d2d_fn)

        if engine == "both":
            for tier, rate in (("cue", rate_c), ("d2d", rate_d)):
                est = _estimate_from_samples(samples[tier], rate.beta_star, trials)
                tol = max(_MC_GAP_FLOOR, _MC_GAP_CI_MULT * est[1])
                if abs(est[0] - rate.coverage) > tol:
                    flags.add(f"mc_mismatch_{tier}")

        asr = average_sum_rate(cfg, rate_c, rate_d)
        power = total_power(cfg, pm)
        metrics["asr_bps"] = asr
        metrics["ee_bpj"] = energy_efficiency(asr, power)
        metrics["rate_cue_bps"] = rate_c.rate
        metrics["rate_d2d_bps"] = rate_d.rate
        metrics["beta_c_star"] = rate_c.beta_star
        metrics["beta_d_star"] = rate_d.beta_star
    except Exception as exc:  # noqa: BLE001 - per-cell fault isolation
        flags.add(f"error:{type(exc).__name__}")
    return metrics, tuple(sorted(flags))


def _estimate_from_samples(
    samples: np.ndarray, beta: float, trials: int
) -> tuple[float, float]:
    exceed = int(np.count_nonzero(samples >= beta))
    p = exceed / trials
    ci = 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / trials)
    return p, ci


def _evaluate_cell_args(args: tuple) -> tuple[dict[str, float], tuple[str, ...]]:
    return _evaluate_cell(*args)


def run_sweep(spec: SweepSpec, out: str | None = None) -> SweepResult:
    """Evaluate every grid cell of ``spec``; optionally stream CSV to ``out``.

    Cells are evaluated in lexicographic axis order and written
    incrementally, so a partially complete file is still a valid CSV
    prefix.  Evaluation errors are recorded in the ``flags`` column of
    the affected row and do not stop the sweep.
    """
    cells = list(spec.cells())
    arglist = []
    for idx, cell in enumerate(cells):
        raw = _cell_raw(spec, cell)
        mc_workers = spec.workers if spec.engine in ("mc", "both") else 1
        arglist.append(
            (raw, spec.engine, spec.quadrature, spec.trials,
             _cell_seeds(spec.seed, idx), mc_workers, spec.fastpath)
        )

    parallel_cells = spec.workers > 1 and spec.engine == "analytic" and len(cells) > 1
    if parallel_cells:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            outcome = pool.map(_evaluate_cell_args, arglist)
            rows = _collect_rows(spec, cells, outcome, out)
    else:
        outcome = map(_evaluate_cell_args, arglist)
        rows = _collect_rows(spec, cells, outcome, out)
    return SweepResult(spec=spec, rows=tuple(rows))


def _collect_rows(
    spec: SweepSpec,
    cells: list[dict[str, float]],
    outcome: Iterable[tuple[dict[str, float], tuple[str, ...]]],
    out: str | None,
) -> list[SweepRow]:
    rows: list[SweepRow] = []
    writer = None
    handle = None
    if out is not None:
        handle = open(out, "w", newline="")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(spec.header)
    try:
        for cell, (metrics, flags) in zip(cells, outcome):
            row = SweepRow(
                axis_values=tuple(float(cell[name]) for name in spec.axis_names),
                metrics=metrics,
                flags=flags,
            )
            rows.append(row)
            if writer is not None:
                writer.writerow(_format_row(spec, row))
                handle.flush()
    finally:
        if handle is not None:
            handle.close()
    return rows


def _fmt_number(value: float) -> str:
    return f"{value:.17g}"


def _format_row(spec: SweepSpec, row: SweepRow) -> list[str]:
    cells = [_fmt_number(v) for v in row.axis_values]
    for col in CSV_COLUMNS:
        if col == "flags":
            cells.append(";".join(row.flags) if row.flags else "ok")
        else:
            cells.append(_fmt_number(row.metrics[col]))
    return cells


def emit_csv(result: SweepResult, path: str) -> None:
    """Write a completed sweep to ``path`` (same bytes as streaming)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(result.spec.header)
        for row in result.rows:
            writer.writerow(_format_row(result.spec, row))


def load_sweep_spec(path: str) -> SweepSpec:
    """Parse a sweep description from a TOML file.

    Top-level keys mirror :class:`SweepSpec` fields; the ``[config]``
    table holds base parameter overrides and each ``[[axes]]`` table
    defines one swept parameter with either an explicit ``values`` list
    or a ``log10_from`` / ``log10_to`` / ``points_per_decade`` triple.
    """
    try:
        import tomllib
    except ModuleNotFoundError:  # Python 3.10
        import tomli as tomllib

    with open(path, "rb") as handle:
        data = tomllib.load(handle)
    if not isinstance(data, dict):
        raise InvalidRange("sweep spec must be a TOML table")

    axes = []
    for entry in data.get("axes", []):
        param = entry.get("param")
        if not isinstance(param, str):
            raise InvalidRange("each axis needs a string 'param'")
        if "values" in entry:
            values = tuple(float(v) for v in entry["values"])
        elif {"log10_from", "log10_to"} <= entry.keys():
            values = log_grid(
                10.0 ** float(entry["log10_from"]),
                10.0 ** float(entry["log10_to"]),
                int(entry.get("points_per_decade", 25)),
            )
        else:
            raise InvalidRange(f"axis {param!r} needs 'values' or a log range")
        axes.append(Axis(param=param, values=values))

    base = data.get("config", {})
    if not isinstance(base, dict):
        raise InvalidRange("'config' must be a table")

    known = {"axes", "config", "engine", "antenna_ratio", "trials", "seed",
             "workers", "fastpath"}
    unknown = set(data) - known
    if unknown:
        raise InvalidRange(f"unknown sweep keys: {sorted(unknown)}")

    ratio = data.get("antenna_ratio")
    return SweepSpec(
        axes=tuple(axes),
        base=dict(base),
        engine=data.get("engine", "analytic"),
        antenna_ratio=None if ratio is None else float(ratio),
        trials=int(data.get("trials", 2000)),
        seed=int(data.get("seed", 0)),
        workers=int(data.get("workers", 1)),
        fastpath=bool(data.get("fastpath", False)),
    )


# ---------------------------------------------------------------------------
# Validation (closed form vs Monte Carlo)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValidationCase:
    """One coverage curve to check against the simulator."""

    label: str
    tier: Literal["d2d", "cue"]
    overrides: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class ValidationRow:
    beta_db: float
    analytic: float
    mc: float
    ci95: float
    mc_fast: float
    tolerance: float
    ok: bool

    @property
    def gap(self) -> float:
        return self.analytic - self.mc


@dataclass(frozen=True)
class ValidationReport:
    label: str
    tier: str
    rows: tuple[ValidationRow, ...]

    @property
    def passed(self) -> bool:
        return all(row.ok for row in self.rows)

    @property
    def max_abs_gap(self) -> float:
        return max(abs(row.gap) for row in self.rows)


def validate_case(
    case: ValidationCase,
    beta_db: Sequence[float],
    base: dict[str, float] | None = None,
    trials: int = 5000,
    seed: int = 0,
    workers: int = 1,
    quadrature: QuadratureSpec | None = None,
) -> ValidationReport:
    """Compare analytic and simulated coverage on a beta grid.

    The D2D check uses a fixed absolute tolerance of 0.03 per point.
    The cellular check allows max(0.02, 3 * CI95) per point, since its
    closed form is exact up to Monte Carlo noise.  The fast-path
    estimate (chi-squared channel shortcut) is reported alongside for
    diagnostics but does not affect the pass verdict.
    """
    raw = default_raw()
    if base:
        raw.update(canonicalize_raw(base))
    raw.update(canonicalize_raw(case.overrides))
    cfg = build_config(raw)
    quadrature = quadrature or QuadratureSpec()

    betas = np.asarray([10.0 ** (b / 10.0) for b in beta_db], dtype=float)
    if case.tier == "d2d":
        analytic = d2d_coverage_curve(cfg, betas)
    else:
        analytic, _, _ = cue_coverage_curve(cfg, betas, quadrature)

    seeds = np.random.SeedSequence(seed, spawn_key=(3,)).generate_state(2, np.uint64)
    exact = estimate_coverage(
        cfg, case.tier, betas, trials, int(seeds[0]), workers=workers
    )
    fast = estimate_coverage(
        cfg, case.tier, betas, trials, int(seeds[1]), workers=workers, fastpath=True
    )

    rows = []
    for i, b_db in enumerate(beta_db):
        est = exact[i]
        if case.tier == "d2d":
            tol = 0.03
        else:
            tol = max(_MC_GAP_FLOOR, _MC_GAP_CI_MULT * est.ci95)
        gap = abs(float(analytic[i]) - est.mean)
        rows.append(
            ValidationRow(
                beta_db=float(b_db),
                analytic=float(analytic[i]),
                mc=est.mean,
                ci95=est.ci95,
                mc_fast=fast[i].mean,
                tolerance=tol,
                ok=gap <= tol,
            )
        )
    return ValidationReport(label=case.label, tier=case.tier, rows=tuple(rows))


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Preset:
    """A named, reproducible run shipped with the package."""

    name: str
    kind: Literal["sweep", "validate"]
    description: str
    build: Callable[[], SweepSpec]  # sweep presets
    cases: tuple[ValidationCase, ...] = ()
    beta_db: tuple[float, ...] = ()


def _density_axis(points_per_decade: int = 25) -> Axis:
    return Axis("lambda_d", log_grid(1e-6, 1e-2, points_per_decade))


def _sweep_fig3a() -> SweepSpec:
    return SweepSpec(
        axes=(Axis("u_c", (1.0, 14.0)), _density_axis()),
        antenna_ratio=5.0,
    )


def _sweep_fig3b() -> SweepSpec:
    return SweepSpec(
        axes=(
            Axis("lambda_d", (1e-6, 1e-4)),
            Axis("u_c", tuple(float(u) for u in range(1, 15))),
        ),
        antenna_ratio=5.0,
    )


def _sweep_fig5() -> SweepSpec:
    return SweepSpec(
        axes=(_density_axis(),),
        base={"u_c": 14},
        antenna_ratio=5.0,
    )


def _sweep_fig6b() -> SweepSpec:
    return _sweep_fig3b()


def _tc_axis() -> Axis:
    return Axis("t_c", tuple(float(t) for t in range(4, 101, 4)))


def _sweep_fig8a() -> SweepSpec:
    return SweepSpec(
        axes=(Axis("lambda_d", (1e-6, 1e-4)), _tc_axis()),
        base={"u_c": 4},
    )


def _sweep_fig8b() -> SweepSpec:
    return _sweep_fig8a()


def _sweep_fig9() -> SweepSpec:
    return SweepSpec(
        axes=(Axis("p_d", (6.0, 13.0)), _density_axis(10)),
        base={"u_c": 14},
        antenna_ratio=5.0,
    )


def _sweep_fig10() -> SweepSpec:
    return SweepSpec(
        axes=(Axis("r_0_0", (35.0, 50.0)), _density_axis(10)),
        base={"u_c": 4, "t_c": 70},
    )


def _no_sweep() -> SweepSpec:
    raise InvalidRange("this preset is a validation run, not a sweep")


PRESETS: dict[str, Preset] = {
    "fig2a": Preset(
        name="fig2a",
        kind="validate",
        description="D2D coverage vs threshold, closed form against Monte Carlo "
        "(U_c=4, T_c=4, lambda_d=1e-5)",
        build=_no_sweep,
        cases=(
            ValidationCase(
                label="d2d",
                tier="d2d",
                overrides={"u_c": 4, "t_c": 4, "lambda_d": 1e-5},
            ),
        ),
        beta_db=db_grid(-10.0, 20.0, 31),
    ),
    "fig2b": Preset(
        name="fig2b",
        kind="validate",
        description="Cellular coverage vs threshold, closed form against Monte "
        "Carlo for T_c in {4, 70} at U_c=4, lambda_d=1e-5",
        build=_no_sweep,
        cases=(
            ValidationCase(
                label="cue_t4",
                tier="cue",
                overrides={"u_c": 4, "t_c": 4, "lambda_d": 1e-5},
            ),
            ValidationCase(
                label="cue_t70",
                tier="cue",
                overrides={"u_c": 4, "t_c": 70, "lambda_d": 1e-5},
            ),
        ),
        beta_db=db_grid(-10.0, 20.0, 31),
    ),
    "fig3a": Preset(
        name="fig3a",
        kind="sweep",
        description="Sum rate vs D2D density for U_c in {1, 14} with T_c = 5 U_c",
        build=_sweep_fig3a,
    ),
    "fig3b": Preset(
        name="fig3b",
        kind="sweep",
        description="Sum rate vs number of users (1..14, T_c = 5 U_c) at low and "
        "high D2D density",
        build=_sweep_fig3b,
    ),
    "fig5": Preset(
        name="fig5",
        kind="sweep",
        description="Sum rate and per-tier rates vs D2D density at U_c=14, T_c=70",
        build=_sweep_fig5,
    ),
    "fig6b": Preset(
        name="fig6b",
        kind="sweep",
        description="Energy efficiency vs number of users (1..14, T_c = 5 U_c) at "
        "low and high D2D density",
        build=_sweep_fig6b,
    ),
    "fig8a": Preset(
        name="fig8a",
        kind="sweep",
        description="Sum rate vs antenna count (4..100) at U_c=4 for low and high "
        "D2D density",
        build=_sweep_fig8a,
    ),
    "fig8b": Preset(
        name="fig8b",
        kind="sweep",
        description="Energy efficiency vs antenna count (4..100) at U_c=4 for low "
        "and high D2D density",
        build=_sweep_fig8b,
    ),
    "fig9": Preset(
        name="fig9",
        kind="sweep",
        description="Sum rate vs D2D density for D2D transmit power 6 and 13 dBm",
        build=_sweep_fig9,
    ),
    "fig10": Preset(
        name="fig10",
        kind="sweep",
        description="Sum rate vs D2D density for D2D link distance 35 and 50 m",
        build=_sweep_fig10,
    ),
}
