"""Rate and energy metrics built on top of the coverage curves.

A tier's average rate is the best constant-rate operating point
sup_beta B_w * log2(1 + beta) * P_cov(beta): the transmitter picks one SINR
threshold and only trials above it count. The optimization runs a coarse
log-spaced grid followed by golden-section refinement, so the supplied
coverage function must accept a numpy array of thresholds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Mapping

import numpy as np

from .config import SystemConfig, canonicalize_raw
from .errors import DomainError, InvalidRange, MissingParameter, UnboundedObjective
from .specfun import sinc_norm

GRID_LO = 1e-4
GRID_HI = 1e6
POINTS_PER_DECADE = 25
REFINE_REL_TOL = 1e-4
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class PowerModel:
    """Affine network power model.

    Transmit power is scaled by 1/eta (amplifier efficiency); c_0 is static
    BS consumption, c_1 is per BS antenna, c_2 per active user device. Each
    D2D pair contributes two devices, each cellular user one.
    """

    eta: float
    c_0: float
    c_1: float
    c_2: float

    def __post_init__(self) -> None:
        if not (0.0 < self.eta <= 1.0):
            raise InvalidRange(f"eta must be in (0, 1], got {self.eta!r}")
        for name in ("c_0", "c_1", "c_2"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0):
                raise InvalidRange(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class RateResult:
    """Optimized constant-rate operating point for one tier."""

    beta_star: float      # maximizing SINR threshold
    rate: float           # B_w * log2(1 + beta_star) * coverage [bit/s]
    coverage: float       # coverage probability at beta_star


def power_model_from_raw(raw: Mapping[str, Any]) -> PowerModel:
    """PowerModel from the same raw boundary map build_config consumes."""
    canon = canonicalize_raw(raw)
    missing = sorted({"eta", "c_0", "c_1", "c_2"} - canon.keys())
    if missing:
        raise MissingParameter(f"missing power-model parameter(s): {', '.join(missing)}")
    return PowerModel(eta=float(canon["eta"]), c_0=float(canon["c_0"]),
                      c_1=float(canon["c_1"]), c_2=float(canon["c_2"]))


def best_constant_rate(cfg: SystemConfig, tier: str,
                       coverage_fn: Callable[[np.ndarray], np.ndarray]) -> RateResult:
    """Maximize B_w * log2(1 + beta) * coverage_fn(beta) over beta > 0.

    coverage_fn must be vectorized over a numpy array of thresholds. Raises
    UnboundedObjective when coverage has not decayed at the top of the grid,
    which signals a configuration with effectively no interference or noise.
    """
    if tier not in ("d2d", "cue"):
        raise InvalidRange(f"tier must be 'd2d' or 'cue', got {tier!r}")
    decades = math.log10(GRID_HI / GRID_LO)
    grid = np.logspace(math.log10(GRID_LO), math.log10(GRID_HI),
                       int(round(decades * POINTS_PER_DECADE)) + 1)
    cov = np.asarray(coverage_fn(grid), dtype=float)
    if cov.shape != grid.shape:
        raise InvalidRange("coverage_fn must return one value per threshold")
    if cov[-1] >= 1.0 - 1e-12:
        raise UnboundedObjective(
            f"coverage is still {cov[-1]!r} at beta = {GRID_HI:g}; "
            "the rate objective grows without bound")
    objective = cfg.bandwidth * np.log2(1.0 + grid) * cov
    k = int(np.argmax(objective))

    def value(log_beta: float) -> tuple[float, float]:
        beta = math.exp(log_beta)
        c = float(np.asarray(coverage_fn(np.asarray([beta])))[0])
        return cfg.bandwidth * math.log2(1.0 + beta) * c, c

    lo = math.log(grid[max(k - 1, 0)])
    hi = math.log(grid[min(k + 1, grid.size - 1)])
    best_log = math.log(grid[k])
    best_val = float(objective[k])
    best_cov = float(cov[k])
    # Golden-section on log(beta); the window is one grid cell on each side.
    a, b = lo, hi
    c1 = b - _GOLDEN * (b - a)
    c2 = a + _GOLDEN * (b - a)
    f1, cov1 = value(c1)
    f2, cov2 = value(c2)
    while (b - a) > math.log1p(REFINE_REL_TOL):
        if f1 < f2:
            a, c1, f1, cov1 = c1, c2, f2, cov2
            c2 = a + _GOLDEN * (b - a)
            f2, cov2 = value(c2)
        else:
            b, c2, f2, cov2 = c2, c1, f1, cov1
            c1 = b - _GOLDEN * (b - a)
            f1, cov1 = value(c1)
    for log_beta, val, covp in ((c1, f1, cov1), (c2, f2, cov2)):
        if val > best_val:
            best_log, best_val, best_cov = log_beta, val, covp
    return RateResult(beta_star=math.exp(best_log), rate=best_val, coverage=best_cov)


def average_sum_rate(cfg: SystemConfig, rate_cue: RateResult, rate_d2d: RateResult) -> float:
    """Network sum rate: U_c cellular beams plus the mean D2D pair count."""
    n_pairs = cfg.lambda_d * math.pi * cfg.radius ** 2
    return cfg.n_cue * rate_cue.rate + n_pairs * rate_d2d.rate


def total_power(cfg: SystemConfig, pm: PowerModel) -> float:
    """Mean consumed network power [W] under the affine model."""
    n_pairs = cfg.lambda_d * math.pi * cfg.radius ** 2
    transmit = (cfg.p_c + n_pairs * cfg.p_d) / pm.eta
    circuits = pm.c_0 + cfg.n_antennas * pm.c_1 + (cfg.n_cue + 2.0 * n_pairs) * pm.c_2
    return transmit + circuits


def energy_efficiency(asr: float, power: float) -> float:
    """Bits per joule."""
    if power <= 0.0 or not math.isfinite(power):
        raise DomainError(f"total power must be positive and finite, got {power!r}")
    return asr / power


def optimal_d2d_density(cfg: SystemConfig, beta_d: float) -> float:
    """Density maximizing the D2D area rate at a fixed threshold.

    The D2D-only area sum rate is proportional to lambda * exp(-xi * lambda)
    with xi = pi * d^2 * beta^(2/alpha_d) / sinc(2/alpha_d); the maximizer
    is 1/xi.
    """
    if not (isinstance(beta_d, (int, float)) and math.isfinite(beta_d) and beta_d > 0):
        raise DomainError(f"beta_d must be positive and finite, got {beta_d!r}")
    mu = 2.0 / cfg.alpha_d
    return sinc_norm(mu) / (math.pi * cfg.d2d_pair_distance ** 2) * beta_d ** (-mu)
