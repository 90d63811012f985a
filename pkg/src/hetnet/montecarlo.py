"""Monte Carlo reference simulator.

Independent of the closed forms: it draws an explicit network geometry and
explicit fading per trial and evaluates the two SINR definitions directly.

Geometry per trial: the BS sits at the origin; the typical evaluation point
(D2D receiver or cellular user) is uniform on the cell disc of radius R;
interfering D2D transmitters form a Poisson field on a disc of radius
SIM_DISC_FACTOR * R around the BS, so interference from well beyond the
cell border is represented. The typical D2D pair is not part of the Poisson
field (its transmitter is added separately at distance d2d_pair_distance),
while the cellular user sees every D2D transmitter with no exclusion.

Reproducibility: trial t of a run with seed S uses two dedicated generator
streams derived as SeedSequence(S, spawn_key=(t, 0)) for geometry and
(t, 1) for fading, so results are bit-identical for a given (seed, trials)
regardless of how trials are chunked across workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig, derive_constants
from .errors import InvalidRange, PreconditionViolated, RankDeficient

SIM_DISC_FACTOR = 10.0


@dataclass(frozen=True)
class NetworkRealization:
    """One draw of the network geometry (positions in metres, BS at origin)."""

    tier: str
    tx_positions: np.ndarray          # (n, 2) interfering D2D transmitters
    rx_offsets: np.ndarray            # (n, 2) their receivers, relative to each Tx
    typical_rx: np.ndarray | None     # (2,) D2D tier only
    typical_tx: np.ndarray | None     # (2,) D2D tier only
    cue_position: np.ndarray | None   # (2,) cellular tier only


@dataclass(frozen=True)
class ChannelDraw:
    """One draw of the fading; entries are unit-variance complex Gaussians."""

    h: np.ndarray                 # (U_c, T_c) BS-to-CUE channels (sets the precoder)
    f: np.ndarray | None          # (T_c,) BS to typical D2D receiver
    g00: complex | None           # typical D2D link fade
    g: np.ndarray | None          # (n,) interferer fades at the typical D2D receiver
    e: np.ndarray | None          # (n,) interferer fades at the cellular user


@dataclass(frozen=True)
class McEstimate:
    """Empirical exceedance frequency at one threshold."""

    beta: float
    mean: float
    ci95: float
    trials: int
    seed: int


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    z = rng.standard_normal(tuple(shape) + (2,))
    return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)


def _check_tier(tier: str) -> None:
    if tier not in ("d2d", "cue"):
        raise InvalidRange(f"tier must be 'd2d' or 'cue', got {tier!r}")


def sample_network(cfg: SystemConfig, rng: np.random.Generator, tier: str) -> NetworkRealization:
    """Draw one network geometry. Consumes rng in a fixed, documented order."""
    _check_tier(tier)
    typical_r = cfg.radius * math.sqrt(rng.uniform())
    typical_angle = rng.uniform(0.0, 2.0 * math.pi)
    point = np.array([typical_r * math.cos(typical_angle),
                      typical_r * math.sin(typical_angle)])
    pair_angle = rng.uniform(0.0, 2.0 * math.pi) if tier == "d2d" else 0.0

    sim_radius = SIM_DISC_FACTOR * cfg.radius
    n = rng.poisson(cfg.lambda_d * math.pi * sim_radius ** 2)
    radii = sim_radius * np.sqrt(rng.uniform(size=n))
    angles = rng.uniform(0.0, 2.0 * math.pi, size=n)
    tx = np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])
    offset_angles = rng.uniform(0.0, 2.0 * math.pi, size=n)
    rx_offsets = cfg.d2d_pair_distance * np.column_stack(
        [np.cos(offset_angles), np.sin(offset_angles)])

    if tier == "d2d":
        typical_tx = point + cfg.d2d_pair_distance * np.array(
            [math.cos(pair_angle), math.sin(pair_angle)])
        return NetworkRealization(tier=tier, tx_positions=tx, rx_offsets=rx_offsets,
                                  typical_rx=point, typical_tx=typical_tx, cue_position=None)
    return NetworkRealization(tier=tier, tx_positions=tx, rx_offsets=rx_offsets,
                              typical_rx=None, typical_tx=None, cue_position=point)


def sample_channels(cfg: SystemConfig, rng: np.random.Generator, n_interferers: int,
                    tier: str) -> ChannelDraw:
    """Draw the fading for one trial. Consumes rng in a fixed, documented order."""
    _check_tier(tier)
    h = _complex_normal(rng, (cfg.n_cue, cfg.n_antennas))
    if tier == "d2d":
        f = _complex_normal(rng, (cfg.n_antennas,))
        g00 = complex(_complex_normal(rng, ()))
        g = _complex_normal(rng, (n_interferers,))
        return ChannelDraw(h=h, f=f, g00=g00, g=g, e=None)
    e = _complex_normal(rng, (n_interferers,))
    return ChannelDraw(h=h, f=None, g00=None, g=None, e=e)


def zf_precoder(h: np.ndarray) -> np.ndarray:
    """Unit-norm zero-forcing beams for stacked user channels.

    h has shape (U_c, T_c) (or a leading batch dimension); the result v has
    shape (T_c, U_c) with h[k]^H v[:, j] = 0 for k != j and unit columns.
    """
    h = np.asarray(h)
    if h.ndim < 2:
        raise InvalidRange(f"zf_precoder expects at least a (U, T) array, got shape {h.shape}")
    u, t = h.shape[-2], h.shape[-1]
    if u > t:
        raise RankDeficient(f"cannot zero-force {u} users with {t} antennas")
    hc = np.conj(h)
    gram = hc @ np.swapaxes(h, -2, -1)
    try:
        steering = np.linalg.solve(gram, hc)
    except np.linalg.LinAlgError as exc:
        raise RankDeficient("stacked user channels are rank deficient") from exc
    w = np.conj(np.swapaxes(steering, -2, -1))
    norms = np.linalg.norm(w, axis=-2, keepdims=True)
    if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
        raise RankDeficient("stacked user channels are rank deficient")
    return w / norms


def _sinr_d2d_value(cfg: SystemConfig, der, dist_bs: float, interferer_dists: np.ndarray,
                    signal_gain: float, leakage: float, interferer_gains: np.ndarray) -> float:
    signal = cfg.p_d * cfg.d2d_pair_distance ** (-cfg.alpha_d) * signal_gain
    i_bs = der.zeta * dist_bs ** (-cfg.alpha_c) / cfg.a_d * leakage
    i_d2d = cfg.p_d * float(np.dot(interferer_dists ** (-cfg.alpha_d), interferer_gains))
    denom = i_bs + i_d2d + cfg.noise_power / cfg.a_d
    return signal / denom if denom > 0.0 else math.inf


def _sinr_cue_value(cfg: SystemConfig, der, dist_bs: float, interferer_dists: np.ndarray,
                    beam_gain: float, interferer_gains: np.ndarray) -> float:
    i_d2d = cfg.p_d * float(np.dot(interferer_dists ** (-cfg.alpha_d), interferer_gains))
    denom = (cfg.a_d / der.zeta) * dist_bs ** cfg.alpha_c * (i_d2d + cfg.noise_power / cfg.a_d)
    return beam_gain / denom if denom > 0.0 else math.inf


def sinr_d2d(cfg: SystemConfig, real: NetworkRealization, ch: ChannelDraw) -> float:
    """SINR of the typical D2D receiver for one realization and fading draw."""
    if real.tier != "d2d":
        raise PreconditionViolated("sinr_d2d needs a 'd2d' realization")
    v = zf_precoder(ch.h)
    leakage = float(np.linalg.norm(np.conj(ch.f) @ v) ** 2)
    dists = np.linalg.norm(real.tx_positions - real.typical_rx, axis=1)
    return _sinr_d2d_value(cfg, derive_constants(cfg), float(np.linalg.norm(real.typical_rx)),
                           dists, abs(ch.g00) ** 2, leakage, np.abs(ch.g) ** 2)


def sinr_cue(cfg: SystemConfig, real: NetworkRealization, ch: ChannelDraw) -> float:
    """SINR of the typical cellular user for one realization and fading draw."""
    if real.tier != "cue":
        raise PreconditionViolated("sinr_cue needs a 'cue' realization")
    v = zf_precoder(ch.h)
    beam_gain = abs(np.vdot(ch.h[0], v[:, 0])) ** 2
    dists = np.linalg.norm(real.tx_positions - real.cue_position, axis=1)
    return _sinr_cue_value(cfg, derive_constants(cfg), float(np.linalg.norm(real.cue_position)),
                           dists, beam_gain, np.abs(ch.e) ** 2)


def _trial_sinr(cfg: SystemConfig, tier: str, seed: int, trial: int, fastpath: bool) -> float:
    geom_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial, 0)))
    fade_rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial, 1)))
    real = sample_network(cfg, geom_rng, tier)
    n = real.tx_positions.shape[0]
    der = derive_constants(cfg)
    surplus = cfg.n_antennas - cfg.n_cue
    if fastpath:
        # Effective-gain shortcut: the exact beam gain is Gamma(T_c-U_c+1, 1)
        # and the leakage power is modelled as Gamma(U_c, 1).
        if tier == "d2d":
            leakage = fade_rng.gamma(cfg.n_cue)
            signal_gain = fade_rng.exponential()
            gains = fade_rng.exponential(size=n)
            dists = np.linalg.norm(real.tx_positions - real.typical_rx, axis=1)
            return _sinr_d2d_value(cfg, der, float(np.linalg.norm(real.typical_rx)),
                                   dists, signal_gain, leakage, gains)
        beam_gain = fade_rng.gamma(surplus + 1)
        gains = fade_rng.exponential(size=n)
        dists = np.linalg.norm(real.tx_positions - real.cue_position, axis=1)
        return _sinr_cue_value(cfg, der, float(np.linalg.norm(real.cue_position)),
                               dists, beam_gain, gains)
    ch = sample_channels(cfg, fade_rng, n, tier)
    return sinr_d2d(cfg, real, ch) if tier == "d2d" else sinr_cue(cfg, real, ch)


def _sample_range(args) -> np.ndarray:
    cfg, tier, seed, lo, hi, fastpath = args
    out = np.empty(hi - lo)
    for idx in range(lo, hi):
        out[idx - lo] = _trial_sinr(cfg, tier, seed, idx, fastpath)
    return out


def draw_sinr_samples(cfg: SystemConfig, tier: str, trials: int, seed: int,
                      workers: int = 1, fastpath: bool = False) -> np.ndarray:
    """One SINR sample per trial, bit-identical for fixed (seed, trials)."""
    _check_tier(tier)
    if not (isinstance(trials, int) and trials >= 1):
        raise InvalidRange(f"trials must be an integer >= 1, got {trials!r}")
    if not (isinstance(seed, int) and seed >= 0):
        raise InvalidRange(f"seed must be a nonnegative integer, got {seed!r}")
    if not (isinstance(workers, int) and workers >= 1):
        raise InvalidRange(f"workers must be an integer >= 1, got {workers!r}")
    if workers == 1 or trials < 2 * workers:
        return _sample_range((cfg, tier, seed, 0, trials, fastpath))
    chunk = -(-trials // workers)
    ranges = [(cfg, tier, seed, lo, min(lo + chunk, trials), fastpath)
              for lo in range(0, trials, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_sample_range, ranges))
    return np.concatenate(parts)


def estimate_coverage(cfg: SystemConfig, tier: str, betas, trials: int, seed: int,
                      workers: int = 1, fastpath: bool = False) -> list[McEstimate]:
    """Empirical P(SINR >= beta) with a 95% normal-approximation interval."""
    beta_arr = np.atleast_1d(np.asarray(betas, dtype=float))
    if np.any(~np.isfinite(beta_arr)) or np.any(beta_arr < 0):
        raise InvalidRange("beta grid must be finite and nonnegative")
    samples = np.sort(draw_sinr_samples(cfg, tier, trials, seed, workers, fastpath))
    out = []
    for beta in beta_arr:
        exceed = trials - int(np.searchsorted(samples, beta, side="left"))
        mean = exceed / trials
        ci95 = 1.96 * math.sqrt(mean * (1.0 - mean) / trials)
        out.append(McEstimate(beta=float(beta), mean=mean, ci95=ci95,
                              trials=trials, seed=seed))
    return out
