"""System parameters, unit plumbing and derived constants.

Internally everything is SI: watts, metres, hertz. Decibel values appear
only at the boundary (raw parameter maps, config files, CLI output). A raw
map uses the measurement-campaign units people actually write down: transmit
powers in dBm, attenuations and the noise figure in dB, bandwidth in MHz,
carrier frequency in GHz, distances in metres.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

from .errors import DomainError, InvalidRange, MissingParameter


def db_to_linear(x_db: float) -> float:
    """Power ratio from decibels."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    """Decibels from a positive power ratio."""
    if x <= 0.0:
        raise DomainError(f"cannot express nonpositive ratio {x!r} in dB")
    return 10.0 * math.log10(x)


def dbm_to_watts(x_dbm: float) -> float:
    return 10.0 ** ((x_dbm - 30.0) / 10.0)


def watts_to_dbm(w: float) -> float:
    if w <= 0.0:
        raise DomainError(f"cannot express nonpositive power {w!r} in dBm")
    return 10.0 * math.log10(w) + 30.0


@dataclass(frozen=True)
class SystemConfig:
    """Physical description of one cell and its D2D underlay (SI units)."""

    p_c: float                # BS transmit power [W], shared by the U_c beams
    p_d: float                # per-transmitter D2D power [W]
    radius: float             # cell radius [m]
    bandwidth: float          # system bandwidth [Hz]
    noise_power: float        # effective noise power at the receiver [W]
    d2d_pair_distance: float  # fixed Tx-Rx separation of a D2D pair [m]
    alpha_c: float            # cellular path-loss exponent
    alpha_d: float            # D2D path-loss exponent
    a_c: float                # cellular attenuation at 1 m (linear, < 1)
    a_d: float                # D2D attenuation at 1 m (linear, < 1)
    n_cue: int                # scheduled cellular users U_c
    n_antennas: int           # BS antennas T_c
    lambda_d: float           # density of D2D transmitters [1/m^2]
    carrier_frequency: float = 2.0e9  # recorded for the data sheet; no formula uses it

    def __post_init__(self) -> None:
        for name in ("p_c", "p_d", "radius", "bandwidth", "noise_power",
                     "d2d_pair_distance", "a_c", "a_d", "carrier_frequency"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise InvalidRange(f"{name} must be a finite positive number, got {value!r}")
        for name in ("alpha_c", "alpha_d"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 2):
                raise InvalidRange(f"{name} must exceed 2 (finite mean interference), got {value!r}")
        if not (isinstance(self.n_cue, int) and self.n_cue >= 1):
            raise InvalidRange(f"n_cue must be an integer >= 1, got {self.n_cue!r}")
        if not (isinstance(self.n_antennas, int) and self.n_antennas >= self.n_cue):
            raise InvalidRange(
                f"n_antennas must be an integer >= n_cue={self.n_cue}, got {self.n_antennas!r}")
        if not (isinstance(self.lambda_d, (int, float))
                and math.isfinite(self.lambda_d) and self.lambda_d >= 0):
            raise InvalidRange(f"lambda_d must be >= 0, got {self.lambda_d!r}")
        if self.d2d_pair_distance >= self.radius:
            raise InvalidRange(
                f"d2d_pair_distance {self.d2d_pair_distance!r} must be below radius {self.radius!r}")


@dataclass(frozen=True)
class DerivedConstants:
    """Quantities every coverage expression reuses.

    zeta        per-beam received-power scale A_c * P_c / U_c
    kappa       BS-to-D2D interference scale zeta / (P_d * A_d * d^-alpha_d)
    c_d         PPP interference constant pi * P_d^(2/alpha_d) / sinc(2/alpha_d)
    gamma_bar_d mean D2D link SNR A_d * d^-alpha_d * P_d / N_0
    """

    zeta: float
    kappa: float
    c_d: float
    gamma_bar_d: float


def derive_constants(cfg: SystemConfig) -> DerivedConstants:
    mu = 2.0 / cfg.alpha_d
    sinc = math.sin(math.pi * mu) / (math.pi * mu)
    zeta = cfg.a_c * cfg.p_c / cfg.n_cue
    link = cfg.p_d * cfg.a_d * cfg.d2d_pair_distance ** (-cfg.alpha_d)
    return DerivedConstants(
        zeta=zeta,
        kappa=zeta / link,
        c_d=math.pi * cfg.p_d ** mu / sinc,
        gamma_bar_d=link / cfg.noise_power,
    )


# Raw-map keys. Values are in the boundary units documented in the module
# docstring; `u_c`, `t_c`, `lambda_d`, `eta`, `c_0`..`c_2` and `mc` are plain
# numbers. `apply_noise_figure` folds `f` into the effective noise power.
REQUIRED_KEYS = frozenset({
    "p_c", "p_d", "r", "b_w", "n_0", "r_0_0",
    "alpha_c", "alpha_d", "a_c", "a_d", "u_c", "t_c", "lambda_d",
})
OPTIONAL_KEYS = frozenset({
    "f", "f_c", "apply_noise_figure", "eta", "c_0", "c_1", "c_2", "mc",
})
_ALIASES = {"r00": "r_0_0", "lambda": "lambda_d"}

# Default parameter set (the values every experiment in this package starts
# from). `u_c`, `t_c` and `lambda_d` are scenario choices, not physical
# constants; the entries here are the baseline scenario.
TABLE_DEFAULTS: dict[str, float] = {
    "p_d": 6.0,        # dBm
    "p_c": 30.0,       # dBm
    "r": 500.0,        # m
    "b_w": 20.0,       # MHz
    "n_0": -131.0,     # dBm
    "f": 5.0,          # dB receiver noise figure
    "f_c": 2.0,        # GHz
    "r_0_0": 35.0,     # m
    "alpha_d": 3.0,
    "alpha_c": 3.67,
    "a_d": 38.84,      # dB attenuation at 1 m
    "a_c": 30.55,      # dB attenuation at 1 m
    "eta": 0.3,        # PA efficiency
    "c_0": 5.0,        # W, static BS circuit power
    "c_1": 0.5,        # W per BS antenna
    "c_2": 0.1,        # W per active UE device
    "mc": 5000,        # default Monte Carlo trials
}
DEFAULT_SCENARIO: dict[str, float] = {"u_c": 4, "t_c": 20, "lambda_d": 1e-5}


def table_defaults() -> dict[str, float]:
    """Copy of the default raw parameter map (no scenario keys)."""
    return dict(TABLE_DEFAULTS)


def default_raw() -> dict[str, float]:
    """Defaults plus the baseline scenario; ready for build_config."""
    merged = table_defaults()
    merged.update(DEFAULT_SCENARIO)
    return merged


def canonicalize_raw(raw: Mapping[str, Any]) -> dict[str, Any]:
    """Lower-case keys, resolve aliases, reject unknown or duplicate keys."""
    canon: dict[str, Any] = {}
    unknown: list[str] = []
    for key, value in raw.items():
        name = str(key).strip().lower()
        name = _ALIASES.get(name, name)
        if name not in REQUIRED_KEYS and name not in OPTIONAL_KEYS:
            unknown.append(str(key))
            continue
        if name in canon:
            raise InvalidRange(f"parameter {name!r} given more than once")
        canon[name] = value
    if unknown:
        raise InvalidRange(f"unrecognized parameter(s): {', '.join(sorted(unknown))}")
    return canon


def _as_int(name: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidRange(f"{name} must be an integer, got {value!r}")
    if float(value) != int(value):
        raise InvalidRange(f"{name} must be an integer, got {value!r}")
    return int(value)


def build_config(raw: Mapping[str, Any]) -> SystemConfig:
    """SystemConfig from a raw boundary-unit map.

    Raises MissingParameter when a required key is absent and InvalidRange
    for unknown keys or out-of-range values.
    """
    canon = canonicalize_raw(raw)
    missing = sorted(REQUIRED_KEYS - canon.keys())
    if missing:
        raise MissingParameter(f"missing required parameter(s): {', '.join(missing)}")

    noise_dbm = float(canon["n_0"])
    if canon.get("apply_noise_figure", True):
        noise_dbm += float(canon.get("f", 0.0))
    return SystemConfig(
        p_c=dbm_to_watts(float(canon["p_c"])),
        p_d=dbm_to_watts(float(canon["p_d"])),
        radius=float(canon["r"]),
        bandwidth=float(canon["b_w"]) * 1e6,
        noise_power=dbm_to_watts(noise_dbm),
        d2d_pair_distance=float(canon["r_0_0"]),
        alpha_c=float(canon["alpha_c"]),
        alpha_d=float(canon["alpha_d"]),
        a_c=db_to_linear(-float(canon["a_c"])),
        a_d=db_to_linear(-float(canon["a_d"])),
        n_cue=_as_int("u_c", canon["u_c"]),
        n_antennas=_as_int("t_c", canon["t_c"]),
        lambda_d=float(canon["lambda_d"]),
        carrier_frequency=float(canon.get("f_c", 2.0)) * 1e9,
    )


def load_raw_file(path: str) -> dict[str, Any]:
    """Parse a flat TOML parameter file into a raw map (keys not validated here)."""
    try:
        import tomllib  # Python >= 3.11
    except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
        import tomli as tomllib
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    for key, value in data.items():
        if isinstance(value, (dict, list)):
            raise InvalidRange(f"parameter file must be flat key = value; {key!r} is a {type(value).__name__}")
    return data


def load_config(path: str, overrides: Mapping[str, Any] | None = None) -> SystemConfig:
    """Build a SystemConfig from defaults, a parameter file, then overrides."""
    merged = default_raw()
    merged.update(canonicalize_raw(load_raw_file(path)))
    if overrides:
        merged.update(canonicalize_raw(overrides))
    return build_config(merged)
