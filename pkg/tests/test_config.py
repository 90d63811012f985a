"""Configuration parsing, unit conversion, and the derived constants.

The numeric targets in this file were produced by a standalone script that
redid every conversion with plain arithmetic before the package existed;
they are frozen here at full precision.
"""

from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hetnet.config import (
    REQUIRED_KEYS,
    build_config,
    canonicalize_raw,
    db_to_linear,
    dbm_to_watts,
    default_raw,
    derive_constants,
    linear_to_db,
    load_config,
    load_raw_file,
    table_defaults,
    watts_to_dbm,
)
from hetnet.errors import DomainError, InvalidRange, MissingParameter


class TestUnitConversions:
    def test_dbm_round_numbers(self):
        assert dbm_to_watts(30.0) == 1.0
        assert dbm_to_watts(0.0) == 1e-3
        assert dbm_to_watts(6.0) == pytest.approx(0.003981071705534973, rel=0, abs=0)

    def test_db_round_numbers(self):
        assert db_to_linear(10.0) == 10.0
        assert db_to_linear(0.0) == 1.0

    @given(st.floats(min_value=-200.0, max_value=200.0))
    def test_db_round_trip(self, x_db):
        assert linear_to_db(db_to_linear(x_db)) == pytest.approx(x_db, abs=1e-9)

    @given(st.floats(min_value=-100.0, max_value=80.0))
    def test_dbm_round_trip(self, x_dbm):
        assert watts_to_dbm(dbm_to_watts(x_dbm)) == pytest.approx(x_dbm, abs=1e-9)

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_nonpositive_rejected(self, bad):
        with pytest.raises(DomainError):
            linear_to_db(bad)
        with pytest.raises(DomainError):
            watts_to_dbm(bad)


class TestBuildConfig:
    def test_default_scenario_values(self, cfg_base):
        assert cfg_base.p_c == 1.0
        assert cfg_base.p_d == 0.003981071705534973
        assert cfg_base.radius == 500.0
        assert cfg_base.bandwidth == 20e6
        assert cfg_base.d2d_pair_distance == 35.0
        assert cfg_base.alpha_c == 3.67
        assert cfg_base.alpha_d == 3.0
        assert cfg_base.a_c == 0.0008810488730080138
        assert cfg_base.a_d == 0.00013061708881318405
        assert cfg_base.n_cue == 4
        assert cfg_base.n_antennas == 20
        assert cfg_base.lambda_d == 1e-5
        assert cfg_base.carrier_frequency == 2.0e9

    def test_noise_figure_folded_by_default(self, cfg_base):
        # -131 dBm thermal + 5 dB receiver noise figure = -126 dBm effective
        assert cfg_base.noise_power == 2.511886431509582e-16

    def test_noise_figure_can_be_disabled(self):
        raw = default_raw()
        raw["apply_noise_figure"] = False
        cfg = build_config(raw)
        assert cfg.noise_power == 7.943282347242789e-17

    def test_missing_keys_are_listed(self):
        raw = default_raw()
        del raw["p_c"], raw["alpha_d"]
        with pytest.raises(MissingParameter, match="alpha_d.*p_c"):
            build_config(raw)

    def test_unknown_key_rejected(self):
        raw = default_raw()
        raw["bandwidth"] = 20.0
        with pytest.raises(InvalidRange, match="bandwidth"):
            build_config(raw)

    def test_keys_case_insensitive_and_aliased(self):
        raw = {k.upper(): v for k, v in default_raw().items()}
        cfg = build_config(raw)
        assert cfg.n_antennas == 20
        raw2 = default_raw()
        raw2["r00"] = raw2.pop("r_0_0")
        raw2["lambda"] = raw2.pop("lambda_d")
        cfg2 = build_config(raw2)
        assert cfg2.d2d_pair_distance == 35.0
        assert cfg2.lambda_d == 1e-5

    def test_duplicate_after_aliasing_rejected(self):
        raw = default_raw()
        raw["LAMBDA_D"] = 2e-5  # collides with lambda_d after lowering
        with pytest.raises(InvalidRange, match="more than once"):
            build_config(raw)

    @pytest.mark.parametrize(
        "key,value",
        [
            ("u_c", 0),
            ("u_c", 2.5),
            ("t_c", 3),        # below u_c = 4
            ("alpha_c", 2.0),  # needs > 2
            ("alpha_d", 1.9),
            ("r", -500.0),
            ("lambda_d", -1e-6),
            ("r_0_0", 600.0),  # pair distance beyond the cell radius
        ],
    )
    def test_out_of_range_rejected(self, key, value):
        raw = default_raw()
        raw[key] = value
        with pytest.raises(InvalidRange):
            build_config(raw)

    def test_zero_density_allowed(self):
        cfg = build_config({**default_raw(), "lambda_d": 0.0})
        assert cfg.lambda_d == 0.0

    def test_config_is_frozen(self, cfg_base):
        with pytest.raises(Exception):
            cfg_base.p_c = 2.0

    def test_required_keys_cover_table(self):
        assert REQUIRED_KEYS <= set(default_raw())
        assert "mc" in table_defaults()


class TestDerivedConstants:
    def test_frozen_values(self, cfg_base):
        der = derive_constants(cfg_base)
        assert der.zeta == 0.00022026221825200345
        assert der.kappa == 18161183.2985448
        assert der.c_d == 0.19084371175201212
        assert der.gamma_bar_d == 48283.18014672979

    def test_mean_snr_in_db(self, cfg_base):
        der = derive_constants(cfg_base)
        assert linear_to_db(der.gamma_bar_d) == pytest.approx(46.84, abs=0.005)

    def test_zeta_splits_power_across_beams(self):
        der1 = derive_constants(build_config({**default_raw(), "u_c": 1, "t_c": 20}))
        der8 = derive_constants(build_config({**default_raw(), "u_c": 8}))
        assert der1.zeta == pytest.approx(8.0 * der8.zeta, rel=1e-15)

    def test_kappa_dimensionless_identity(self, cfg_base):
        der = derive_constants(cfg_base)
        link = cfg_base.p_d * cfg_base.a_d * cfg_base.d2d_pair_distance ** (-cfg_base.alpha_d)
        assert der.kappa * link == pytest.approx(der.zeta, rel=1e-15)


class TestFileLoading:
    def test_load_config_merges_defaults_file_overrides(self, tmp_path):
        path = tmp_path / "scenario.toml"
        path.write_text('u_c = 8\nt_c = 40\nlambda_d = 1e-4\n')
        cfg = load_config(str(path))
        assert (cfg.n_cue, cfg.n_antennas, cfg.lambda_d) == (8, 40, 1e-4)
        assert cfg.radius == 500.0  # untouched default
        cfg2 = load_config(str(path), overrides={"u_c": 2})
        assert cfg2.n_cue == 2

    def test_nested_tables_rejected(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text('[section]\nu_c = 4\n')
        with pytest.raises(InvalidRange, match="flat"):
            load_raw_file(str(path))

    def test_missing_file_raises_oserror(self, tmp_path):
        with pytest.raises(OSError):
            load_raw_file(str(tmp_path / "nope.toml"))


class TestCanonicalize:
    def test_strips_and_lowers(self):
        out = canonicalize_raw({" U_C ": 4})
        assert out == {"u_c": 4}

    def test_unknown_keys_collected(self):
        with pytest.raises(InvalidRange, match="alpha_x.*zeta"):
            canonicalize_raw({"alpha_x": 1, "zeta": 2})
