"""Shared fixtures: baseline configurations and cached Monte Carlo draws."""

from __future__ import annotations

import numpy as np
import pytest

from hetnet.config import build_config, default_raw


def make_config(**overrides):
    """Baseline scenario with raw-map overrides applied."""
    raw = default_raw()
    raw.update(overrides)
    return build_config(raw)


@pytest.fixture(scope="session")
def cfg_base():
    """U_c=4, T_c=20, lambda_d=1e-5 on the default parameter set."""
    return make_config()


@pytest.fixture(scope="session")
def cfg_small_surplus():
    """T_c = U_c = 4: the zero-forcing corner case."""
    return make_config(t_c=4)


@pytest.fixture(scope="session")
def mc_samples_d2d(cfg_base):
    from hetnet.montecarlo import draw_sinr_samples

    return draw_sinr_samples(cfg_base, "d2d", 3000, 1234)


@pytest.fixture(scope="session")
def mc_samples_cue(cfg_base):
    from hetnet.montecarlo import draw_sinr_samples

    return draw_sinr_samples(cfg_base, "cue", 3000, 1234)


@pytest.fixture()
def rng():
    return np.random.default_rng(2024)


# ---------------------------------------------------------------------------
# Acceptance-criteria reporting
# ---------------------------------------------------------------------------

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture()
def acceptance_report():
    """Collect one summary line per acceptance criterion.

    The lines are replayed in a dedicated terminal-summary section so a
    plain ``pytest -v`` run ends with one PASS/FAIL line per criterion,
    with the measured numbers next to the stated tolerances.
    """

    def record(line: str) -> None:
        _ACCEPTANCE_LINES.append(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
