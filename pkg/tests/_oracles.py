"""Independent reference implementations used by the test suite only.

Nothing here may import evaluation code from the package paths it checks;
these routes were written (and frozen) against plain definitions so the
package always has a second opinion to answer to.
"""

from __future__ import annotations

import math

import mpmath as mp


def fd_laplace_derivative(c: float, mu: float, s: float, order: int,
                          dps: int = 60) -> float:
    """d^order/ds^order exp(-c * s^mu) by high-precision central differences.

    Step h = s * 1e-5 with dps = 60 keeps both truncation and round-off
    below ~1e-9 relative for order <= 5 (established empirically before the
    package existed; double precision bottoms out near 1e-2 at order 5).
    """
    with mp.workdps(dps):
        c_mp, mu_mp, s_mp = mp.mpf(c), mp.mpf(mu), mp.mpf(s)

        def f(x: mp.mpf) -> mp.mpf:
            return mp.e ** (-c_mp * x ** mu_mp)

        if order == 0:
            return float(f(s_mp))
        h = s_mp * mp.mpf("1e-5")
        total = mp.mpf(0)
        for j in range(order + 1):
            node = s_mp + (mp.mpf(order) / 2 - j) * h
            total += (-1) ** j * mp.binomial(order, j) * f(node)
        return float(total / h ** order)


def partition_count(n: int) -> int:
    """Number of integer partitions of n (Euler's recurrence-free DP)."""
    table = [1] + [0] * n
    for part in range(1, n + 1):
        for total in range(part, n + 1):
            table[total] += table[total - part]
    return table[n]


def incomplete_beta_quad(x: float, a: float, b: float) -> float:
    """Direct quadrature of the incomplete Beta integrand."""
    from scipy import integrate

    value, _ = integrate.quad(
        lambda t: t ** (a - 1.0) * (1.0 - t) ** (b - 1.0), 0.0, x,
        epsabs=1e-14, epsrel=1e-12, limit=200,
    )
    return value


def d2d_coverage_quad(cfg, beta: float) -> float:
    """Coverage of the typical pair with the radial average done numerically.

    Same probabilistic ingredients as the closed form, but the position
    average over the cell disc is brute-force quadrature, so the
    incomplete-Beta bracket is never used.
    """
    from scipy import integrate

    from hetnet.config import derive_constants

    der = derive_constants(cfg)
    mu = 2.0 / cfg.alpha_d

    def integrand(r: float) -> float:
        return (2.0 * r / cfg.radius ** 2) \
            * (1.0 + der.kappa * beta * r ** (-cfg.alpha_c)) ** (-cfg.n_cue)

    radial, _ = integrate.quad(integrand, 0.0, cfg.radius, epsabs=1e-13,
                               epsrel=1e-11, limit=200)
    ppp = math.exp(-math.pi * cfg.lambda_d * cfg.d2d_pair_distance ** 2
                   * beta ** mu / (math.sin(math.pi * mu) / (math.pi * mu)))
    noise = math.exp(-beta / der.gamma_bar_d)
    return radial * ppp * noise


def cue_kernel_literal(cfg, s: float, surplus: int, include_noise: bool = True) -> float:
    """Success kernel of the beamformed user as the literal double sum.

    Uses the package's derivative series (itself cross-checked against
    finite differences) but combines it exactly as written: an outer
    chi-square CCDF sum over k and an inner binomial expansion in the
    noise term. Only trustworthy for small surplus where the alternating
    binomial does not cancel catastrophically.
    """
    from hetnet.config import derive_constants
    from hetnet.specfun import upsilon

    n0 = (cfg.noise_power / cfg.a_d) if include_noise else 0.0
    total = 0.0
    for k in range(surplus + 1):
        inner = 0.0
        for i in range(k + 1):
            inner += (math.comb(k, i) * n0 ** (k - i) * (-1) ** i
                      * upsilon(cfg.lambda_d, s, i, cfg))
        total += math.exp(-n0 * s) * s ** k / math.factorial(k) * inner
    return total


def best_rate_dense_grid(bandwidth: float, coverage_fn, lo: float = 1e-4,
                         hi: float = 1e6, points: int = 200001) -> tuple[float, float]:
    """Brute-force (beta*, rate*) for sup_beta B log2(1+beta) Pcov(beta)."""
    import numpy as np

    grid = np.logspace(math.log10(lo), math.log10(hi), points)
    vals = bandwidth * np.log2(1.0 + grid) * np.asarray(coverage_fn(grid))
    k = int(np.argmax(vals))
    return float(grid[k]), float(vals[k])
