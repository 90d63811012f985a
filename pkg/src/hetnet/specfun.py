"""Special functions and combinatorial machinery for the coverage formulas.

The centre piece is the i-th derivative of the Laplace transform of the
aggregate D2D interference,

    L(s) = exp(-c_d * lambda_d * s^(2/alpha_d)),

needed by the cellular coverage expression. Two independent evaluation
routes are provided: the exact Faa di Bruno sum over integer partitions
(`upsilon`) and a product-rule recurrence (`upsilon_derivatives`). They are
cross-checked against each other and against high-precision finite
differences in the test suite.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import special as _sp

from .config import SystemConfig, derive_constants
from .errors import DomainError, GuardExceeded

# Above this order the partition count p(i) (~4.4e6 at i=128) makes the
# exhaustive sum pointless; the recurrence route stays available.
PARTITION_GUARD = 128

Partition = tuple[tuple[int, int], ...]  # ((part, multiplicity), ...), parts descending


def sinc_norm(x: float) -> float:
    """Normalized sinc sin(pi x)/(pi x), equal to 1 at x = 0."""
    return float(np.sinc(x))


def incomplete_beta(x: float, a: float, b: float) -> float:
    """Lower incomplete Beta integral of t^(a-1) (1-t)^(b-1) over [0, x].

    Unnormalized, so incomplete_beta(1, a, b) is the complete Beta function.
    """
    if a <= 0.0 or b <= 0.0:
        raise DomainError(f"incomplete_beta requires a, b > 0, got a={a!r}, b={b!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"incomplete_beta requires 0 <= x <= 1, got {x!r}")
    return float(_sp.betainc(a, b, x) * _sp.beta(a, b))


def gen_binomial(a: float, k: int) -> float:
    """Generalized binomial coefficient C(a, k) for real a, integer k >= 0."""
    if k < 0:
        raise DomainError(f"gen_binomial requires k >= 0, got {k!r}")
    out = 1.0
    for i in range(k):
        out *= (a - i) / (i + 1)
    return out


def _gen_partitions(n: int, max_part: int):
    if n == 0:
        yield ()
        return
    for part in range(min(n, max_part), 0, -1):
        for count in range(n // part, 0, -1):
            for rest in _gen_partitions(n - part * count, part - 1):
                yield ((part, count),) + rest


@lru_cache(maxsize=64)
def enumerate_partitions(i: int) -> tuple[Partition, ...]:
    """All integer partitions of i, each as ((part, multiplicity), ...).

    Parts are listed in descending order within a partition; the empty
    partition of 0 is (). The list is exhaustive and duplicate-free.
    """
    if not isinstance(i, int) or i < 0:
        raise DomainError(f"partition order must be a nonnegative integer, got {i!r}")
    if i > PARTITION_GUARD:
        raise GuardExceeded(
            f"refusing to enumerate partitions of {i} (> {PARTITION_GUARD}); "
            "use the derivative recurrence instead")
    return tuple(_gen_partitions(i, i))


def _check_upsilon_args(lambda_d: float, s: float, i: int) -> None:
    if not isinstance(i, int) or i < 0:
        raise DomainError(f"derivative order must be a nonnegative integer, got {i!r}")
    if lambda_d < 0.0:
        raise DomainError(f"lambda_d must be >= 0, got {lambda_d!r}")
    if s < 0.0 or (s == 0.0 and i >= 1):
        raise DomainError(f"s must be positive for derivative order {i}, got {s!r}")


def upsilon(lambda_d: float, s: float, i: int, cfg: SystemConfig) -> float:
    """i-th derivative of the D2D interference Laplace transform at s.

    Exact Faa di Bruno expansion: with g(s) = -c_d*lambda_d*s^mu the sum runs
    over the partitions of i, each term weighted by the multinomial factor
    i! / prod_l (j_l! * (l!)^j_l) and the product of g-derivative powers.
    For 0 < mu < 1 every term of a given order has the sign (-1)^i, so terms
    are accumulated as log-magnitudes and combined with fsum; no
    cancellation occurs.
    """
    _check_upsilon_args(lambda_d, s, i)
    mu = 2.0 / cfg.alpha_d
    c = derive_constants(cfg).c_d * lambda_d
    if i == 0:
        return math.exp(-c * s ** mu)
    if lambda_d == 0.0:
        return 0.0

    # log |g^(l)(s)| with g^(l)(s) = -c * s^(mu-l) * prod_{q<l} (mu-q)
    log_g = []
    acc = math.log(c) + (mu - 1.0) * math.log(s)
    for ell in range(1, i + 1):
        acc += math.log(abs(mu - (ell - 1))) - (0.0 if ell == 1 else math.log(s))
        log_g.append(acc)

    log_terms = []
    for partition in enumerate_partitions(i):
        lm = math.lgamma(i + 1)
        for part, mult in partition:
            lm += mult * log_g[part - 1]
            lm -= math.lgamma(mult + 1) + mult * math.lgamma(part + 1)
        log_terms.append(lm)
    top = max(log_terms)
    mag = math.fsum(math.exp(lm - top) for lm in log_terms)
    sign = -1.0 if i % 2 else 1.0
    return sign * math.exp(top + math.log(mag) - c * s ** mu)


def upsilon_derivatives(lambda_d: float, s: float, order: int, cfg: SystemConfig) -> np.ndarray:
    """Derivatives 0..order of the interference Laplace transform at s.

    Independent of the partition route: L' = g' L turns into the product
    rule L^(n+1) = sum_j C(n,j) g^(n+1-j) L^(j), evaluated bottom-up.
    """
    _check_upsilon_args(lambda_d, s, order)
    mu = 2.0 / cfg.alpha_d
    c = derive_constants(cfg).c_d * lambda_d
    out = np.zeros(order + 1)
    out[0] = math.exp(-c * s ** mu)
    if order == 0 or lambda_d == 0.0:
        return out
    g = np.zeros(order + 1)
    g[1] = -c * mu * s ** (mu - 1.0)
    for ell in range(1, order):
        g[ell + 1] = g[ell] * (mu - ell) / s
    for n in range(order):
        out[n + 1] = math.fsum(
            math.comb(n, j) * g[n + 1 - j] * out[j] for j in range(n + 1))
    return out
