"""Closed-form limit quantities for the transposition walk and its graph.

Everything here is a pure function of the normalized time c (the walk is run
for about c*n/2 transpositions on n elements).  The subcritical regime c < 1
is governed by the Borel law for small component sizes, the supercritical
regime by the survival probability theta(c) of a Poisson(c) branching process.
A direct branching-process sampler is included as a sampling oracle for the
Borel distribution.

All heavy-tailed series and binomial coefficients are evaluated in log space
so the functions stay usable at n >= 1e4 and deep into the series tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PgwSample",
    "alpha",
    "borel_inf",
    "borel_pmf",
    "cluster_tail_bound",
    "expected_tree_count",
    "g_components",
    "g_components_series",
    "kappa",
    "lambda_asymptotic",
    "pgw_progeny_sample",
    "pgw_progeny_totals",
    "phi_factorial",
    "rho",
    "sigma_clt",
    "theta",
    "u_distance",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def kappa(c: float) -> float:
    """Limiting mean fragmentation count on [0, c], valid for 0 <= c < 1.

    Equals (-log(1 - c) - c) / 2; increases from 0 and diverges as c -> 1.
    """
    if not 0.0 <= c < 1.0:
        raise ValueError(f"kappa requires 0 <= c < 1, got {c}")
    return (-math.log1p(-c) - c) / 2.0


def borel_pmf(c: float, k: int) -> float:
    """P(total branching-process progeny = k) for Poisson(c) offspring.

    beta_k(c) = (1/c) * k^(k-1)/k! * (c e^-c)^k, evaluated in log space.
    For c > 1 the pmf is defective: it sums to the extinction probability.
    """
    if c <= 0.0:
        raise ValueError(f"borel_pmf requires c > 0, got {c}")
    if k < 1:
        raise ValueError(f"borel_pmf requires k >= 1, got {k}")
    logp = (
        (k - 1) * math.log(k)
        - math.lgamma(k + 1)
        + (k - 1) * math.log(c)
        - k * c
    )
    return math.exp(logp)


def _borel_log_terms(c: float, kmax: int) -> np.ndarray:
    """log beta_k(c) for k = 1..kmax as a vector."""
    ks = np.arange(1, kmax + 1, dtype=np.float64)
    logk = np.log(ks)
    logfact = np.cumsum(logk)
    return (ks - 1.0) * logk - logfact + (ks - 1.0) * math.log(c) - ks * c


def _borel_tail_envelope(c: float, k: int) -> float:
    """Upper bound on sum_{j > k} beta_j(c), via beta_j <= j^-1.5 e^(-a j)/(c sqrt(2 pi))."""
    a = alpha(c)
    if a <= 0.0:
        return math.inf
    j = k + 1
    env = math.exp(-a * j - 1.5 * math.log(j) - math.log(c) - _LOG_SQRT_2PI)
    return env / -math.expm1(-a)


def borel_inf(c: float) -> float:
    """Probability the total progeny is infinite: 1 - sum_k beta_k(c).

    Zero for c <= 1, theta(c) for c > 1.  Computed from the series except in
    a narrow band around c = 1 where the series tail decays only polynomially;
    there the survival-probability closed form is returned instead.
    """
    if c <= 0.0:
        raise ValueError(f"borel_inf requires c > 0, got {c}")
    if abs(c - 1.0) < 5e-3:
        return theta(c)
    kmax = 1 << 10
    while True:
        terms = np.exp(_borel_log_terms(c, kmax))
        total = float(terms.sum())
        if _borel_tail_envelope(c, kmax) < 1e-10:
            break
        if kmax >= (1 << 21):
            break
        kmax <<= 1
    return max(0.0, 1.0 - total)


def theta(c: float) -> float:
    """Survival probability of a Poisson(c) branching process.

    Zero for c <= 1; for c > 1 the unique root in (0, 1) of
    theta = 1 - exp(-c * theta), found by bisection to residual < 1e-12.
    """
    if c <= 0.0:
        raise ValueError(f"theta requires c > 0, got {c}")
    if c <= 1.0 + 1e-12:
        return 0.0
    lo, hi = 1e-300, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if -math.expm1(-c * mid) - mid > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-16:
            break
    root = 0.5 * (lo + hi)
    assert abs(-math.expm1(-c * root) - root) < 1e-12
    return root


def rho(c: float) -> float:
    """Extinction probability 1 - theta(c); satisfies rho = exp(-c(1 - rho))."""
    return 1.0 - theta(c)


def g_components(c: float) -> float:
    """Limit of (number of permutation cycles) / n at time c*n/2.

    Closed forms on both sides of the transition: 1 - c/2 for c <= 1 and
    rho(c) * (1 - c*rho(c)/2) for c > 1.  See g_components_series for the
    direct series evaluation used as a cross-check.
    """
    if c <= 0.0:
        raise ValueError(f"g_components requires c > 0, got {c}")
    if c <= 1.0:
        return 1.0 - c / 2.0
    r = rho(c)
    return r * (1.0 - c * r / 2.0)


def g_components_series(c: float, tol: float = 1e-9) -> float:
    """Series route to g_components: sum_k (1/c) k^(k-2)/k! (c e^-c)^k.

    Converges for every c != 1 (and slowly at c = 1); intended as an
    independent check of the closed forms, not as the production path.
    """
    if c <= 0.0:
        raise ValueError(f"g_components_series requires c > 0, got {c}")
    kmax = 1 << 10
    while True:
        logs = _borel_log_terms(c, kmax) - np.log(np.arange(1, kmax + 1))
        total = float(np.exp(logs).sum())
        if _borel_tail_envelope(c, kmax) < tol:
            return total
        if kmax >= (1 << 22):
            return total
        kmax <<= 1


def u_distance(c: float) -> float:
    """Limit of (Cayley distance to the identity) / n at time c*n/2.

    Equals 1 - g_components(c): c/2 up to the critical time, strictly less
    after it.
    """
    return 1.0 - g_components(c)


def alpha(c: float) -> float:
    """Large-deviation rate c - 1 - log c >= 0, zero only at c = 1."""
    if c <= 0.0:
        raise ValueError(f"alpha requires c > 0, got {c}")
    return c - 1.0 - math.log(c)


def sigma_clt(c: float) -> float:
    """Scale constant rho(c) * [1 + rho(c)(c/2 - 1)] for the supercritical
    distance fluctuation law; defined for c > 1."""
    if c <= 1.0:
        raise ValueError(f"sigma_clt requires c > 1, got {c}")
    r = rho(c)
    return r * (1.0 + r * (c / 2.0 - 1.0))


def expected_tree_count(n: int, k: int, p: float) -> float:
    """Expected number of tree components with k vertices in G(n, p).

    C(n,k) * k^(k-2) * p^(k-1) * (1-p)^(k(n-k) + C(k,2) - k + 1), computed in
    log space.
    """
    if n < 1 or not 1 <= k <= n:
        raise ValueError(f"expected_tree_count requires 1 <= k <= n, got n={n}, k={k}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"expected_tree_count requires 0 <= p <= 1, got {p}")
    exponent = k * (n - k) + k * (k - 1) // 2 - k + 1
    if p == 0.0:
        return float(n) if k == 1 else 0.0
    if p == 1.0:
        count = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
        return math.exp(count + (k - 2) * math.log(k)) if exponent == 0 else 0.0
    logval = (
        math.lgamma(n + 1)
        - math.lgamma(k + 1)
        - math.lgamma(n - k + 1)
        + (k - 2) * math.log(k)
        + (k - 1) * math.log(p)
        + exponent * math.log1p(-p)
    )
    return math.exp(logval)


def lambda_asymptotic(n: int, k: int, c: float) -> float:
    """Asymptotic form of the expected size-k tree count near and below c = 1.

    (n k^-2.5 / (c sqrt(2 pi))) * exp(-alpha(c) k + (c-1) k^2/(2n) - k^3/(3n^2)),
    accurate when k grows but stays o(n^0.75).
    """
    if not 0.0 < c <= 1.0:
        raise ValueError(f"lambda_asymptotic requires 0 < c <= 1, got {c}")
    if not 1 <= k <= n ** 0.7:
        raise ValueError(f"lambda_asymptotic requires 1 <= k <= n^0.7, got n={n}, k={k}")
    logval = (
        math.log(n)
        - 2.5 * math.log(k)
        - math.log(c)
        - _LOG_SQRT_2PI
        - alpha(c) * k
        + (c - 1.0) * k * k / (2.0 * n)
        - k ** 3 / (3.0 * n * n)
    )
    return math.exp(logval)


def cluster_tail_bound(c: float, y: float) -> float:
    """Upper bound min(1, (1/c) exp(-alpha(c) y)) on P(|component of 1| >= y)
    in G(n, c/n).  Vacuous at c = 1 where the rate alpha vanishes."""
    if c <= 0.0:
        raise ValueError(f"cluster_tail_bound requires c > 0, got {c}")
    if y <= 0.0:
        raise ValueError(f"cluster_tail_bound requires y > 0, got {y}")
    return min(1.0, math.exp(-alpha(c) * y) / c)


@dataclass(frozen=True)
class PgwSample:
    """Total progeny of one Poisson branching tree; infinite means the run
    hit the work cap and is treated as a surviving tree."""

    total_progeny: int
    infinite: bool = False

    def __post_init__(self) -> None:
        if self.total_progeny < 1:
            raise ValueError("total progeny is at least 1 (the root)")


def pgw_progeny_sample(c: float, rng: np.random.Generator, cap: int = 1_000_000) -> PgwSample:
    """Sample the total progeny of a Poisson(c) branching process.

    Generation sizes are sampled directly (a generation of m parents has
    Poisson(c*m) children in total), so a draw costs one rng call per
    generation.  Finite draws are Borel(c) distributed; runs reaching `cap`
    individuals return an infinite marker, which for c > 1 happens with
    probability close to theta(c).
    """
    if c <= 0.0:
        raise ValueError(f"pgw_progeny_sample requires c > 0, got {c}")
    alive = 1
    total = 1
    while alive > 0:
        kids = int(rng.poisson(c * alive))
        total += kids
        alive = kids
        if total >= cap:
            return PgwSample(total_progeny=total, infinite=True)
    return PgwSample(total_progeny=total)


def pgw_progeny_totals(
    c: float, count: int, rng: np.random.Generator, cap: int = 1_000_000
) -> tuple[np.ndarray, int]:
    """Batch of pgw_progeny_sample draws.

    Returns (totals, n_infinite) where totals holds the finite total progenies
    and capped runs are excluded from the array.
    """
    finite = []
    n_inf = 0
    for _ in range(count):
        s = pgw_progeny_sample(c, rng, cap=cap)
        if s.infinite:
            n_inf += 1
        else:
            finite.append(s.total_progeny)
    return np.asarray(finite, dtype=np.int64), n_inf


def phi_factorial(x: int) -> int:
    """phi(x) = sum_{k=1}^{x} (k-1)! as an exact integer; phi(0) = 0."""
    if x < 0:
        raise ValueError(f"phi_factorial requires x >= 0, got {x}")
    total = 0
    fact = 1
    for k in range(1, x + 1):
        total += fact
        fact *= k
    return total
