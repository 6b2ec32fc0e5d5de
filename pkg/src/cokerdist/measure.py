"""The u-weighted Cohen-Lenstra measure and its moment predictions.

The limiting law of the cokernel torsion of a random (n+u) x n matrix over
Z_p assigns a group G the probability

    P(G) = prod_{i>=1} (1 - p^{-i-u}) / (|G|^u |Aut G|).

The infinite product is evaluated by truncation with an explicit relative
tail bound; everything downstream of the product is exact integer or
rational arithmetic converted at the end.  High-precision reals are mpmath
floats at 40 significant digits (the acceptance tolerances sit at 1e-6..1e-9,
double precision would be uncomfortably close for the sums).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from mpmath import mp, mpf

from .partitions import Partition, is_subtype, partitions_up_to, size, validate_partition
from .pgroups import aut_order, count_subgroups_of_type, sur_count, sur_count_from_free
from .primes import require_prime

mp.dps = 40

DEFAULT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CLMeasure:
    """Parameters of the limiting measure: prime p, weight u, numeric knobs."""

    p: int
    u: int
    product_tolerance: float = DEFAULT_TOLERANCE
    max_size: int = 8

    def __post_init__(self):
        require_prime(self.p)
        if self.u < 0:
            raise ValueError("u must be >= 0")
        if not 0 < self.product_tolerance <= 1e-6:
            raise ValueError("product tolerance must be in (0, 1e-6]")
        if self.max_size < 0:
            raise ValueError("max_size must be >= 0")


class TruncatedProduct(NamedTuple):
    value: mpf        # prod_{i=1}^{factors} (1 - p^{-i-u})
    factors: int      # number of factors kept
    tail_bound: float  # relative error bound for the dropped tail


@lru_cache(maxsize=None)
def cl_normalizer(p: int, u: int, tolerance: float = DEFAULT_TOLERANCE) -> TruncatedProduct:
    """prod_{i>=1} (1 - p^{-i-u}), truncated with an explicit tail bound.

    Factors are kept until the next one differs from 1 by less than
    tolerance/10.  The dropped tail multiplies the value by exp(-t) with
    0 <= t <= sum_{j>i} 2 p^{-j-u} <= 4 p^{-i-u}, recorded as tail_bound.
    """
    require_prime(p)
    cut = mpf(tolerance) / 10
    value = mpf(1)
    i = 1
    while True:
        x = mpf(p) ** (-(i + u))
        if x < cut:
            return TruncatedProduct(value, i - 1, float(4 * x))
        value *= 1 - x
        i += 1


def limiting_probability(measure: CLMeasure, lam: Partition) -> mpf:
    """P(torsion = G_lambda) under the limiting measure, in (0, 1)."""
    lam = validate_partition(lam)
    norm = cl_normalizer(measure.p, measure.u, measure.product_tolerance)
    denom = measure.p ** (measure.u * size(lam)) * aut_order(lam, measure.p)
    return norm.value / denom


def total_mass_partial_sum(measure: CLMeasure, max_size: int) -> mpf:
    """sum over |lambda| <= max_size of 1 / (|G|^u |Aut G|).

    Nondecreasing in max_size; converges to the reciprocal of the
    normalizer product.  Computed as an exact rational, returned as mpf.
    """
    p, u = measure.p, measure.u
    total = Fraction(0)
    for lam in partitions_up_to(max_size):
        total += Fraction(1, p ** (u * size(lam)) * aut_order(lam, p))
    return mpf(total.numerator) / total.denominator


def exact_moment_coker(n: int, u: int, mu: Partition, p: int) -> Fraction:
    """E[#Sur(coker M, G_mu)] for an (n+u) x n Haar matrix, exact at finite n.

    Every surjection Z_p^{n+u} -> G_mu pulls back with probability
    |G_mu|^{-n} (its kernel has index |G_mu|), so the expectation is
    #Sur(Z_p^{n+u}, G_mu) / |G_mu|^n -- a rational number, no limit taken.
    Tends to p^{u |mu|} as n grows.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    mu = validate_partition(mu)
    return Fraction(sur_count_from_free(n + u, mu, p), p ** (n * size(mu)))


def limiting_moment_torsion(u: int, mu: Partition, p: int) -> mpf:
    """lim_n E[#Sur(torsion(coker M), G_mu)] = |G_mu|^{-u}."""
    require_prime(p)
    if u < 0:
        raise ValueError("u must be >= 0")
    mu = validate_partition(mu)
    return mpf(1) / p ** (u * size(mu))


@lru_cache(maxsize=None)
def exact_moment_torsion(n: int, u: int, mu: Partition, p: int) -> Fraction:
    """E[#Sur(torsion(coker M), G_mu)] at finite n, exactly.

    Uses the subgroup-sum identity sum_{H <= G} #Sur(T, H)
    = #Hom(Z_p^u + T, G) / |G|^u together with the exact full-cokernel
    moments: isolate the H = G term and recurse over proper subgroup types.
    Converges to p^{-u |mu|} as n grows.
    """
    mu = validate_partition(mu)
    if not mu:
        return Fraction(1)
    total = Fraction(0)
    for nu in partitions_up_to(size(mu)):
        if is_subtype(nu, mu):
            total += count_subgroups_of_type(mu, nu, p) * exact_moment_coker(n, u, nu, p)
    total /= p ** (u * size(mu))
    for nu in partitions_up_to(size(mu) - 1):
        if is_subtype(nu, mu):
            total -= count_subgroups_of_type(mu, nu, p) * exact_moment_torsion(n, u, nu, p)
    return total


def moment_partial_sum(measure: CLMeasure, mu: Partition, max_size: int) -> mpf:
    """sum over |lambda| <= max_size of P(lambda) * #Sur(G_lambda, G_mu).

    Converges to p^{-u |mu|} (moment consistency of the limiting measure);
    used as a numerical cross-check, truncation error not bounded here.
    """
    mu = validate_partition(mu)
    total = mpf(0)
    for lam in partitions_up_to(max_size):
        s = sur_count(lam, mu, measure.p)
        if s:
            total += limiting_probability(measure, lam) * s
    return total


# re-exported for callers thinking in measure terms
enumerate_partitions = partitions_up_to
