"""Exact combinatorics of finite abelian p-groups.

Everything here is arbitrary-precision integer arithmetic: automorphism
counts like p^(sum of squared conjugate parts) overflow machine words for
quite small groups already.  All functions are pure and memoized on
(partition, partition, p) keys.

Conventions: a group is a partition tuple (see partitions.py), p is a prime.
#Hom(A, B) / #Sur(A, B) count all / surjective homomorphisms A -> B.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

from .partitions import (
    Partition,
    conjugate,
    is_subtype,
    multiplicities,
    partitions_up_to,
    size,
    validate_partition,
)
from .primes import require_prime


def group_order(lam: Partition, p: int) -> int:
    """|G_lambda| = p^|lambda|."""
    return require_prime(p) ** size(lam)


@lru_cache(maxsize=None)
def gaussian_binomial(n: int, k: int, p: int) -> int:
    """The p-binomial coefficient [n choose k]_p, an exact integer.

    Counts k-dimensional subspaces of F_p^n; zero outside 0 <= k <= n.
    """
    if k < 0 or k > n:
        return 0
    if k == 0 or k == n:
        return 1
    num = 1
    den = 1
    for i in range(1, k + 1):
        num *= p ** (n - k + i) - 1
        den *= p**i - 1
    return num // den


@lru_cache(maxsize=None)
def aut_order(lam: Partition, p: int) -> int:
    """|Aut G_lambda| via the multiplicity closed form.

    |Aut| = p^(sum_j (lambda'_j)^2) * prod over part sizes i of
    prod_{j=1}^{m_i} (1 - p^-j), where m_i is the multiplicity of i in
    lambda.  The product is assembled so every intermediate stays integral.
    """
    require_prime(p)
    lam = validate_partition(lam)
    conj = conjugate(lam)
    exponent = sum(c * c for c in conj)
    value = p**exponent
    # (1 - p^-j) factors: multiply by (p^j - 1), divide by p^j; pull the
    # power-of-p denominator off the leading p^exponent which dominates it.
    denom_pow = 0
    for m in multiplicities(lam).values():
        for j in range(1, m + 1):
            value *= p**j - 1
            denom_pow += j
    assert exponent >= denom_pow
    return value // p**denom_pow


@lru_cache(maxsize=None)
def hom_count(lam: Partition, mu: Partition, p: int) -> int:
    """#Hom(G_lambda, G_mu) = p^(sum_{i,j} min(lambda_i, mu_j)).

    The exponent equals sum_k lambda'_k * mu'_k, which is what is computed.
    Symmetric in lambda and mu.
    """
    require_prime(p)
    lc = conjugate(validate_partition(lam))
    mc = conjugate(validate_partition(mu))
    return p ** sum(a * b for a, b in zip(lc, mc))


@lru_cache(maxsize=None)
def count_subgroups_of_type(lam: Partition, mu: Partition, p: int) -> int:
    """Number of subgroups of G_lambda isomorphic to G_mu.

    Classical formula in conjugate coordinates (a = lambda', b = mu'):

        prod_{i>=1} p^(b_{i+1} (a_i - b_i)) * [a_i - b_{i+1} choose b_i - b_{i+1}]_p

    Zero unless mu' <= lambda' componentwise.
    """
    require_prime(p)
    lam = validate_partition(lam)
    mu = validate_partition(mu)
    if not is_subtype(mu, lam):
        return 0
    a = conjugate(lam)
    b = conjugate(mu)
    total = 1
    for i in range(len(a)):
        ai = a[i]
        bi = b[i] if i < len(b) else 0
        bn = b[i + 1] if i + 1 < len(b) else 0
        total *= p ** (bn * (ai - bi)) * gaussian_binomial(ai - bn, bi - bn, p)
    return total


@lru_cache(maxsize=None)
def sur_count(lam: Partition, mu: Partition, p: int) -> int:
    """#Sur(G_lambda, G_mu), by subgroup-sum inversion.

    Every homomorphism surjects onto its image, and G_mu contains
    count_subgroups_of_type(mu, nu) subgroups of each type nu, so

        #Hom(lam, mu) = sum_nu count_subgroups_of_type(mu, nu) * #Sur(lam, nu)

    and the nu = mu term can be isolated (its subgroup count is 1).  The
    recursion runs over proper subgroup types in graded lexicographic order.
    """
    require_prime(p)
    lam = validate_partition(lam)
    mu = validate_partition(mu)
    if not mu:
        return 1
    if not is_subtype(mu, lam):
        return 0
    total = hom_count(lam, mu, p)
    for nu in partitions_up_to(size(mu) - 1):
        if is_subtype(nu, mu):
            total -= count_subgroups_of_type(mu, nu, p) * sur_count(lam, nu, p)
    assert total >= 0
    return total


def sur_count_from_free(m: int, mu: Partition, p: int) -> int:
    """#Sur(Z_p^m, G_mu) as an exact integer.

    Equals p^(m |mu|) * prod_{i=0}^{k-1} (1 - p^(i-m)) with k = mu'_1 (the
    p-rank of G_mu): a homomorphism from a free module is surjective exactly
    when it is surjective onto G_mu/pG_mu = F_p^k.  Zero when k > m.
    """
    require_prime(p)
    if m < 0:
        raise ValueError("free rank must be nonnegative")
    mu = validate_partition(mu)
    k = conjugate(mu)[0] if mu else 0
    if k > m:
        return 0
    total = p ** ((size(mu) - k) * m)
    for i in range(k):
        total *= p**m - p**i
    return total


@lru_cache(maxsize=None)
def sur_count_with_free(u: int, lam: Partition, mu: Partition, p: int) -> int:
    """#Sur(Z_p^u + G_lambda, G_mu), exactly.

    Same inversion as sur_count, with the Hom side factored as
    #Hom(Z_p^u + T, G) = |G|^u * #Hom(T, G).
    """
    require_prime(p)
    if u < 0:
        raise ValueError("free rank must be nonnegative")
    if u == 0:
        return sur_count(lam, mu, p)
    lam = validate_partition(lam)
    mu = validate_partition(mu)
    if not mu:
        return 1
    total = p ** (u * size(mu)) * hom_count(lam, mu, p)
    for nu in partitions_up_to(size(mu) - 1):
        if is_subtype(nu, mu):
            total -= count_subgroups_of_type(mu, nu, p) * sur_count_with_free(u, lam, nu, p)
    assert total >= 0
    return total


class DualityReport(NamedTuple):
    ok: bool
    lam: Partition
    p: int
    failed_size: int | None
    order_count: int | None
    index_count: int | None


def subgroup_count_by_order(lam: Partition, p: int, d: int) -> int:
    """Number of subgroups of G_lambda of order p^d (summed over types)."""
    return sum(
        count_subgroups_of_type(lam, mu, p)
        for mu in partitions_up_to(d)
        if size(mu) == d
    )


def verify_order_index_duality(lam: Partition, p: int) -> DualityReport:
    """Check #subgroups of order p^d == #subgroups of index p^d for all d.

    Returns a report carrying the first offending d and both counts on
    failure.
    """
    require_prime(p)
    lam = validate_partition(lam)
    n = size(lam)
    counts = [subgroup_count_by_order(lam, p, d) for d in range(n + 1)]
    for d in range(n + 1):
        if counts[d] != counts[n - d]:
            return DualityReport(False, lam, p, d, counts[d], counts[n - d])
    return DualityReport(True, lam, p, None, None, None)
