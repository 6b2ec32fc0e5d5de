"""Exhaustive ground truth on small explicit abelian p-groups.

This module deliberately avoids every counting formula from pgroups: groups
are realized as tuples of residues and homomorphisms are enumerated as
generator-image assignments.  It exists so the closed forms have something
independent to be checked against.

Instances are kept honest by two budgets: a hard cap on the group order and
an operation budget for enumerations.  Exceeding a budget raises
BudgetExceededError, which tells the caller to shrink the instance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .partitions import Partition, conjugate, validate_partition
from .primes import require_prime

DEFAULT_ORDER_CAP = 4096
DEFAULT_OP_BUDGET = 10**7


class BudgetExceededError(RuntimeError):
    """The requested enumeration does not fit the operation budget."""


class _Budget:
    __slots__ = ("left",)

    def __init__(self, limit: int):
        self.left = limit

    def spend(self, amount: int) -> None:
        self.left -= amount
        if self.left < 0:
            raise BudgetExceededError("enumeration budget exhausted")


@dataclass(frozen=True)
class ExplicitGroup:
    """G = Z/moduli[0] + ... + Z/moduli[k-1], all moduli powers of one prime p.

    Elements are index-encoded: element i has coordinates given by the mixed
    radix decomposition of i by `moduli`.
    """

    p: int
    exponents: Partition
    order_cap: int = DEFAULT_ORDER_CAP
    moduli: tuple = field(init=False)

    def __post_init__(self):
        require_prime(self.p)
        object.__setattr__(self, "exponents", validate_partition(self.exponents))
        moduli = tuple(self.p**a for a in self.exponents)
        object.__setattr__(self, "moduli", moduli)
        order = 1
        for m in moduli:
            order *= m
        if order > self.order_cap:
            raise ValueError(f"group order {order} exceeds cap {self.order_cap}")

    @property
    def order(self) -> int:
        n = 1
        for m in self.moduli:
            n *= m
        return n

    @property
    def rank(self) -> int:
        return len(self.moduli)

    def elements(self) -> list[tuple]:
        return list(itertools.product(*[range(m) for m in self.moduli]))

    def index_of(self, elem: tuple) -> int:
        idx = 0
        for x, m in zip(elem, self.moduli):
            idx = idx * m + (x % m)
        return idx

    def element(self, idx: int) -> tuple:
        coords = []
        for m in reversed(self.moduli):
            coords.append(idx % m)
            idx //= m
        return tuple(reversed(coords))

    def add(self, i: int, j: int) -> int:
        a = self.element(i)
        b = self.element(j)
        return self.index_of(tuple((x + y) % m for x, y, m in zip(a, b, self.moduli)))

    def element_order(self, idx: int) -> int:
        """Order of the element (a power of p)."""
        elem = self.element(idx)
        order = 1
        for x, m in zip(elem, self.moduli):
            # order of x in Z/m: m // gcd(x, m); both are powers of p
            g = _gcd(x, m)
            order = max(order, m // g)
        return order

    def multiples(self, idx: int) -> list[int]:
        """[idx, 2*idx, ...] up to but excluding the identity."""
        out = []
        cur = idx
        zero = 0
        while cur != zero:
            out.append(cur)
            cur = self.add(cur, idx)
        return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _valid_images(A: ExplicitGroup, B: ExplicitGroup) -> list[list[int]]:
    """For each generator of A, the B-elements of order dividing its order."""
    out = []
    elems = B.elements()
    for mA in A.moduli:
        good = []
        for idx, x in enumerate(elems):
            if all((mA * xj) % mj == 0 for xj, mj in zip(x, B.moduli)):
                good.append(idx)
        out.append(good)
    return out


def enumerate_homs(A: ExplicitGroup, B: ExplicitGroup, *, return_maps: bool = False,
                   budget: int = DEFAULT_OP_BUDGET):
    """Count homomorphisms A -> B; optionally also return them.

    A homomorphism is determined by images of the k standard generators of A,
    and an assignment extends to a homomorphism exactly when the image of
    generator i has order dividing A.moduli[i].  The count is the product of
    per-generator choices and never needs enumeration; materializing the list
    is budget-checked.
    """
    valid = _valid_images(A, B)
    count = 1
    for v in valid:
        count *= len(v)
    if not return_maps:
        return count
    if count > budget:
        raise BudgetExceededError(f"would enumerate {count} maps")
    maps = [tuple(B.element(i) for i in combo) for combo in itertools.product(*valid)]
    return count, maps


def enumerate_surjections(A: ExplicitGroup, B: ExplicitGroup,
                          budget: int = DEFAULT_OP_BUDGET) -> int:
    """Count surjective homomorphisms A -> B.

    Walks generator-image assignments depth first, but groups partial
    assignments by the subgroup they span so far; once the span is all of B
    the remaining generators are free and are counted in one multiplication.
    This is still plain enumeration over explicit element sets (no type
    combinatorics), just with shared prefixes.
    """
    if B.order == 1:
        return 1  # the zero map is the unique (surjective) hom onto the trivial group
    bud = _Budget(budget)
    valid = _valid_images(A, B)
    order = B.order
    identity = 0

    mult_cache: dict[int, list[int]] = {}
    join_cache: dict[tuple, frozenset] = {}

    def join(span: frozenset, x: int) -> frozenset:
        key = (span, x)
        got = join_cache.get(key)
        if got is not None:
            return got
        if x not in mult_cache:
            mult_cache[x] = B.multiples(x)
        muls = mult_cache[x]
        bud.spend(len(span) * (len(muls) + 1))
        out = set(span)
        for m in muls:
            out.update(B.add(s, m) for s in span)
        result = frozenset(out)
        join_cache[key] = result
        return result

    # suffix products of the remaining free choices
    suffix = [1] * (len(valid) + 1)
    for i in range(len(valid) - 1, -1, -1):
        suffix[i] = suffix[i + 1] * len(valid[i])

    spans: dict[frozenset, int] = {frozenset((identity,)): 1}
    total = 0
    for i, images in enumerate(valid):
        nxt: dict[frozenset, int] = {}
        for span, ways in spans.items():
            for x in images:
                new_span = join(span, x)
                if len(new_span) == order:
                    total += ways * suffix[i + 1]
                else:
                    nxt[new_span] = nxt.get(new_span, 0) + ways
        spans = nxt
        if not spans:
            break
    return total


def enumerate_automorphisms(A: ExplicitGroup, budget: int = DEFAULT_OP_BUDGET) -> int:
    """Count bijective endomorphisms (= surjective, since A is finite)."""
    return enumerate_surjections(A, A, budget=budget)


def enumerate_subgroups(A: ExplicitGroup,
                        budget: int = DEFAULT_OP_BUDGET) -> list[tuple[Partition, int]]:
    """All subgroups of A, grouped by isomorphism type.

    Subgroups are generated as element sets: start from all cyclic subgroups
    and close under pairwise joins (H + C is again a subgroup since A is
    abelian).  Deduplication is by frozen element set, so each subgroup is
    found exactly once.  Returns (type, count) pairs in graded lexicographic
    order of the type.
    """
    bud = _Budget(budget)
    n = A.order

    cyclic: set[frozenset] = set()
    for idx in range(n):
        bud.spend(1)
        sub = frozenset([0] + A.multiples(idx))
        cyclic.add(sub)

    subgroups: set[frozenset] = set(cyclic)
    subgroups.add(frozenset((0,)))
    frontier = list(subgroups)
    while frontier:
        S = frontier.pop()
        for C in cyclic:
            if C <= S:
                continue
            bud.spend(len(S) * len(C))
            T = frozenset(A.add(s, c) for s in S for c in C)
            if T not in subgroups:
                subgroups.add(T)
                frontier.append(T)

    counts: dict[Partition, int] = {}
    for sub in subgroups:
        typ = _subgroup_type(A, sub)
        counts[typ] = counts.get(typ, 0) + 1
    return sorted(counts.items(), key=lambda kv: (sum(kv[0]), tuple(-x for x in kv[0])))


def _subgroup_type(A: ExplicitGroup, sub: frozenset) -> Partition:
    """Type of a subgroup from its element-order profile.

    If c_j = #{x in H : p^j x = 0} then log_p(c_j) - log_p(c_{j-1}) is the
    number of parts of the type that are >= j, i.e. the conjugate partition.
    """
    p = A.p
    orders = [A.element_order(idx) for idx in sub]
    conj = []
    prev = 1
    j = 1
    while prev < len(sub):
        pj = p**j
        cj = sum(1 for o in orders if o <= pj)
        ratio = cj // prev
        parts_ge_j = 0
        while ratio > 1:
            ratio //= p
            parts_ge_j += 1
        conj.append(parts_ge_j)
        prev = cj
        j += 1
    return conjugate(tuple(conj))
