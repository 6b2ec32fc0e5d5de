"""Integer partitions as isomorphism types of finite abelian p-groups.

A partition lambda = (lambda_1 >= lambda_2 >= ... >= lambda_k > 0) encodes the
group G_lambda = Z/p^{lambda_1} + ... + Z/p^{lambda_k}; the empty partition ()
is the trivial group.  Partitions are plain tuples of ints throughout, so they
hash, compare and memoize cheaply.
"""

from __future__ import annotations

from typing import Iterable, Iterator

Partition = tuple  # tuple[int, ...], nonincreasing, strictly positive parts


def validate_partition(parts: Iterable[int]) -> Partition:
    """Normalize `parts` to a canonical partition tuple, or raise ValueError."""
    lam = tuple(int(x) for x in parts)
    for x in lam:
        if x <= 0:
            raise ValueError(f"partition parts must be positive, got {lam}")
    for a, b in zip(lam, lam[1:]):
        if a < b:
            raise ValueError(f"partition parts must be nonincreasing, got {lam}")
    return lam


def size(lam: Partition) -> int:
    """|lambda| = sum of parts = log_p of the group order."""
    return sum(lam)


def conjugate(lam: Partition) -> Partition:
    """Transpose of the Young diagram.  conjugate is an involution.

    conjugate(lam)[j-1] counts the parts of lam that are >= j; in group terms
    conjugate(lam)[0] is the minimal number of generators (p-rank) of G_lambda.
    """
    if not lam:
        return ()
    out = [0] * lam[0]
    for part in lam:
        for j in range(part):
            out[j] += 1
    return tuple(out)


def multiplicities(lam: Partition) -> dict[int, int]:
    """Map part size -> multiplicity, e.g. (3,1,1) -> {3: 1, 1: 2}."""
    mult: dict[int, int] = {}
    for part in lam:
        mult[part] = mult.get(part, 0) + 1
    return mult


def is_subtype(mu: Partition, lam: Partition) -> bool:
    """True iff G_mu embeds in G_lambda, i.e. mu' <= lambda' componentwise.

    The same condition characterizes mu being a quotient type of lambda.
    """
    lc = conjugate(lam)
    mc = conjugate(mu)
    if len(mc) > len(lc):
        return False
    return all(m <= l for m, l in zip(mc, lc))


def partitions_of(m: int) -> Iterator[Partition]:
    """Yield all partitions of m, largest-first-lexicographic: (m), ..., (1^m)."""
    if m < 0:
        return
    if m == 0:
        yield ()
        return
    cur: tuple = (m,)
    yield cur
    while True:
        # decrement the last part that exceeds 1, then redistribute the rest
        i = len(cur) - 1
        while i >= 0 and cur[i] == 1:
            i -= 1
        if i < 0:
            return
        rest = len(cur) - i
        cur = cur[:i] + (cur[i] - 1,)
        while rest > 0:
            nxt = min(cur[-1], rest)
            cur += (nxt,)
            rest -= nxt
        yield cur


def partitions_up_to(max_size: int) -> list[Partition]:
    """All partitions with |lambda| <= max_size in graded lexicographic order.

    Grading is by size; within a size the order of partitions_of is kept.
    partitions_up_to(2) == [(), (1,), (2,), (1, 1)].
    """
    out: list[Partition] = []
    for m in range(max_size + 1):
        out.extend(partitions_of(m))
    return out


def subtypes(mu: Partition, proper: bool = False) -> list[Partition]:
    """Subgroup types of G_mu in graded lexicographic order.

    With proper=True the type mu itself is excluded.  (The trivial type ()
    is always a subtype.)
    """
    top = size(mu) - 1 if proper else size(mu)
    return [nu for nu in partitions_up_to(top) if is_subtype(nu, mu)]


def format_partition(lam: Partition) -> str:
    """Render for tables/CSV: "2,1" for (2,1); "trivial" for ()."""
    if not lam:
        return "trivial"
    return ",".join(str(x) for x in lam)


def parse_partition(text: str) -> Partition:
    """Inverse of format_partition; accepts "trivial", "" and "2,1" forms."""
    text = text.strip()
    if text in ("", "trivial", "()"):
        return ()
    return validate_partition(int(x) for x in text.split(","))
