"""Formula-vs-oracle verification suites.

Backs the CLI `verify` subcommand and the acceptance tests: every closed
form in pgroups is compared against brute-force enumeration on explicit
groups, subgroup duality is checked exhaustively, and the mod-p^e Smith
normal form is cross-checked against the integer SNF oracle.

Instances whose enumeration does not fit the oracle's operation budget are
skipped and reported as such (the oracle signals this; shrink the instance
or raise the budget to cover more).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .bruteforce import (
    DEFAULT_OP_BUDGET,
    BudgetExceededError,
    ExplicitGroup,
    enumerate_automorphisms,
    enumerate_homs,
    enumerate_subgroups,
    enumerate_surjections,
)
from .partitions import format_partition, partitions_up_to
from .pgroups import (
    aut_order,
    count_subgroups_of_type,
    hom_count,
    sur_count,
    verify_order_index_duality,
)
from .snf import MatrixModPE, integer_snf_oracle, smith_normal_form, valuation


@dataclass
class SuiteResult:
    checked: int = 0
    skipped: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def record(self, name: str, instance: str, expected, got) -> None:
        if expected != got:
            self.mismatches.append(
                {"check": name, "instance": instance, "oracle": str(expected),
                 "formula": str(got)})
        self.checked += 1


def oracle_equivalence(p: int, max_order: int,
                       op_budget: int = DEFAULT_OP_BUDGET) -> dict:
    """Compare aut/hom/sur/subgroup-count formulas with brute force.

    Covers every pair of types with group order <= max_order; enumerations
    that exceed op_budget are counted as skipped.
    """
    max_size = 0
    while p ** (max_size + 1) <= max_order:
        max_size += 1
    lams = partitions_up_to(max_size)
    groups = {lam: ExplicitGroup(p, lam, order_cap=max(max_order, 1)) for lam in lams}

    results = {name: SuiteResult() for name in ("aut", "hom", "sur", "subgroup_counts")}
    for lam in lams:
        A = groups[lam]
        label = format_partition(lam)
        try:
            results["aut"].record("aut", label,
                                  enumerate_automorphisms(A, budget=op_budget),
                                  aut_order(lam, p))
        except BudgetExceededError:
            results["aut"].skipped += 1
        try:
            found = dict(enumerate_subgroups(A, budget=op_budget))
            for mu in lams:
                results["subgroup_counts"].record(
                    "subgroup_counts", f"{label} >= {format_partition(mu)}",
                    found.get(mu, 0), count_subgroups_of_type(lam, mu, p))
        except BudgetExceededError:
            results["subgroup_counts"].skipped += 1
        for mu in lams:
            B = groups[mu]
            pair = f"{label} -> {format_partition(mu)}"
            results["hom"].record("hom", pair, enumerate_homs(A, B),
                                  hom_count(lam, mu, p))
            try:
                results["sur"].record("sur", pair,
                                      enumerate_surjections(A, B, budget=op_budget),
                                      sur_count(lam, mu, p))
            except BudgetExceededError:
                results["sur"].skipped += 1
    return results


def duality_sweep(max_size: int, primes=(2, 3, 5)) -> SuiteResult:
    """verify_order_index_duality over all |lambda| <= max_size."""
    out = SuiteResult()
    for p in primes:
        for lam in partitions_up_to(max_size):
            rep = verify_order_index_duality(lam, p)
            if not rep.ok:
                out.mismatches.append({
                    "check": "duality",
                    "instance": f"lambda={format_partition(lam)} p={p}",
                    "oracle": f"order-count {rep.order_count} at size {rep.failed_size}",
                    "formula": f"index-count {rep.index_count}",
                })
            out.checked += 1
    return out


def snf_crosscheck(num_matrices: int, seed: int = 0, primes=(2, 3, 5), e: int = 12,
                   max_dim: int = 5, entry_bound: int = 50) -> SuiteResult:
    """Random small integer matrices: p-adic SNF vs integer SNF oracle.

    The p-valuations of the integer invariant factors, clamped at e (with
    zero factors reading as e), must equal the mod-p^e diagonal valuations.
    """
    rng = random.Random(seed)
    out = SuiteResult()
    for _ in range(num_matrices):
        rows = rng.randint(1, max_dim)
        cols = rng.randint(1, rows)
        mat = [[rng.randint(-entry_bound, entry_bound) for _ in range(cols)]
               for _ in range(rows)]
        invs = integer_snf_oracle(mat)
        expected = tuple(sorted(
            min(valuation(x, p, 10**9), e) if x else e for x in invs)
            for p in primes)
        got = tuple(
            smith_normal_form(MatrixModPE(p, e, [[x % p**e for x in r] for r in mat])).valuations
            for p in primes)
        for p, exp_p, got_p in zip(primes, expected, got):
            out.record("snf", f"{mat} p={p}", exp_p, got_p)
    return out
