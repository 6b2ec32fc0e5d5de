"""Monte Carlo experiments against the Cohen-Lenstra predictions.

Connects the sampler and the mod-p^e SNF to the exact/limiting values of
measure.py: distribution goodness-of-fit, surjection-moment checks,
saturation and convergence sweeps, and the multi-prime joint test.

Reports are plain data (JSON-ready dicts), embed their configuration and
seed, and are bit-reproducible for a fixed config: all statistics derive
from integer tallies, and per-sample work is a pure function of
(seed, index, prime), so worker counts never change results.

Saturation policy: a sample whose observed partition touches the working
precision e is ambiguous.  "discard-and-count" drops it, "tally-as-other"
keeps the clamped reading, "escalate-precision" (default) recomputes that
sample at min(2e, word limit) -- the entry stream refines the same
underlying matrix -- and keeps the refined reading, clamped only if still
saturated there.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np
from scipy import stats as _sps

from . import kernels
from ._version import __version__
from .measure import CLMeasure, exact_moment_coker, limiting_probability
from .partitions import (
    Partition,
    format_partition,
    partitions_up_to,
    size,
    validate_partition,
)
from .pgroups import sur_count, sur_count_with_free
from .sampling import SampleSpec, max_precision

SCHEMA_VERSION = 1
POLICIES = ("discard-and-count", "escalate-precision", "tally-as-other")
DISCARDED = -1
OVERFLOW = -2


@dataclass(frozen=True)
class ExperimentConfig:
    """Sampling parameters plus tallying/testing knobs."""

    primes: tuple
    precisions: tuple
    n: int
    u: int
    seed: int
    count: int
    tracked_max_size: int = 8
    saturation_policy: str = "escalate-precision"
    alpha: float = 0.001
    workers: int = 1

    def __post_init__(self):
        self.spec()  # validates primes/precisions/n/u/count
        if self.tracked_max_size < 0:
            raise ValueError("tracked_max_size must be >= 0")
        if self.saturation_policy not in POLICIES:
            raise ValueError(f"unknown saturation policy {self.saturation_policy!r}")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @classmethod
    def single(cls, p: int, e: int, n: int, u: int, seed: int, count: int, **kw) -> "ExperimentConfig":
        return cls((p,), (e,), n, u, seed, count, **kw)

    def spec(self) -> SampleSpec:
        return SampleSpec(tuple(self.primes), tuple(self.precisions), self.n,
                          self.u, self.seed, self.count)

    @property
    def p(self) -> int:
        return self.spec().p

    @property
    def e(self) -> int:
        return self.spec().e

    def to_dict(self) -> dict:
        return {
            "primes": list(self.primes),
            "precisions": list(self.precisions),
            "n": self.n,
            "u": self.u,
            "seed": self.seed,
            "count": self.count,
            "tracked_max_size": self.tracked_max_size,
            "saturation_policy": self.saturation_policy,
            "alpha": self.alpha,
            "workers": self.workers,
        }


@dataclass
class ExperimentReport:
    """Counts, targets, test statistics and reproducibility metadata."""

    kind: str
    config: dict
    results: dict
    checks: list
    warnings: list = field(default_factory=list)
    invocation: str | None = None
    schema_version: int = SCHEMA_VERSION
    library_version: str = __version__
    timing: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "schema_version": self.schema_version,
            "library_version": self.library_version,
            "kind": self.kind,
            "invocation": self.invocation,
            "config": self.config,
            "results": self.results,
            "checks": self.checks,
            "warnings": self.warnings,
        }
        if include_timing:
            out["timing"] = self.timing
        return out

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentReport":
        return cls(
            kind=d["kind"],
            config=d["config"],
            results=d["results"],
            checks=d["checks"],
            warnings=d.get("warnings", []),
            invocation=d.get("invocation"),
            schema_version=d.get("schema_version", SCHEMA_VERSION),
            library_version=d.get("library_version", __version__),
            timing=d.get("timing", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# statistics helpers

def wilson_interval(successes: int, total: int, confidence: float = 0.99) -> tuple:
    """Wilson score interval for a binomial proportion."""
    if total == 0:
        return (0.0, 1.0)
    z = float(_sps.norm.ppf((1 + confidence) / 2))
    phat = successes / total
    denom = 1 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    return (center - half, center + half)


def chi_square_gof(observed: Sequence[int], expected: Sequence[float]) -> tuple:
    """Pearson goodness-of-fit statistic, dof = bins - 1, and p-value."""
    stat = 0.0
    for o, x in zip(observed, expected):
        stat += (o - x) ** 2 / x
    dof = len(observed) - 1
    if dof <= 0:
        return (0.0, 0, 1.0)
    return (stat, dof, float(_sps.chi2.sf(stat, dof)))


# ---------------------------------------------------------------------------
# torsion observation with saturation policy

class ObservedTypes(NamedTuple):
    type_ids: np.ndarray      # per-sample id into `types`; DISCARDED/OVERFLOW sentinels
    types: list               # id -> torsion partition
    saturated_first: int      # saturated at the first pass (precision e)
    saturated_final: int      # still clamped in the recorded reading
    clamped_ids: frozenset    # ids whose partition is a clamped (lower-bound) reading
    final_precision: int      # precision of the escalated pass (== e if none)


def _observe_types(p: int, e: int, n: int, u: int, seed: int, count: int,
                   policy: str, workers: int) -> ObservedTypes:
    indices = np.arange(count, dtype=np.int64)
    keys = kernels.cokernel_keys(p, e, n, u, seed, indices, workers=workers)
    base = e + 1
    overflow = keys == kernels.OVERFLOW_KEY
    saturated = (~overflow) & (keys % base == e) & (keys > 0)
    n_sat = int(saturated.sum())

    types: list = []
    type_of: dict = {}
    ids = np.empty(count, dtype=np.int64)

    def intern_keys(mask: np.ndarray, key_arr: np.ndarray, precision: int) -> list:
        """Assign ids for key_arr[mask]; returns the distinct partitions seen."""
        sub = key_arr[mask]
        if sub.size == 0:
            return []
        uniq, inverse = np.unique(sub, return_inverse=True)
        fresh = []
        local = np.empty(uniq.size, dtype=np.int64)
        for i, k in enumerate(uniq.tolist()):
            lam = kernels.decode_key(k, precision)
            if lam not in type_of:
                type_of[lam] = len(types)
                types.append(lam)
                fresh.append(lam)
            local[i] = type_of[lam]
        ids[mask] = local[inverse]
        return fresh

    e_final = e
    saturated_final = 0
    clamped: set = set()

    if policy == "escalate-precision" and n_sat:
        e2 = min(2 * e, max_precision(p))
        if e2 > e:
            e_final = e2
            esc_idx = indices[saturated]
            keys2 = kernels.cokernel_keys(p, e2, n, u, seed, esc_idx, workers=workers)
            intern_keys(~saturated & ~overflow, keys, e)
            # write escalated readings into their slots
            over2 = keys2 == kernels.OVERFLOW_KEY
            sub_ids = np.empty(esc_idx.size, dtype=np.int64)
            uniq, inverse = np.unique(keys2[~over2], return_inverse=True)
            local = np.empty(uniq.size, dtype=np.int64)
            for i, k in enumerate(uniq.tolist()):
                lam = kernels.decode_key(k, e2)
                if lam not in type_of:
                    type_of[lam] = len(types)
                    types.append(lam)
                local[i] = type_of[lam]
                if lam and lam[0] >= e2:
                    clamped.add(type_of[lam])
            sub_ids[~over2] = local[inverse]
            sub_ids[over2] = OVERFLOW
            ids[saturated] = sub_ids
            saturated_final = int(
                sum(1 for t in sub_ids.tolist() if t in clamped)
            )
        else:
            policy = "tally-as-other"  # cannot escalate past the word limit

    if not (policy == "escalate-precision" and n_sat and e_final > e):
        if policy == "discard-and-count":
            intern_keys(~saturated & ~overflow, keys, e)
            ids[saturated] = DISCARDED
        else:
            intern_keys(~overflow, keys, e)
            for lam, i in type_of.items():
                if lam and lam[0] >= e:
                    clamped.add(i)
            saturated_final = n_sat

    ids[overflow] = OVERFLOW
    return ObservedTypes(ids, types, n_sat, saturated_final, frozenset(clamped), e_final)


def _tally(obs: ObservedTypes) -> dict:
    """partition -> count over all recorded samples."""
    valid = obs.type_ids >= 0
    if not valid.any():
        return {}
    counts = np.bincount(obs.type_ids[valid], minlength=len(obs.types))
    return {obs.types[i]: int(c) for i, c in enumerate(counts) if c}


def _count_sentinel(obs: ObservedTypes, sentinel: int) -> int:
    return int((obs.type_ids == sentinel).sum())


# ---------------------------------------------------------------------------
# experiments

def _start_report(kind: str, cfg_dict: dict, invocation: str | None) -> tuple:
    return time.perf_counter(), ExperimentReport(
        kind=kind, config=cfg_dict, results={}, checks=[], invocation=invocation
    )


def _finish(report: ExperimentReport, t0: float, samples: int) -> ExperimentReport:
    wall = time.perf_counter() - t0
    report.timing = {
        "wall_seconds": wall,
        "samples_per_second": samples / wall if wall > 0 else 0.0,
    }
    return report


def _distribution_bins(measure: CLMeasure, tally: dict, n_eff: int,
                       tracked_max_size: int, clamped_types: set) -> tuple:
    """Split the tally into tracked partition bins plus an 'other' bucket.

    Clamped (still-saturated) readings never count as a tracked partition:
    their true partition has a larger part than recorded.
    """
    tracked = partitions_up_to(tracked_max_size)
    theory = {lam: float(limiting_probability(measure, lam)) for lam in tracked}
    counts = {}
    other = 0
    for lam, c in tally.items():
        if lam in theory and lam not in clamped_types:
            counts[lam] = counts.get(lam, 0) + c
        else:
            other += c
    for lam in tracked:
        counts.setdefault(lam, 0)
    theory_other = 1.0 - sum(theory.values())
    return tracked, theory, counts, other, theory_other


def run_distribution_experiment(cfg: ExperimentConfig,
                                invocation: str | None = None) -> ExperimentReport:
    """Empirical torsion-type frequencies against the limiting measure.

    Tallies each sample's torsion partition into tracked bins plus 'other',
    runs a chi-square goodness-of-fit over bins with expected count >= 5,
    and attaches a Wilson interval per tracked bin.
    """
    spec = cfg.spec()
    p, e = spec.p, spec.e
    t0, report = _start_report("distribution", cfg.to_dict(), invocation)
    measure = CLMeasure(p, cfg.u)

    if cfg.count == 0:
        report.results = {
            "bins": [], "other": {"count": 0, "frequency": 0.0, "theory": 0.0},
            "sample_count": 0, "effective_count": 0, "discarded": 0,
            "saturation": {"first_pass": 0, "unresolved": 0, "fraction": 0.0,
                           "final_precision": e},
            "chi_square": None,
        }
        return _finish(report, t0, 0)

    obs = _observe_types(p, e, cfg.n, cfg.u, cfg.seed, cfg.count,
                         cfg.saturation_policy, cfg.workers)
    tally = _tally(obs)
    discarded = _count_sentinel(obs, DISCARDED)
    overflow = _count_sentinel(obs, OVERFLOW)
    n_eff = cfg.count - discarded
    clamped_types = {obs.types[i] for i in obs.clamped_ids}

    tracked, theory, counts, other, theory_other = _distribution_bins(
        measure, tally, n_eff, cfg.tracked_max_size, clamped_types)
    other += overflow

    sat_fraction = obs.saturated_first / cfg.count
    if cfg.saturation_policy == "discard-and-count" and sat_fraction > 0.01:
        report.warnings.append(
            f"saturation fraction {sat_fraction:.4f} exceeds 1% under discard policy; "
            "empirical frequencies are conditioned on non-saturation")
    if overflow:
        report.warnings.append(f"{overflow} samples had unencodably many torsion parts")

    bins = []
    for lam in tracked:
        cnt = counts[lam]
        lo, hi = wilson_interval(cnt, n_eff) if n_eff else (0.0, 1.0)
        bins.append({
            "partition": format_partition(lam),
            "count": cnt,
            "frequency": cnt / n_eff if n_eff else 0.0,
            "theory": theory[lam],
            "wilson99_low": lo,
            "wilson99_high": hi,
            "theory_in_wilson": bool(lo <= theory[lam] <= hi),
        })

    # chi-square over bins with adequate expectation; the rest merge into other
    chi_obs, chi_exp, chi_labels = [], [], []
    small_obs, small_exp = other, theory_other * n_eff
    for lam in tracked:
        exp = theory[lam] * n_eff
        if exp >= 5.0:
            chi_obs.append(counts[lam])
            chi_exp.append(exp)
            chi_labels.append(format_partition(lam))
        else:
            small_obs += counts[lam]
            small_exp += exp
    if small_exp >= 5.0 or not chi_obs:
        chi_obs.append(small_obs)
        chi_exp.append(small_exp)
        chi_labels.append("other")
    else:
        chi_obs[-1] += small_obs
        chi_exp[-1] += small_exp
        chi_labels[-1] += "+other"
    stat, dof, pvalue = chi_square_gof(chi_obs, chi_exp)

    report.results = {
        "bins": bins,
        "other": {"count": other, "frequency": other / n_eff if n_eff else 0.0,
                  "theory": theory_other},
        "sample_count": cfg.count,
        "effective_count": n_eff,
        "discarded": discarded,
        "saturation": {
            "first_pass": obs.saturated_first,
            "unresolved": obs.saturated_final,
            "fraction": sat_fraction,
            "final_precision": obs.final_precision,
        },
        "chi_square": {"statistic": stat, "dof": dof, "p_value": pvalue,
                       "bins": chi_labels},
    }
    report.checks.append({
        "name": "chi_square_not_rejected",
        "passed": bool(pvalue >= cfg.alpha),
        "statistic": stat, "dof": dof, "p_value": pvalue, "alpha": cfg.alpha,
    })
    trivial = bins[0]
    report.checks.append({
        "name": "trivial_frequency_in_wilson99",
        "passed": trivial["theory_in_wilson"],
        "frequency": trivial["frequency"],
        "theory": trivial["theory"],
        "interval": [trivial["wilson99_low"], trivial["wilson99_high"]],
    })
    return _finish(report, t0, cfg.count)


def _moment_row(mu: Partition, tally: dict, n_eff: int, values: dict,
                target: Fraction, target_name: str) -> dict:
    """Empirical mean of a per-type statistic vs an exact target, with z-score."""
    s1 = sum(values[lam] * c for lam, c in tally.items())
    s2 = sum(values[lam] ** 2 * c for lam, c in tally.items())
    mean = Fraction(s1, n_eff)
    var = Fraction(s2, n_eff) - mean * mean
    sigma_mean = math.sqrt(float(var) / n_eff) if n_eff else float("inf")
    gap = float(mean - target)
    if sigma_mean > 0:
        z = gap / sigma_mean
    else:
        z = 0.0 if mean == target else math.inf
    return {
        "mu": format_partition(mu),
        "target_kind": target_name,
        "empirical_mean": float(mean),
        "target": float(target),
        "target_exact": f"{target.numerator}/{target.denominator}",
        "sigma_mean": sigma_mean,
        "z": z,
        "within_3_sigma": bool(abs(z) <= 3.0),
    }


def run_moment_experiment(cfg: ExperimentConfig, mu_list: Sequence,
                          invocation: str | None = None) -> ExperimentReport:
    """Empirical surjection moments vs exact finite-n and limiting values.

    For each mu: the full-cokernel moment E[#Sur(Z_p^u + T, G_mu)] is compared
    with its exact finite-n value (sharp at every n), and the torsion moment
    E[#Sur(T, G_mu)] with its n->infinity limit p^{-u |mu|}.

    Per-sample surjection counts are exact integers computed per observed
    type, so the empirical means are exact rationals.
    """
    spec = cfg.spec()
    p, e = spec.p, spec.e
    mus = [validate_partition(mu) for mu in mu_list]
    for mu in mus:
        if size(mu) > 6:
            raise ValueError(f"mu {mu} too large: require p^|mu| <= p^6 "
                             "(estimator variance grows with |mu|)")
        if mu and mu[0] > e:
            raise ValueError(f"mu {mu} has a part exceeding precision e={e}")
    t0, report = _start_report("moments", cfg.to_dict(), invocation)
    report.results = {"rows": [], "sample_count": cfg.count, "effective_count": 0,
                      "discarded": 0, "saturation": None}
    if cfg.count == 0:
        return _finish(report, t0, 0)

    obs = _observe_types(p, e, cfg.n, cfg.u, cfg.seed, cfg.count,
                         cfg.saturation_policy, cfg.workers)
    tally = _tally(obs)
    discarded = _count_sentinel(obs, DISCARDED) + _count_sentinel(obs, OVERFLOW)
    n_eff = cfg.count - discarded
    if discarded and cfg.saturation_policy == "discard-and-count":
        report.warnings.append(
            f"moment estimates conditioned on non-saturation ({discarded} discarded); "
            f"bias is bounded by the saturation fraction {obs.saturated_first / cfg.count:.2e}")
    if obs.saturated_final:
        report.warnings.append(
            f"{obs.saturated_final} samples kept clamped readings; #Sur values are "
            "still exact because every tracked mu has parts <= e")

    rows = []
    for mu in mus:
        full_vals = {lam: sur_count_with_free(cfg.u, lam, mu, p) for lam in tally}
        tors_vals = {lam: sur_count(lam, mu, p) for lam in tally}
        rows.append(_moment_row(mu, tally, n_eff, full_vals,
                                exact_moment_coker(cfg.n, cfg.u, mu, p),
                                "exact_finite_n"))
        rows.append(_moment_row(mu, tally, n_eff, tors_vals,
                                Fraction(1, p ** (cfg.u * size(mu))),
                                "torsion_limit"))
    report.results.update({
        "rows": rows,
        "effective_count": n_eff,
        "discarded": discarded,
        "saturation": {
            "first_pass": obs.saturated_first,
            "unresolved": obs.saturated_final,
            "fraction": obs.saturated_first / cfg.count,
            "final_precision": obs.final_precision,
        },
    })
    for row in rows:
        report.checks.append({
            "name": f"moment_{row['target_kind']}_mu_{row['mu']}",
            "passed": row["within_3_sigma"],
            "z": row["z"],
            "empirical": row["empirical_mean"],
            "target": row["target"],
        })
    return _finish(report, t0, cfg.count)


def run_saturation_sweep(p: int, u: int, n: int, e_list: Sequence[int], count: int,
                         seed: int = 0, workers: int = 1,
                         invocation: str | None = None) -> ExperimentReport:
    """Saturation fraction as a function of the working precision e.

    Reports, per e, the raw first-pass saturation fraction and the fraction
    left unresolved after one precision doubling.  Raw fractions decay like
    P(some torsion part >= e), which tends to 0 as e grows but carries a
    CL-measure constant; the unresolved fraction decays like P(part >= 2e).
    """
    cfg_dict = {"primes": [p], "precisions": list(e_list), "n": n, "u": u,
                "seed": seed, "count": count, "workers": workers,
                "saturation_policy": "escalate-precision"}
    t0, report = _start_report("saturation_sweep", cfg_dict, invocation)
    rows = []
    for e in e_list:
        SampleSpec.single(p, e, n, u, seed, count)  # validates p^e word limit
        if count:
            obs = _observe_types(p, e, n, u, seed, count, "escalate-precision", workers)
            raw, unresolved = obs.saturated_first, obs.saturated_final
            e_fin = obs.final_precision
        else:
            raw = unresolved = 0
            e_fin = e
        rows.append({
            "e": e,
            "raw_saturated": raw,
            "raw_fraction": raw / count if count else 0.0,
            "unresolved_saturated": unresolved,
            "unresolved_fraction": unresolved / count if count else 0.0,
            "escalated_precision": e_fin,
        })
    report.results = {"rows": rows, "sample_count": count}

    # decay check: raw fraction nonincreasing in e up to 3-sigma binomial noise
    ok = True
    for prev, cur in zip(rows, rows[1:]):
        slack = 3 * math.sqrt(max(prev["raw_fraction"], 1e-12) / count) if count else 0.0
        if cur["raw_fraction"] > prev["raw_fraction"] + slack:
            ok = False
    report.checks.append({"name": "raw_saturation_nonincreasing", "passed": ok})
    return _finish(report, t0, count * len(list(e_list)))


def run_convergence_sweep(p: int, u: int, n_list: Sequence[int], count: int,
                          e: int = 10, seed: int = 0, tracked_max_size: int = 8,
                          workers: int = 1,
                          invocation: str | None = None) -> ExperimentReport:
    """Total-variation distance to the limiting measure as n grows."""
    cfg_dict = {"primes": [p], "precisions": [e], "n_list": list(n_list), "u": u,
                "seed": seed, "count": count, "workers": workers,
                "tracked_max_size": tracked_max_size}
    t0, report = _start_report("convergence_sweep", cfg_dict, invocation)
    measure = CLMeasure(p, u)
    rows = []
    for n in n_list:
        if count == 0:
            rows.append({"n": n, "tv_distance": None})
            continue
        obs = _observe_types(p, e, n, u, seed, count, "escalate-precision", workers)
        tally = _tally(obs)
        clamped_types = {obs.types[i] for i in obs.clamped_ids}
        tracked, theory, counts, other, theory_other = _distribution_bins(
            measure, tally, count, tracked_max_size, clamped_types)
        tv = abs(other / count - theory_other)
        for lam in tracked:
            tv += abs(counts[lam] / count - theory[lam])
        rows.append({"n": n, "tv_distance": tv / 2})
    report.results = {"rows": rows, "sample_count": count}
    if count and len(rows) >= 2 and rows[0]["tv_distance"] is not None:
        report.checks.append({
            "name": "tv_decreases_from_first_to_last",
            "passed": bool(rows[-1]["tv_distance"] < rows[0]["tv_distance"]),
            "first": rows[0]["tv_distance"],
            "last": rows[-1]["tv_distance"],
        })
    return _finish(report, t0, count * len(list(n_list)))


def run_multiprime_experiment(cfg: ExperimentConfig,
                              invocation: str | None = None) -> ExperimentReport:
    """Joint torsion statistics for a matrix over prod_p Z_p.

    Per-prime streams are independent by construction; the test compares the
    joint all-trivial frequency with the product of per-prime limiting
    values and runs a pairwise independence chi-square over tracked types.
    """
    spec = cfg.spec()
    t0, report = _start_report("multiprime", cfg.to_dict(), invocation)
    primes = list(spec.primes)
    if cfg.count == 0:
        report.results = {"per_prime": [], "joint_trivial": None, "independence": []}
        return _finish(report, t0, 0)

    per_obs = []
    for p, e in zip(spec.primes, spec.precisions):
        per_obs.append(_observe_types(p, e, cfg.n, cfg.u, cfg.seed, cfg.count,
                                      cfg.saturation_policy, cfg.workers))
    valid = np.ones(cfg.count, dtype=bool)
    for obs in per_obs:
        valid &= obs.type_ids >= 0
    n_eff = int(valid.sum())

    # per-prime category arrays: tracked partitions then 'other'
    tracked = partitions_up_to(cfg.tracked_max_size)
    tracked_index = {lam: i for i, lam in enumerate(tracked)}
    n_cat = len(tracked) + 1
    cats = []
    per_prime_rows = []
    for p, obs in zip(primes, per_obs):
        lut = np.full(len(obs.types), n_cat - 1, dtype=np.int64)
        for i, lam in enumerate(obs.types):
            if lam in tracked_index and i not in obs.clamped_ids:
                lut[i] = tracked_index[lam]
        cat = lut[obs.type_ids[valid]]
        cats.append(cat)
        trivial_count = int((cat == tracked_index[()]).sum())
        theory_trivial = float(limiting_probability(CLMeasure(p, cfg.u), ()))
        per_prime_rows.append({
            "p": p,
            "trivial_count": trivial_count,
            "trivial_frequency": trivial_count / n_eff if n_eff else 0.0,
            "theory_trivial": theory_trivial,
        })

    joint_trivial = int(np.all([c == tracked_index[()] for c in cats], axis=0).sum()) if n_eff else 0
    q = 1.0
    for row in per_prime_rows:
        q *= row["theory_trivial"]
    sigma = math.sqrt(q * (1 - q) / n_eff) if n_eff else float("inf")
    phat = joint_trivial / n_eff if n_eff else 0.0
    z = (phat - q) / sigma if sigma > 0 else 0.0

    independence = []
    for a in range(len(primes)):
        for b in range(a + 1, len(primes)):
            table = np.zeros((n_cat, n_cat), dtype=np.int64)
            np.add.at(table, (cats[a], cats[b]), 1)
            table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
            if min(table.shape) < 2:
                independence.append({"primes": [primes[a], primes[b]],
                                     "statistic": 0.0, "dof": 0, "p_value": 1.0})
                continue
            res = _sps.chi2_contingency(table)
            independence.append({
                "primes": [primes[a], primes[b]],
                "statistic": float(res.statistic),
                "dof": int(res.dof),
                "p_value": float(res.pvalue),
            })

    report.results = {
        "per_prime": per_prime_rows,
        "effective_count": n_eff,
        "sample_count": cfg.count,
        "joint_trivial": {
            "count": joint_trivial,
            "frequency": phat,
            "theory_product": q,
            "sigma": sigma,
            "z": z,
        },
        "independence": independence,
    }
    report.checks.append({
        "name": "joint_trivial_within_3_sigma",
        "passed": bool(abs(z) <= 3.0),
        "z": z, "frequency": phat, "theory": q,
    })
    for row in independence:
        report.checks.append({
            "name": f"independence_p{row['primes'][0]}_p{row['primes'][1]}",
            "passed": bool(row["p_value"] >= cfg.alpha),
            "p_value": row["p_value"],
        })
    return _finish(report, t0, cfg.count * len(primes))
