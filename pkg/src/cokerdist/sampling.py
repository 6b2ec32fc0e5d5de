"""Seeded, reproducible Haar sampling of matrices mod p^e.

Each sample index gets its own counter-derived generator state, so the
(seed, index) -> matrix map is a pure function: sampling is deterministic
under any parallel schedule and any worker count.

The generator is SplitMix64: per-sample initial state is a strong mix of
(seed, index, salt) and successive 64-bit outputs are finalizer(state += GOLDEN).
Entries are drawn by rejection against the largest multiple of the modulus in
the 64-bit range, so residues are exactly uniform (no modulo bias).

One deliberate wrinkle: for a given prime, entries are always drawn modulo
p^emax(p), the largest word-sized power of p, and then reduced to the working
precision e.  Sampling the same index at a higher precision therefore
*refines* the same underlying p-adic matrix instead of redrawing it, which is
what the precision-escalation policy in the experiment layer relies on.

The numba kernels in kernels.py reimplement this stream bit for bit; the
equivalence is covered by tests.
"""

from __future__ import annotations

from dataclasses import dataclass

from .primes import require_prime
from .snf import WORD_LIMIT, MatrixModPE

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
SALT_MULT = 0xD1B54A32D192ED03


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a strong 64-bit mixing permutation."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_state(seed: int, index: int, salt: int) -> int:
    """Initial generator state for one sample: strong-mix(seed, index, salt)."""
    base = mix64((seed & MASK64) ^ mix64((salt * SALT_MULT) & MASK64))
    return mix64((base + (index & MASK64) * GOLDEN) & MASK64)


def stream_next(state: int) -> tuple[int, int]:
    state = (state + GOLDEN) & MASK64
    return state, mix64(state)


def max_precision(p: int) -> int:
    """Largest e with p^e < 2^63 (the word-width constructor limit)."""
    e = 1
    while p ** (e + 1) < WORD_LIMIT:
        e += 1
    return e


def rejection_threshold(modulus: int) -> int:
    """Draws u below this are rejected; the rest map uniformly via u % modulus."""
    return (1 << 64) % modulus


def _draw(state: int, modulus: int, threshold: int) -> tuple[int, int]:
    while True:
        state, u = stream_next(state)
        if u >= threshold:
            return state, u % modulus


def matrix_entries(p: int, e: int, rows: int, cols: int, seed: int, index: int,
                   salt: int | None = None) -> list:
    """Row-major entries of the sample matrix, reduced mod p^e."""
    pe = p**e
    m = p ** max_precision(p)
    threshold = rejection_threshold(m)
    state = stream_state(seed, index, p if salt is None else salt)
    out = []
    for _ in range(rows):
        row = []
        for _ in range(cols):
            state, v = _draw(state, m, threshold)
            row.append(v % pe)
        out.append(row)
    return out


@dataclass(frozen=True)
class SampleSpec:
    """What to sample: primes/precisions, matrix shape, seed, sample count.

    Single-prime mode is a one-element primes tuple; the .p / .e accessors
    are for that case.  Multi-prime mode (distinct primes, one precision
    each) models a Haar-random matrix over prod_p Z_p by independent
    per-prime residue streams.
    """

    primes: tuple
    precisions: tuple
    n: int
    u: int
    seed: int
    count: int

    def __post_init__(self):
        if not self.primes:
            raise ValueError("need at least one prime")
        if len(self.primes) != len(self.precisions):
            raise ValueError("primes and precisions must pair up")
        if len(set(self.primes)) != len(self.primes):
            raise ValueError("primes must be distinct")
        for p, e in zip(self.primes, self.precisions):
            require_prime(p)
            if e < 1:
                raise ValueError("precision must be >= 1")
            if p**e >= WORD_LIMIT:
                raise ValueError(f"p^e = {p}^{e} does not fit a 63-bit word")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.u < 0:
            raise ValueError("u must be >= 0")
        if self.count < 0:
            raise ValueError("count must be >= 0")

    @classmethod
    def single(cls, p: int, e: int, n: int, u: int, seed: int, count: int) -> "SampleSpec":
        return cls((p,), (e,), n, u, seed, count)

    @property
    def p(self) -> int:
        if len(self.primes) != 1:
            raise ValueError("multi-prime spec has no single p")
        return self.primes[0]

    @property
    def e(self) -> int:
        if len(self.precisions) != 1:
            raise ValueError("multi-prime spec has no single e")
        return self.precisions[0]

    @property
    def rows(self) -> int:
        return self.n + self.u

    @property
    def cols(self) -> int:
        return self.n


def sample_matrix(spec: SampleSpec, index: int) -> MatrixModPE:
    """The index-th sample matrix of a single-prime spec."""
    if not 0 <= index < max(spec.count, 1):
        raise IndexError(f"sample index {index} outside [0, {spec.count})")
    p, e = spec.p, spec.e
    return MatrixModPE(p, e, matrix_entries(p, e, spec.rows, spec.cols, spec.seed, index))


def sample_multiprime(spec: SampleSpec, index: int) -> tuple:
    """One matrix per prime, drawn from disjoint per-prime sub-streams.

    Deterministic in (seed, index, prime); with a single prime this is
    exactly sample_matrix.
    """
    if not 0 <= index < max(spec.count, 1):
        raise IndexError(f"sample index {index} outside [0, {spec.count})")
    out = []
    for p, e in zip(spec.primes, spec.precisions):
        out.append(MatrixModPE(p, e, matrix_entries(p, e, spec.rows, spec.cols, spec.seed, index)))
    return tuple(out)
