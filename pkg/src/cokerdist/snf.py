"""Linear algebra over Z/p^e: Smith normal form and cokernel observation.

A matrix M over Z/p^e is the finite-precision surrogate for a Haar-random
matrix over the p-adic integers; its diagonal valuations d_1 <= ... <= d_n
determine coker(M) = (Z/p^e)^u + sum_i Z/p^{d_i}.  A valuation equal to e
("saturation") means the true p-adic valuation is not determined at this
precision; detection happens here, policy lives in the experiment layer.

Also provides the classical integer SNF used as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

from .partitions import Partition
from .primes import require_prime

WORD_LIMIT = 2**63


@dataclass
class MatrixModPE:
    """An (n+u) x n matrix with entries reduced mod p^e.

    p^e must fit a double-width machine word (p^e < 2^63) and the matrix may
    not be wider than tall (rows = n+u, cols = n with u >= 0).
    """

    p: int
    e: int
    entries: list  # list of row lists
    modulus: int = field(init=False)

    def __post_init__(self):
        require_prime(self.p)
        if self.e < 1:
            raise ValueError("precision e must be >= 1")
        pe = self.p**self.e
        if pe >= WORD_LIMIT:
            raise ValueError(f"p^e = {pe} does not fit a 63-bit word")
        self.modulus = pe
        rows = len(self.entries)
        if rows == 0 or len(self.entries[0]) == 0:
            raise ValueError("matrix must be nonempty")
        cols = len(self.entries[0])
        if any(len(r) != cols for r in self.entries):
            raise ValueError("ragged rows")
        if rows < cols:
            raise ValueError("matrix must have rows >= cols (u >= 0)")
        self.entries = [[x % pe for x in row] for row in self.entries]

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])


class CokernelObservation(NamedTuple):
    torsion: Partition    # nonunit invariant-factor valuations, nonincreasing
    free_rank: int        # rows - cols
    saturated: bool       # some valuation reached the working precision


class SnfResult(NamedTuple):
    valuations: tuple           # d_1 <= ... <= d_cols, each in [0, e]
    row_transform: list | None  # U with U*M*V = diag(p^d) mod p^e
    col_transform: list | None  # V


def valuation(x: int, p: int, e: int) -> int:
    """Largest v <= e with p^v | x; by convention valuation(0) = e."""
    if x == 0:
        return e
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return min(v, e)


def smith_normal_form(M: MatrixModPE, transforms: bool = False) -> SnfResult:
    """Diagonalize M over Z/p^e by valuation pivoting.

    At each step the entry of minimal valuation in the working submatrix is
    moved to the pivot (first in row-major order among ties), its unit part
    is scaled away, and its row and column are eliminated.  Minimal-valuation
    pivoting makes the d_i nondecreasing automatically.

    With transforms=True also returns U, V invertible mod p^e such that
    U*M*V is exactly diag(p^{d_1}, ..., p^{d_n}) mod p^e.
    """
    p, e, pe = M.p, M.e, M.modulus
    rows, cols = M.rows, M.cols
    A = [row[:] for row in M.entries]
    U = [[int(i == j) for j in range(rows)] for i in range(rows)] if transforms else None
    V = [[int(i == j) for j in range(cols)] for i in range(cols)] if transforms else None
    d = [0] * cols

    for k in range(cols):
        best_v, bi, bj = e + 1, -1, -1
        for i in range(k, rows):
            for j in range(k, cols):
                x = A[i][j]
                if x:
                    v = 0
                    while x % p == 0:
                        x //= p
                        v += 1
                    if v < best_v:
                        best_v, bi, bj = v, i, j
            if best_v == 0:
                break
        if bi < 0:
            for kk in range(k, cols):
                d[kk] = e
            break
        d[k] = best_v

        A[k], A[bi] = A[bi], A[k]
        if transforms:
            U[k], U[bi] = U[bi], U[k]
        if bj != k:
            for row in A:
                row[k], row[bj] = row[bj], row[k]
            if transforms:
                for row in V:
                    row[k], row[bj] = row[bj], row[k]

        pv = p**best_v
        inv = pow(A[k][k] // pv, -1, pe)
        A[k] = [x * inv % pe for x in A[k]]
        if transforms:
            U[k] = [x * inv % pe for x in U[k]]

        # pivot row is now (0,...,0, p^v, a_{k+1}, ...): clear the tail by
        # column operations, then the pivot column by row operations (which
        # at that point touch only column k).
        for j in range(k + 1, cols):
            x = A[k][j]
            if x:
                f = x // pv
                for i in range(k, rows):
                    A[i][j] = (A[i][j] - f * A[i][k]) % pe
                if transforms:
                    for row in V:
                        row[j] = (row[j] - f * row[k]) % pe
        for i in range(k + 1, rows):
            x = A[i][k]
            if x:
                f = x // pv
                A[i][k] = 0
                if transforms:
                    U[i] = [(a - f * b) % pe for a, b in zip(U[i], U[k])]

    return SnfResult(tuple(d), U, V)


def observe_cokernel(M: MatrixModPE) -> CokernelObservation:
    """Read off the cokernel type at working precision.

    The torsion partition collects the nonzero diagonal valuations in
    nonincreasing order; the free rank is rows - cols (the matrix has full
    column rank with probability 1); saturated means some valuation hit e.
    """
    d = smith_normal_form(M).valuations
    torsion = tuple(sorted((v for v in d if v > 0), reverse=True))
    saturated = bool(torsion) and torsion[0] >= M.e
    return CokernelObservation(torsion, M.rows - M.cols, saturated)


def integer_snf_oracle(mat: list) -> tuple:
    """Invariant factors of a small integer matrix by classical gcd elimination.

    Intended for test instances (dimension <= 6, entries up to ~10^6); returns
    nonnegative d_1 | d_2 | ... with zeros (rank deficiency) at the end.
    """
    A = [[int(x) for x in row] for row in mat]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    r = min(rows, cols)
    result = []
    for k in range(r):
        while True:
            # min |nonzero| entry into the pivot slot
            bi = bj = -1
            best = None
            for i in range(k, rows):
                for j in range(k, cols):
                    x = abs(A[i][j])
                    if x and (best is None or x < best):
                        best, bi, bj = x, i, j
            if bi < 0:
                break
            A[k], A[bi] = A[bi], A[k]
            for row in A:
                row[k], row[bj] = row[bj], row[k]
            if A[k][k] < 0:
                A[k] = [-x for x in A[k]]
            pivot = A[k][k]

            dirty = False
            for i in range(k + 1, rows):
                q = A[i][k] // pivot
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[k])]
                if A[i][k]:
                    dirty = True
            for j in range(k + 1, cols):
                q = A[k][j] // pivot
                if q:
                    for i in range(k, rows):
                        A[i][j] -= q * A[i][k]
                if A[k][j]:
                    dirty = True
            if dirty:
                continue
            # pivot must divide the rest of the submatrix for d_k | d_{k+1}
            fix = None
            for i in range(k + 1, rows):
                for j in range(k + 1, cols):
                    if A[i][j] % pivot:
                        fix = i
                        break
                if fix is not None:
                    break
            if fix is None:
                break
            A[k] = [a + b for a, b in zip(A[k], A[fix])]
        result.append(abs(A[k][k]) if A[k][k] else 0)
    # zeros (if any) belong at the end; nonzeros already divide in order
    nonzero = [x for x in result if x]
    return tuple(nonzero + [0] * (len(result) - len(nonzero)))
