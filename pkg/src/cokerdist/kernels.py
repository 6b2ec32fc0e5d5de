"""Batch Monte Carlo core: sample -> SNF -> encoded torsion key, vectorized.

The numba kernels below are bit-for-bit twins of sampling.matrix_entries and
snf.smith_normal_form, restricted to p^e < 2^31 so products fit in int64.
Outside that range (or without numba) the dispatcher falls back to the pure
Python reference path with identical outputs; tests pin the equivalence.

A torsion partition (d_1 <= ... <= d_n, parts in [0, e]) is encoded into one
int64 key: digits are the nonzero parts in nonincreasing order, base e+1, so
key % (e+1) recovers the largest part (used for saturation detection).  The
sentinel -1 marks the astronomically rare partition with too many parts to
encode; callers tally it separately.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import sampling
from .sampling import GOLDEN, MASK64, SALT_MULT, max_precision, rejection_threshold
from .snf import MatrixModPE, smith_normal_form

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


KERNEL_PE_LIMIT = 2**31  # int64 products stay below 2^62
OVERFLOW_KEY = -1
_PW_LIMIT = 1 << 55

_U = np.uint64
_GOLDEN = _U(GOLDEN)
_SALT_MULT = _U(SALT_MULT)
_C1 = _U(0xBF58476D1CE4E5B9)
_C2 = _U(0x94D049BB133111EB)
_S30 = _U(30)
_S27 = _U(27)
_S31 = _U(31)


@njit(cache=True, nogil=True)
def _mix64(z):
    z = (z ^ (z >> _S30)) * _C1
    z = (z ^ (z >> _S27)) * _C2
    return z ^ (z >> _S31)


@njit(cache=True, nogil=True)
def _stream_state(seed, index, salt):
    base = _mix64(seed ^ _mix64(salt * _SALT_MULT))
    return _mix64(base + index * _GOLDEN)


@njit(cache=True, nogil=True)
def _modinv(a, m):
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 != 0:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    return s0 % m


@njit(cache=True, nogil=True)
def _snf_valuations(A, rows, cols, p, e, pe, d):
    for k in range(cols):
        best_v = e + 1
        bi = -1
        bj = -1
        for i in range(k, rows):
            for j in range(k, cols):
                x = A[i, j]
                if x != 0:
                    v = 0
                    while x % p == 0:
                        x //= p
                        v += 1
                    if v < best_v:
                        best_v = v
                        bi = i
                        bj = j
            if best_v == 0:
                break
        if bi < 0:
            for kk in range(k, cols):
                d[kk] = e
            return
        d[k] = best_v

        if bi != k:
            for j in range(cols):
                A[k, j], A[bi, j] = A[bi, j], A[k, j]
        if bj != k:
            for i in range(rows):
                A[i, k], A[i, bj] = A[i, bj], A[i, k]

        pv = 1
        for _ in range(best_v):
            pv *= p
        inv = _modinv(A[k, k] // pv, pe)
        for j in range(k, cols):
            A[k, j] = A[k, j] * inv % pe
        for j in range(k + 1, cols):
            x = A[k, j]
            if x != 0:
                f = x // pv
                for i in range(k, rows):
                    A[i, j] = (A[i, j] - f * A[i, k]) % pe
        for i in range(k + 1, rows):
            A[i, k] = 0


@njit(cache=True, nogil=True)
def _encode(d, cols, e):
    base = e + 1
    key = 0
    pw = 1
    for j in range(cols - 1, -1, -1):
        dj = d[j]
        if dj == 0:
            break
        if pw > _PW_LIMIT:
            return OVERFLOW_KEY
        key += dj * pw
        pw *= base
    return key


@njit(cache=True, nogil=True)
def _fill_matrix(A, rows, cols, state, m, threshold, pe_u):
    for r in range(rows):
        for c in range(cols):
            while True:
                state = state + _GOLDEN
                u = _mix64(state)
                if u >= threshold:
                    break
            A[r, c] = np.int64((u % m) % pe_u)
    return state


@njit(cache=True, nogil=True)
def _key_batch(keys, indices, seed, salt, rows, cols, p, e, pe, m, threshold):
    A = np.empty((rows, cols), np.int64)
    d = np.empty(cols, np.int64)
    pe_u = _U(pe)
    for ii in range(indices.shape[0]):
        state = _stream_state(seed, _U(indices[ii]), salt)
        _fill_matrix(A, rows, cols, state, m, threshold, pe_u)
        _snf_valuations(A, rows, cols, p, e, pe, d)
        keys[ii] = _encode(d, cols, e)


def encode_parts(d, e: int) -> int:
    """Python twin of the kernel key encoding; d is ascending valuations."""
    base = e + 1
    key = 0
    pw = 1
    for j in range(len(d) - 1, -1, -1):
        dj = d[j]
        if dj == 0:
            break
        if pw > _PW_LIMIT:
            return OVERFLOW_KEY
        key += dj * pw
        pw *= base
    return key


def decode_key(key: int, e: int) -> tuple:
    """Invert encode_parts: key -> torsion partition, parts nonincreasing."""
    base = e + 1
    parts = []
    key = int(key)
    while key:
        parts.append(key % base)
        key //= base
    return tuple(parts)


def kernel_available(pe: int) -> bool:
    return HAVE_NUMBA and pe < KERNEL_PE_LIMIT


def _keys_python(keys, indices, p, e, rows, cols, seed, salt):
    for i, idx in enumerate(indices):
        ent = sampling.matrix_entries(p, e, rows, cols, seed, int(idx), salt)
        d = smith_normal_form(MatrixModPE(p, e, ent)).valuations
        keys[i] = encode_parts(d, e)


def cokernel_keys(p: int, e: int, n: int, u: int, seed: int, indices,
                  salt: int | None = None, workers: int = 1) -> np.ndarray:
    """Encoded torsion keys for the given sample indices.

    Pure function of (seed, index, p) per slot: chunking across worker
    threads cannot change the result.
    """
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    total = indices.shape[0]
    keys = np.empty(total, dtype=np.int64)
    if total == 0:
        return keys
    rows, cols = n + u, n
    pe = p**e
    salt = p if salt is None else salt
    if not kernel_available(pe):
        _keys_python(keys, indices, p, e, rows, cols, seed, salt)
        return keys

    m = p ** max_precision(p)
    args = (
        _U(seed & MASK64),
        _U(salt),
        rows,
        cols,
        p,
        e,
        pe,
        _U(m),
        _U(rejection_threshold(m)),
    )
    chunk = max(4096, -(-total // max(workers, 1)))
    if workers <= 1 or total <= chunk:
        _key_batch(keys, indices, *args)
        return keys
    bounds = [(a, min(a + chunk, total)) for a in range(0, total, chunk)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_key_batch, keys[a:b], indices[a:b], *args) for a, b in bounds
        ]
        for f in futures:
            f.result()
    return keys


def sample_matrix_kernel(p: int, e: int, rows: int, cols: int, seed: int, index: int,
                         salt: int | None = None) -> np.ndarray:
    """Single matrix through the numba path (test surface for stream equality)."""
    if not HAVE_NUMBA:
        raise RuntimeError("numba unavailable")
    A = np.empty((rows, cols), dtype=np.int64)
    m = p ** max_precision(p)
    salt = p if salt is None else salt
    # the dispatcher returns a Python int; recast so numba sees uint64
    state = _U(int(_stream_state(_U(seed & MASK64), _U(index), _U(salt))))
    _fill_matrix(A, rows, cols, state, _U(m), _U(rejection_threshold(m)), _U(p**e))
    return A
