"""Dense linear algebra over GF(2) on uint8 numpy arrays."""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np


def as_bits(a) -> np.ndarray:
    return np.asarray(a, dtype=np.uint8) & 1


def rref(M, col_order: Optional[Iterable[int]] = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``M``.

    Columns are swept in ``col_order`` (natural order by default), so the
    pivots are the first linearly independent columns in that order. Returns
    the reduced matrix (same shape, zero rows at the bottom) and the pivot
    column indices in the order they were found.
    """
    A = as_bits(M).copy()
    rows, cols = A.shape
    order = range(cols) if col_order is None else col_order
    pivots: list[int] = []
    r = 0
    for c in order:
        if r == rows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        hit = np.flatnonzero(A[:, c])
        hit = hit[hit != r]
        if hit.size:
            A[hit] ^= A[r]
        pivots.append(int(c))
        r += 1
    return A, pivots


def rank(M) -> int:
    M = as_bits(M)
    if M.size == 0:
        return 0
    return len(rref(M)[1])


def row_basis(M) -> np.ndarray:
    """Independent rows spanning the row space of ``M``."""
    R, piv = rref(M)
    return R[: len(piv)].copy()


def nullspace(M) -> np.ndarray:
    """Basis (as rows) of {x : M x = 0}."""
    M = as_bits(M)
    n = M.shape[1]
    R, piv = rref(M)
    free = [c for c in range(n) if c not in set(piv)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, p in enumerate(piv):
            basis[i, p] = R[r, f]
    return basis


def solve(A, b) -> Optional[np.ndarray]:
    """One solution of A x = b, or None when inconsistent."""
    A = as_bits(A)
    b = as_bits(b).reshape(-1, 1)
    aug = np.concatenate([A, b], axis=1)
    R, piv = rref(aug)
    if A.shape[1] in piv:
        return None
    x = np.zeros(A.shape[1], dtype=np.uint8)
    for r, p in enumerate(piv):
        x[p] = R[r, -1]
    return x


def pack_columns(M) -> list[int]:
    """Each column of ``M`` as a Python int (bit r = row r)."""
    return pack_rows(as_bits(M).T)


def pack_rows(M) -> list[int]:
    """Each row of ``M`` as a Python int (bit c = column c)."""
    return [sum(1 << int(c) for c in np.flatnonzero(row)) for row in as_bits(M)]


def unpack_rows(values, n: int) -> np.ndarray:
    return np.array([[(int(v) >> c) & 1 for c in range(n)] for v in values],
                    dtype=np.uint8).reshape(-1, n)


class XorBasis:
    """Incremental basis of a GF(2) subspace of integers (bit vectors)."""

    def __init__(self) -> None:
        self._by_lead: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._by_lead)

    def reduce(self, v: int) -> int:
        while v:
            lead = v.bit_length() - 1
            b = self._by_lead.get(lead)
            if b is None:
                return v
            v ^= b
        return 0

    def insert(self, v: int) -> bool:
        v = self.reduce(v)
        if not v:
            return False
        self._by_lead[v.bit_length() - 1] = v
        return True

    def __contains__(self, v: int) -> bool:
        return self.reduce(v) == 0

    def vectors(self) -> list[int]:
        return list(self._by_lead.values())


def prefix_ranks(M) -> np.ndarray:
    """r[i] = rank of the first i columns of ``M``, for i = 0..n."""
    cols = pack_columns(M)
    out = np.zeros(len(cols) + 1, dtype=np.int64)
    basis = XorBasis()
    for i, c in enumerate(cols):
        out[i + 1] = out[i] + basis.insert(c)
    return out


def suffix_ranks(M) -> np.ndarray:
    """r[i] = rank of columns i..n-1 of ``M``, for i = 0..n."""
    cols = pack_columns(M)
    n = len(cols)
    out = np.zeros(n + 1, dtype=np.int64)
    basis = XorBasis()
    for i in range(n - 1, -1, -1):
        out[i] = out[i + 1] + basis.insert(cols[i])
    return out


def span_all(rows) -> np.ndarray:
    """All 2^k combinations of the rows of a k x n matrix, as packed ints.

    Bit c of each result is column c. Intended for k <= 24.
    """
    rows = as_bits(rows)
    if rows.shape[1] > 63:
        raise ValueError("packed enumeration limited to n <= 63")
    words = np.zeros(1, dtype=np.int64)
    packed = pack_rows(rows)
    for r in packed:
        words = np.concatenate([words, words ^ r])
    return words


def enumerate_codewords(G) -> np.ndarray:
    """All codewords of the row space of G as a (2^k, n) uint8 array."""
    G = as_bits(G)
    k, n = G.shape
    msgs = ((np.arange(1 << k)[:, None] >> np.arange(k)[None, :]) & 1).astype(np.uint8)
    return (msgs @ G.astype(np.int64) % 2).astype(np.uint8) if k else np.zeros((1, n), np.uint8)
