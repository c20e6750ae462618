"""Exact GF(2) linear algebra: polar generator matrices, ranks, nullspaces.

Matrices are stored as dense 0/1 arrays; during elimination each row is
handled as a Python-int bitset so every rank and nullspace is exact at any
size used here.  All indices in this module (and throughout the library)
are 0-based; only serialized reports use 1-based indices.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


class BitVector:
    """An immutable vector over GF(2).  Zero length is allowed."""

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int]):
        arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits,
                         dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError(f"bit vector must be one-dimensional, got shape {arr.shape}")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("bit vector entries must be 0 or 1")
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(np.zeros(length, dtype=np.uint8))

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    def __len__(self) -> int:
        return self._bits.size

    def __getitem__(self, i):
        return int(self._bits[i])

    def __iter__(self):
        return iter(int(b) for b in self._bits)

    def __xor__(self, other: "BitVector") -> "BitVector":
        if len(self) != len(other):
            raise ValueError("length mismatch in GF(2) addition")
        return BitVector(self._bits ^ other._bits)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return len(self) == len(other) and bool((self._bits == other._bits).all())

    def __hash__(self):
        return hash(self._bits.tobytes())

    def __repr__(self) -> str:
        return f"BitVector({''.join(str(b) for b in self._bits)!r})"


class Gf2Matrix:
    """A dense matrix over GF(2).  Zero rows are allowed (empty dual basis)."""

    __slots__ = ("_entries",)

    def __init__(self, entries):
        arr = np.asarray(entries, dtype=np.uint8)
        if arr.ndim != 2:
            raise ValueError(f"matrix must be two-dimensional, got shape {arr.shape}")
        if arr.shape[1] < 1:
            raise ValueError("matrix must have at least one column")
        if arr.size and not np.isin(arr, (0, 1)).all():
            raise ValueError("matrix entries must be 0 or 1")
        arr.setflags(write=False)
        self._entries = arr

    @classmethod
    def identity(cls, n: int) -> "Gf2Matrix":
        return cls(np.eye(n, dtype=np.uint8))

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def rows(self) -> int:
        return self._entries.shape[0]

    @property
    def cols(self) -> int:
        return self._entries.shape[1]

    def row(self, i: int) -> BitVector:
        return BitVector(self._entries[i])

    def take_rows(self, indices: Sequence[int]) -> "Gf2Matrix":
        """Sub-matrix formed by the given rows, e.g. G_n(A) from G_n."""
        idx = np.asarray(list(indices), dtype=np.intp)
        if idx.size and (idx.min() < 0 or idx.max() >= self.rows):
            raise ValueError("row index out of range")
        return Gf2Matrix(self._entries[idx].reshape(len(idx), self.cols))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gf2Matrix):
            return NotImplemented
        return self._entries.shape == other._entries.shape and bool(
            (self._entries == other._entries).all())

    def __hash__(self):
        return hash((self._entries.shape, self._entries.tobytes()))

    def __repr__(self) -> str:
        return f"Gf2Matrix({self.rows}x{self.cols})"


def _require_power_of_two(n: int) -> None:
    if n < 1 or (n & (n - 1)) != 0:
        raise ValueError(f"block length must be a positive power of two, got {n}")


def reverse_shuffle(n: int) -> Gf2Matrix:
    """Permutation matrix sending s to v = (s1, s3, ..., s_{n-1}, s2, s4, ..., s_n).

    Odd-position entries (0-based even) move to the first half, even-position
    entries to the second half.  For n <= 2 this is the identity.
    """
    _require_power_of_two(n)
    r = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        dest = i // 2 if i % 2 == 0 else n // 2 + i // 2
        r[i, dest] = 1
    return Gf2Matrix(r)


def polar_generator(n: int) -> Gf2Matrix:
    """The n x n polar generator matrix built by the reverse-shuffle recursion.

    G_1 is the 1x1 identity; G_n is the product of the pairwise-XOR stage,
    the reverse shuffle and a block diagonal of two copies of G_{n/2}.  The
    two sparse left factors are applied structurally (row selection and row
    XOR), which evaluates the same product exactly.
    """
    _require_power_of_two(n)
    g = np.ones((1, 1), dtype=np.uint8)
    m = 1
    while m < n:
        m *= 2
        block = np.zeros((m, m), dtype=np.uint8)
        block[: m // 2, : m // 2] = g
        block[m // 2:, m // 2:] = g
        # rows of R_m . block: row i comes from row dest(i) of block
        dest = np.array([i // 2 if i % 2 == 0 else m // 2 + i // 2 for i in range(m)])
        shuffled = block[dest]
        # rows of (I ⊗ F) . shuffled with F = [[1,0],[1,1]]:
        # row 2k passes through, row 2k+1 = shuffled[2k] ^ shuffled[2k+1]
        out = shuffled.copy()
        out[1::2] ^= shuffled[0::2]
        g = out
    return Gf2Matrix(g)


def mat_vec_mul(v: BitVector, m: Gf2Matrix) -> BitVector:
    """Row vector times matrix over GF(2)."""
    if len(v) != m.rows:
        raise ValueError(f"dimension mismatch: vector length {len(v)} vs {m.rows} rows")
    prod = (v.bits.astype(np.int64) @ m.entries.astype(np.int64)) % 2
    return BitVector(prod.astype(np.uint8))


def _rows_as_ints(entries: np.ndarray) -> list:
    """Each row as a Python int bitset with bit j <-> column j."""
    ints = []
    for row in entries:
        acc = 0
        for j in np.flatnonzero(row):
            acc |= 1 << int(j)
        ints.append(acc)
    return ints


def _rank_ints(rows: list) -> int:
    """Rank over GF(2) of int-bitset rows (eliminate by most significant bit)."""
    pivots = {}
    rank = 0
    for v in rows:
        while v:
            b = v.bit_length() - 1
            if b in pivots:
                v ^= pivots[b]
            else:
                pivots[b] = v
                rank += 1
                break
    return rank


def rank_of_columns(m: Gf2Matrix, cols: Iterable[int]) -> int:
    """GF(2) rank of the sub-matrix formed by the selected columns."""
    idx = sorted(set(int(c) for c in cols))
    if not idx:
        return 0
    if idx[0] < 0 or idx[-1] >= m.cols:
        raise ValueError(f"column index out of range [0, {m.cols})")
    sub = m.entries[:, idx]
    return _rank_ints(_rows_as_ints(sub))


def parity_check_of(g: Gf2Matrix) -> Gf2Matrix:
    """Parity check of the code generated by g: full-row-rank H with H g^T = 0.

    Gaussian elimination pivots on the lowest available column index, so the
    result is reproducible.  One H row is emitted per free column, in
    increasing column order.  A full-dimension code yields a 0-row H.
    """
    k, n = g.rows, g.cols
    rows = _rows_as_ints(g.entries)
    # reduced row echelon form, pivoting left to right
    pivot_of_col = {}
    reduced = []
    for v in rows:
        for col, pv in pivot_of_col.items():
            if (v >> col) & 1:
                v ^= reduced[pv]
        if v == 0:
            raise ValueError("generator matrix is rank-deficient over GF(2)")
        col = (v & -v).bit_length() - 1
        for i, w in enumerate(reduced):
            if (w >> col) & 1:
                reduced[i] = w ^ v
        pivot_of_col[col] = len(reduced)
        reduced.append(v)
    free_cols = [c for c in range(n) if c not in pivot_of_col]
    h = np.zeros((len(free_cols), n), dtype=np.uint8)
    for r, f in enumerate(sorted(free_cols)):
        h[r, f] = 1
        for col, pv in pivot_of_col.items():
            h[r, col] = (reduced[pv] >> f) & 1
    return Gf2Matrix(h.reshape(len(free_cols), n))
