"""Exact linear algebra over the two-element field.

Matrices are stored row-major with each row packed into 64-bit words, so
row operations are whole-word XORs.  Pivots are always the first set bit in
scan order, which keeps every result deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

WORD = 64


def _words(ncols: int) -> int:
    return max(1, (ncols + WORD - 1) // WORD)


def _pack_rows(dense: np.ndarray) -> np.ndarray:
    """Pack a 0/1 array of shape (r, c) into uint64 words, bit j of word k = column 64k+j."""
    r, c = dense.shape
    nw = _words(c)
    padded = np.zeros((r, nw * WORD), dtype=np.uint8)
    padded[:, :c] = dense & 1
    # little-endian bit order inside each byte, bytes little-endian inside each word
    packed = np.packbits(padded, axis=1, bitorder="little")
    return packed.view("<u8").reshape(r, nw).astype(np.uint64, copy=True)


def _unpack_rows(words: np.ndarray, ncols: int) -> np.ndarray:
    r = words.shape[0]
    if r == 0:
        return np.zeros((0, ncols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words.astype("<u8")).view(np.uint8).reshape(r, -1)
    bits = np.unpackbits(as_bytes, axis=1, bitorder="little")
    return bits[:, :ncols].copy()


class DimensionError(ValueError):
    """Raised when matrix or vector shapes do not fit together."""


@dataclass(frozen=True, eq=False)
class BitMatrix:
    """A rows x cols matrix over F2 with bit-packed rows.

    Instances are treated as immutable; every operation returns a new matrix.
    """

    rows: int
    cols: int
    bits: np.ndarray  # shape (rows, words), dtype uint64

    def __post_init__(self):
        if self.bits.shape != (self.rows, _words(self.cols)):
            raise DimensionError(
                f"storage shape {self.bits.shape} does not match {self.rows}x{self.cols}"
            )
        self.bits.setflags(write=False)

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, _words(cols)), dtype=np.uint64))

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        dense = np.eye(n, dtype=np.uint8)
        return cls.from_dense(dense)

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        arr = np.asarray(dense, dtype=np.uint8)
        if arr.ndim != 2:
            raise DimensionError("expected a 2-d array")
        return cls(arr.shape[0], arr.shape[1], _pack_rows(arr))

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[tuple[int, int]]) -> "BitMatrix":
        """Build from (row, col) positions; repeated positions cancel mod 2."""
        words = np.zeros((rows, _words(cols)), dtype=np.uint64)
        for i, j in entries:
            words[i, j // WORD] ^= np.uint64(1) << np.uint64(j % WORD)
        return cls(rows, cols, words)

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator, density: float = 0.5) -> "BitMatrix":
        return cls.from_dense((rng.random((rows, cols)) < density).astype(np.uint8))

    # access ---------------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> np.ndarray:
        return _unpack_rows(self.bits, self.cols)

    def entry(self, i: int, j: int) -> int:
        return int((int(self.bits[i, j // WORD]) >> (j % WORD)) & 1)

    def nonzero(self) -> list[tuple[int, int]]:
        d = self.to_dense()
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(d))]

    def is_zero(self) -> bool:
        return not self.bits.any()

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def select_rows(self, idx: Sequence[int]) -> "BitMatrix":
        idx = list(idx)
        return BitMatrix(len(idx), self.cols, self.bits[idx].copy() if idx else np.zeros((0, _words(self.cols)), dtype=np.uint64))

    def select_cols(self, idx: Sequence[int]) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense()[:, list(idx)])

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise DimensionError(f"cannot add {self.shape} and {other.shape}")
        return BitMatrix(self.rows, self.cols, self.bits ^ other.bits)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        return multiply(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self):
        return hash((self.rows, self.cols, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols}, rank={rank(self)})"


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of F2^ambient_dim, held as an independent list of row vectors."""

    ambient_dim: int
    basis: BitMatrix  # each row is a basis vector

    @property
    def dim(self) -> int:
        return self.basis.rows

    def vectors(self) -> np.ndarray:
        return self.basis.to_dense()

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=np.uint8).reshape(1, -1)
        stacked = BitMatrix.from_dense(np.vstack([self.basis.to_dense(), v]))
        return rank(stacked) == self.dim

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        if self.ambient_dim != other.ambient_dim or self.dim != other.dim:
            return False
        both = BitMatrix.from_dense(np.vstack([self.basis.to_dense(), other.basis.to_dense()]))
        return rank(both) == self.dim


# elimination core -----------------------------------------------------------

def _column_bits(words: np.ndarray, col: int) -> np.ndarray:
    return (words[:, col // WORD] >> np.uint64(col % WORD)) & np.uint64(1)


def _rref(words: np.ndarray, ncols: int, limit: Optional[int] = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of packed rows; returns (rows, pivot columns).

    Only the first ``limit`` columns are used as pivot candidates, which lets an
    augmented matrix carry extra columns along.
    """
    w = words.copy()
    nrows = w.shape[0]
    pivots: list[int] = []
    r = 0
    last = ncols if limit is None else limit
    for c in range(last):
        if r == nrows:
            break
        col = _column_bits(w[r:], c)
        hits = np.flatnonzero(col)
        if hits.size == 0:
            continue
        p = r + int(hits[0])
        if p != r:
            w[[r, p]] = w[[p, r]]
        mask = _column_bits(w, c).astype(bool)
        mask[r] = False
        if mask.any():
            w[mask] ^= w[r]
        pivots.append(c)
        r += 1
    return w, pivots


def rank(m: BitMatrix) -> int:
    """F2 rank of ``m``."""
    if m.rows == 0 or m.cols == 0:
        return 0
    # eliminate along the shorter side
    if m.rows > m.cols:
        m = m.transpose()
    _, piv = _rref(m.bits, m.cols)
    return len(piv)


def rref(m: BitMatrix) -> tuple[BitMatrix, list[int]]:
    w, piv = _rref(m.bits, m.cols)
    return BitMatrix(m.rows, m.cols, w), piv


def kernel_basis(m: BitMatrix) -> Subspace:
    """Basis of {v : m v = 0}."""
    n = m.cols
    if m.rows == 0:
        return Subspace(n, BitMatrix.identity(n))
    w, piv = _rref(m.bits, n)
    dense = _unpack_rows(w[: len(piv)], n)
    free = [c for c in range(n) if c not in set(piv)]
    out = np.zeros((len(free), n), dtype=np.uint8)
    for k, f in enumerate(free):
        out[k, f] = 1
        for i, p in enumerate(piv):
            if dense[i, f]:
                out[k, p] = 1
    return Subspace(n, BitMatrix.from_dense(out.reshape(len(free), n)))


def image_basis(m: BitMatrix) -> Subspace:
    """Basis of the column space of ``m`` (vectors of length rows)."""
    t = m.transpose()
    w, piv = _rref(t.bits, t.cols)
    return Subspace(m.rows, BitMatrix(len(piv), m.rows, w[: len(piv)].copy()))


def solve(m: BitMatrix, v) -> Optional[np.ndarray]:
    """Return some x with m x = v, or None if the system is inconsistent."""
    v = np.asarray(v, dtype=np.uint8).reshape(-1)
    if v.shape[0] != m.rows:
        raise DimensionError(f"right-hand side has length {v.shape[0]}, matrix has {m.rows} rows")
    aug = np.hstack([m.to_dense(), v.reshape(-1, 1)])
    w, piv = _rref(_pack_rows(aug), m.cols + 1, limit=m.cols)
    dense = _unpack_rows(w, m.cols + 1)
    if dense[len(piv):, m.cols].any():
        return None
    x = np.zeros(m.cols, dtype=np.uint8)
    for i, p in enumerate(piv):
        x[p] = dense[i, m.cols]
    return x


def solve_many(m: BitMatrix, rhs: BitMatrix) -> Optional[BitMatrix]:
    """Solve m X = rhs column by column in one elimination; None if any column fails."""
    if rhs.rows != m.rows:
        raise DimensionError("row counts differ")
    aug = np.hstack([m.to_dense(), rhs.to_dense()])
    w, piv = _rref(_pack_rows(aug), m.cols + rhs.cols, limit=m.cols)
    dense = _unpack_rows(w, m.cols + rhs.cols)
    if dense[len(piv):, m.cols:].any():
        return None
    x = np.zeros((m.cols, rhs.cols), dtype=np.uint8)
    for i, p in enumerate(piv):
        x[p] = dense[i, m.cols:]
    return BitMatrix.from_dense(x)


def multiply(a: BitMatrix, b: BitMatrix) -> BitMatrix:
    """F2 product a b."""
    if a.cols != b.rows:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    out = np.zeros((a.rows, _words(b.cols)), dtype=np.uint64)
    if a.rows == 0 or b.cols == 0 or a.cols == 0:
        return BitMatrix(a.rows, b.cols, out)
    ad = a.to_dense().astype(bool)
    # XOR together the rows of b selected by each column of a
    for k in range(a.cols):
        sel = ad[:, k]
        if sel.any():
            out[sel] ^= b.bits[k]
    return BitMatrix(a.rows, b.cols, out)


def hstack(blocks: Sequence[BitMatrix]) -> BitMatrix:
    return BitMatrix.from_dense(np.hstack([b.to_dense() for b in blocks]))


def vstack(blocks: Sequence[BitMatrix]) -> BitMatrix:
    cols = {b.cols for b in blocks}
    if len(cols) != 1:
        raise DimensionError("column counts differ")
    return BitMatrix(sum(b.rows for b in blocks), cols.pop(), np.vstack([b.bits for b in blocks]))


def inverse(m: BitMatrix) -> BitMatrix:
    """Inverse of a square invertible matrix."""
    if m.rows != m.cols:
        raise DimensionError("not square")
    x = solve_many(m, BitMatrix.identity(m.rows))
    if x is None or rank(m) != m.rows:
        raise ValueError("matrix is singular")
    return x


def independent_columns(m: BitMatrix) -> list[int]:
    """Greedy left-to-right maximal independent set of columns (the pivot columns)."""
    if m.rows == 0 or m.cols == 0:
        return []
    _, piv = _rref(m.bits, m.cols)
    return piv


def extend_to_basis(sub: BitMatrix, n: int) -> BitMatrix:
    """Rows of ``sub`` (independent) followed by standard vectors completing a basis of F2^n."""
    if sub.cols != n:
        raise DimensionError("ambient dimension mismatch")
    cand = np.vstack([sub.to_dense(), np.eye(n, dtype=np.uint8)])
    keep = independent_columns(BitMatrix.from_dense(cand.T))
    if len(keep) != n or keep[: sub.rows] != list(range(sub.rows)):
        raise ValueError("rows of sub are not independent")
    return BitMatrix.from_dense(cand[keep].reshape(n, n))
