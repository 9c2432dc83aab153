"""Linear algebra over GF(2) on bit-packed rows.

Column ``j`` of a row lives in word ``j // 64`` at bit ``j % 64``.  Every
routine here is a pure function of its inputs; a :class:`BitMatrix` is never
mutated after construction.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

WORD = 64
_ONE = np.uint64(1)


def n_words(n_cols: int) -> int:
    return (n_cols + WORD - 1) // WORD


def pack_bits(dense: np.ndarray) -> np.ndarray:
    """Pack a 2-d 0/1 array into uint64 words, little-endian within a row."""
    dense = np.asarray(dense, dtype=np.uint8) & 1
    if dense.ndim != 2:
        raise ValueError("pack_bits expects a 2-d array")
    rows, cols = dense.shape
    if rows == 0 or cols == 0:
        return np.zeros((rows, n_words(cols)), dtype=np.uint64)
    width = n_words(cols) * WORD
    padded = np.zeros((rows, width), dtype=np.uint8)
    padded[:, :cols] = dense
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False).reshape(rows, -1)


def unpack_bits(words: np.ndarray, n_cols: int) -> np.ndarray:
    rows = words.shape[0]
    if rows == 0 or n_cols == 0:
        return np.zeros((rows, n_cols), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words.astype("<u8", copy=False)).view(np.uint8).reshape(rows, -1)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :n_cols]


class BitMatrix:
    """Immutable dense GF(2) matrix with bit-packed rows."""

    __slots__ = ("n_rows", "n_cols", "words")

    def __init__(self, n_rows: int, n_cols: int, words: Optional[np.ndarray] = None):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        nw = n_words(self.n_cols)
        if words is None:
            words = np.zeros((self.n_rows, nw), dtype=np.uint64)
        else:
            words = np.array(words, dtype=np.uint64, copy=True).reshape(self.n_rows, nw)
            tail = self.n_cols % WORD
            if nw and tail:
                words[:, -1] &= np.uint64((1 << tail) - 1)
        words.setflags(write=False)
        self.words = words

    # -- construction -----------------------------------------------------
    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> "BitMatrix":
        return cls(n_rows, n_cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_dense(cls, dense) -> "BitMatrix":
        dense = np.asarray(dense, dtype=np.uint8)
        if dense.ndim == 1:
            dense = dense.reshape(1, -1)
        return cls(dense.shape[0], dense.shape[1], pack_bits(dense))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], n_cols: Optional[int] = None) -> "BitMatrix":
        if n_cols is None:
            n_cols = len(rows[0]) if rows else 0
        dense = np.zeros((len(rows), n_cols), dtype=np.uint8)
        for i, row in enumerate(rows):
            dense[i, : len(row)] = np.asarray(row, dtype=np.uint8) & 1
        return cls.from_dense(dense)

    @classmethod
    def from_index_sets(cls, rows: Iterable[Iterable[int]], n_cols: int) -> "BitMatrix":
        rows = list(rows)
        dense = np.zeros((len(rows), n_cols), dtype=np.uint8)
        for i, cols in enumerate(rows):
            for j in cols:
                dense[i, j] ^= 1
        return cls.from_dense(dense)

    # -- views ------------------------------------------------------------
    def to_dense(self) -> np.ndarray:
        return unpack_bits(self.words, self.n_cols)

    def row(self, i: int) -> np.ndarray:
        return unpack_bits(self.words[i : i + 1], self.n_cols)[0]

    def row_support(self, i: int) -> list[int]:
        return [int(j) for j in np.flatnonzero(self.row(i))]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    T = property(transpose)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.n_cols != other.n_rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return BitMatrix.from_dense(mat_mul(self.to_dense(), other.to_dense()))

    def apply(self, vec) -> np.ndarray:
        """Return ``self @ vec`` for a 0/1 column vector."""
        vec = np.asarray(vec, dtype=np.uint8) & 1
        if vec.shape != (self.n_cols,):
            raise ValueError("vector length must equal n_cols")
        return mat_mul(self.to_dense(), vec.reshape(-1, 1)).reshape(-1)

    def stack(self, other: "BitMatrix") -> "BitMatrix":
        if self.n_cols != other.n_cols:
            raise ValueError("column counts differ")
        return BitMatrix(self.n_rows + other.n_rows, self.n_cols, np.vstack([self.words, other.words]))

    def is_zero(self) -> bool:
        return not self.words.any()

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.words, other.words)

    def __hash__(self) -> int:
        return hash((self.n_rows, self.n_cols, self.words.tobytes()))

    def __repr__(self) -> str:
        return f"BitMatrix({self.n_rows}x{self.n_cols}, rank={rank(self)})"


def mat_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of dense 0/1 arrays over GF(2)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    # float32 sums are exact below 2**24
    if a.shape[1] < (1 << 24):
        prod = a.astype(np.float32) @ b.astype(np.float32)
        return (prod.astype(np.int64) & 1).astype(np.uint8)
    return ((a.astype(np.int64) @ b.astype(np.int64)) & 1).astype(np.uint8)


def eliminate(words: np.ndarray, n_cols: int, full: bool = True) -> list[int]:
    """Row-reduce ``words`` in place and return the pivot columns.

    Pivots are taken leftmost column first, topmost candidate row first.
    With ``full`` the result is in reduced row-echelon form, otherwise only
    entries below each pivot are cleared.
    """
    n_rows = words.shape[0]
    pivots: list[int] = []
    r = 0
    c = 0
    while c < n_cols and r < n_rows:
        wi = c >> 6
        bit = _ONE << np.uint64(c & 63)
        nz = np.flatnonzero(words[r:, wi] & bit)
        if nz.size == 0:
            c += 1
            continue
        p = r + int(nz[0])
        if p != r:
            words[[r, p]] = words[[p, r]]
        if full:
            hit = np.flatnonzero(words[:, wi] & bit)
            hit = hit[hit != r]
        else:
            hit = r + 1 + np.flatnonzero(words[r + 1 :, wi] & bit)
        if hit.size:
            words[hit, wi:] ^= words[r, wi:]
        pivots.append(c)
        r += 1
        c += 1
    return pivots


def rref(m: BitMatrix) -> tuple[int, BitMatrix, list[int]]:
    """Reduced row-echelon form: ``(rank, reduced, pivot_cols)``.

    ``reduced`` keeps the shape of ``m``; its first ``rank`` rows are the
    nonzero ones.
    """
    work = np.array(m.words, copy=True)
    pivots = eliminate(work, m.n_cols, full=True)
    return len(pivots), BitMatrix(m.n_rows, m.n_cols, work), pivots


def rank(m: BitMatrix) -> int:
    if m.n_rows == 0 or m.n_cols == 0:
        return 0
    work = np.array(m.words, copy=True)
    return len(eliminate(work, m.n_cols, full=False))


def kernel_basis(m: BitMatrix) -> BitMatrix:
    """Rows spanning ``{v : m v = 0}``, one per free column, in column order."""
    r, red, pivots = rref(m)
    dense = red.to_dense()[:r]
    pivot_set = set(pivots)
    free = [j for j in range(m.n_cols) if j not in pivot_set]
    out = np.zeros((len(free), m.n_cols), dtype=np.uint8)
    for k, f in enumerate(free):
        out[k, f] = 1
        if r:
            col = dense[:, f]
            for i in np.flatnonzero(col):
                out[k, pivots[i]] = 1
    return BitMatrix.from_dense(out) if len(free) else BitMatrix.zeros(0, m.n_cols)


def left_kernel_basis(m: BitMatrix) -> BitMatrix:
    """Rows ``c`` with ``c @ m = 0`` (row relations of ``m``)."""
    return kernel_basis(m.transpose())


def solve(m: BitMatrix, rhs) -> Optional[np.ndarray]:
    """Some ``x`` with ``m @ x = rhs``, or ``None`` when rhs is not in the column space."""
    rhs = np.asarray(rhs, dtype=np.uint8).reshape(-1) & 1
    if rhs.shape[0] != m.n_rows:
        raise ValueError("rhs length must equal n_rows")
    aug = np.zeros((m.n_rows, m.n_cols + 1), dtype=np.uint8)
    aug[:, : m.n_cols] = m.to_dense()
    aug[:, m.n_cols] = rhs
    work = pack_bits(aug)
    pivots = eliminate(work, m.n_cols + 1, full=True)
    if pivots and pivots[-1] == m.n_cols:
        return None
    red = unpack_bits(work, m.n_cols + 1)
    x = np.zeros(m.n_cols, dtype=np.uint8)
    for i, p in enumerate(pivots):
        x[p] = red[i, m.n_cols]
    return x


def span_contains(basis: BitMatrix, vec) -> bool:
    if basis.n_rows == 0:
        return not np.any(np.asarray(vec, dtype=np.uint8) & 1)
    return solve(basis.transpose(), vec) is not None


def same_row_space(a: BitMatrix, b: BitMatrix) -> bool:
    """Whether two matrices with equal column counts span the same row space."""
    if a.n_cols != b.n_cols:
        return False
    ra, red_a, _ = rref(a)
    rb, red_b, _ = rref(b)
    return ra == rb and np.array_equal(red_a.words[:ra], red_b.words[:rb])


class Echelon:
    """Incrementally grown row-echelon basis used to test membership and extend spans.

    Rows are stored reduced against one another keyed by pivot column, so
    ``reduce`` needs at most one XOR per stored pivot.
    """

    def __init__(self, n_cols: int):
        self.n_cols = n_cols
        self.nw = n_words(n_cols)
        self._rows = np.zeros((0, self.nw), dtype=np.uint64)
        self._pivots: list[int] = []

    def __len__(self) -> int:
        return len(self._pivots)

    def reduce(self, vec_words: np.ndarray) -> np.ndarray:
        v = np.array(vec_words, dtype=np.uint64, copy=True)
        for i, p in enumerate(self._pivots):
            if (int(v[p >> 6]) >> (p & 63)) & 1:
                v ^= self._rows[i]
        return v

    def add(self, vec_words: np.ndarray) -> bool:
        """Insert a vector; return False when it was already in the span."""
        v = self.reduce(vec_words)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            return False
        w = int(nz[0])
        word = int(v[w])
        p = w * WORD + ((word & -word).bit_length() - 1)
        # keep stored rows reduced at the new pivot
        if self._pivots:
            hit = np.flatnonzero(self._rows[:, p >> 6] & (_ONE << np.uint64(p & 63)))
            if hit.size:
                self._rows[hit] ^= v
        self._rows = np.vstack([self._rows, v.reshape(1, -1)])
        self._pivots.append(p)
        return True

    def add_many(self, words: np.ndarray) -> list[bool]:
        return [self.add(words[i]) for i in range(words.shape[0])]
