"""Bit-packed GF(2) vectors, matrices and linear-system solving.

Bits are stored 64 to a ``uint64`` word, little-endian within the word:
bit ``i`` lives in word ``i // 64`` at offset ``i % 64``.  Indexing on
:class:`BitWord` and :class:`GenMatrix` is 0-based like any Python
sequence; positions reported by the coding layers are 1-based.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from numba import njit

WORD_BITS = 64

_ONE = np.uint64(1)
_SHIFTS = tuple(np.uint64(s) for s in (32, 16, 8, 4, 2, 1))


def n_words(n_bits: int) -> int:
    return max(1, -(-n_bits // WORD_BITS))


def pack_rows(bits) -> np.ndarray:
    """Pack a 2-D 0/1 array into an ``(m, n_words)`` uint64 array."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 2:
        raise ValueError(f"expected a 2-D bit array, got shape {bits.shape}")
    m, n = bits.shape
    nw = n_words(n)
    padded = np.zeros((m, nw * WORD_BITS), dtype=np.uint8)
    padded[:, :n] = bits & 1
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def unpack_rows(words: np.ndarray, n_bits: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype=np.uint64)
    as_bytes = words.astype("<u8").view(np.uint8).reshape(words.shape[0], -1)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :n_bits]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class BitWord:
    """Immutable fixed-length binary vector."""

    __slots__ = ("_words", "_n")

    def __init__(self, bits: Iterable[int] | np.ndarray | str = ()):
        if isinstance(bits, str):
            if set(bits) - {"0", "1"}:
                raise ValueError(f"bit string may contain only 0/1: {bits!r}")
            arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
        else:
            arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits)
            if arr.size and not np.isin(arr, (0, 1)).all():
                raise ValueError("every element of a BitWord must be 0 or 1")
            arr = arr.astype(np.uint8).ravel()
        self._n = int(arr.size)
        self._words = _frozen(pack_rows(arr[None, :])[0])

    @classmethod
    def from_words(cls, words: np.ndarray, n: int) -> BitWord:
        obj = cls.__new__(cls)
        words = np.array(words, dtype=np.uint64)
        if words.shape != (n_words(n),):
            raise ValueError(f"{words.shape[0]} words cannot hold exactly {n} bits")
        tail = n % WORD_BITS
        if tail:
            words[-1] &= (_ONE << np.uint64(tail)) - _ONE
        elif n == 0:
            words[:] = 0
        obj._n = n
        obj._words = _frozen(words)
        return obj

    @classmethod
    def zeros(cls, n: int) -> BitWord:
        return cls.from_words(np.zeros(n_words(n), dtype=np.uint64), n)

    @property
    def words(self) -> np.ndarray:
        return self._words

    def to_array(self) -> np.ndarray:
        return unpack_rows(self._words[None, :], self._n)[0]

    def weight(self) -> int:
        return int(self.to_array().sum())

    def __len__(self) -> int:
        return self._n

    def __getitem__(self, i):
        if isinstance(i, slice):
            return BitWord(self.to_array()[i])
        if i < 0:
            i += self._n
        if not 0 <= i < self._n:
            raise IndexError(f"bit index {i} out of range for length {self._n}")
        return int((self._words[i // WORD_BITS] >> np.uint64(i % WORD_BITS)) & _ONE)

    def __iter__(self):
        return iter(self.to_array().tolist())

    def __xor__(self, other: BitWord) -> BitWord:
        if len(other) != self._n:
            raise ValueError(f"length mismatch: {self._n} vs {len(other)}")
        return BitWord.from_words(self._words ^ other._words, self._n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitWord):
            return NotImplemented
        return self._n == other._n and bool(np.array_equal(self._words, other._words))

    def __hash__(self) -> int:
        return hash((self._n, self._words.tobytes()))

    def __str__(self) -> str:
        return "".join("01"[b] for b in self.to_array())

    def __repr__(self) -> str:
        s = str(self)
        if len(s) > 72:
            s = s[:64] + f"...({self._n} bits)"
        return f"BitWord('{s}')"


class GenMatrix:
    """Immutable dense binary matrix with bit-packed rows."""

    __slots__ = ("_rows", "n_rows", "n_cols")

    def __init__(self, rows: np.ndarray, n_cols: int):
        rows = np.array(rows, dtype=np.uint64, ndmin=2)
        if rows.shape[1] != n_words(n_cols):
            raise ValueError("packed row width does not match n_cols")
        self._rows = _frozen(rows)
        self.n_rows = rows.shape[0]
        self.n_cols = n_cols

    @classmethod
    def from_dense(cls, dense) -> GenMatrix:
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise ValueError(f"expected a 2-D matrix, got shape {dense.shape}")
        if dense.size and not np.isin(dense, (0, 1)).all():
            raise ValueError("matrix entries must be 0 or 1")
        return cls(pack_rows(dense), dense.shape[1])

    @classmethod
    def from_bitwords(cls, rows: Sequence[BitWord]) -> GenMatrix:
        widths = {len(r) for r in rows}
        if len(widths) != 1:
            raise ValueError("all rows must share the same length")
        return cls(np.stack([r.words for r in rows]), widths.pop())

    @classmethod
    def identity(cls, n: int) -> GenMatrix:
        return cls.from_dense(np.eye(n, dtype=np.uint8))

    @property
    def rows(self) -> np.ndarray:
        return self._rows

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    def row(self, i: int) -> BitWord:
        return BitWord.from_words(self._rows[i], self.n_cols)

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self._rows, self.n_cols)

    def transpose(self) -> GenMatrix:
        return GenMatrix.from_dense(self.to_dense().T)

    def take_rows(self, index) -> GenMatrix:
        return GenMatrix(self._rows[np.asarray(index, dtype=np.intp)], self.n_cols)

    def count_ones(self) -> int:
        return int(self.to_dense().sum())

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.n_rows and 0 <= j < self.n_cols):
            raise IndexError(f"entry ({i}, {j}) outside {self.shape}")
        return int((self._rows[i, j // WORD_BITS] >> np.uint64(j % WORD_BITS)) & _ONE)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GenMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._rows, other._rows))

    def __hash__(self) -> int:
        return hash((self.shape, self._rows.tobytes()))

    def __repr__(self) -> str:
        return f"GenMatrix({self.n_rows}x{self.n_cols})"


F0 = GenMatrix.from_dense([[1, 0], [1, 1]])


def gf2_matmul(a: GenMatrix, b: GenMatrix) -> GenMatrix:
    if a.n_cols != b.n_rows:
        raise ValueError(f"cannot multiply {a.shape} by {b.shape}")
    sel = a.to_dense().astype(bool)
    out = np.zeros((a.n_rows, b.rows.shape[1]), dtype=np.uint64)
    for i in range(a.n_rows):
        if sel[i].any():
            out[i] = np.bitwise_xor.reduce(b.rows[sel[i]], axis=0)
    return GenMatrix(out, b.n_cols)


def vec_matmul(u: BitWord, g: GenMatrix) -> BitWord:
    """Row vector times matrix over GF(2)."""
    if len(u) != g.n_rows:
        raise ValueError(f"vector of length {len(u)} cannot multiply {g.shape} matrix")
    sel = u.to_array().astype(bool)
    if not sel.any():
        return BitWord.zeros(g.n_cols)
    return BitWord.from_words(np.bitwise_xor.reduce(g.rows[sel], axis=0), g.n_cols)


def kron_power(f: GenMatrix, n: int) -> GenMatrix:
    """n-fold Kronecker power of a 2x2 binary kernel."""
    if f.shape != (2, 2):
        raise ValueError("kron_power needs a 2x2 kernel")
    if n < 1:
        raise ValueError("kron_power needs at least one factor (n >= 1)")
    fd = f.to_dense()
    dense = fd
    k = 1
    # small sizes stay dense; once a row spans whole words, concatenate packed blocks
    while k < n and dense.shape[1] < WORD_BITS:
        dense = np.kron(fd, dense)
        k += 1
    if k == n:
        return GenMatrix.from_dense(dense)
    rows = pack_rows(dense)
    width = dense.shape[1]
    for _ in range(n - k):
        blocks = [
            np.concatenate([rows * np.uint64(fd[a, 0]), rows * np.uint64(fd[a, 1])], axis=1)
            for a in (0, 1)
        ]
        rows = np.concatenate(blocks, axis=0)
        width *= 2
    return GenMatrix(rows, width)


# --------------------------------------------------------------------------- solving


@njit("uint64(uint64)", cache=True)
def _parity(v):
    for s in _SHIFTS:
        v ^= v >> s
    return v & _ONE


@njit("Tuple((int64, int64[:]))(uint64[:, ::1], int64)", cache=True)
def _forward_eliminate(rows, n_cols):
    """Row-echelon form in place over the first ``n_cols`` columns."""
    m, w = rows.shape
    pivots = np.empty(min(m, n_cols), dtype=np.int64)
    r = 0
    for c in range(n_cols):
        if r == m:
            break
        wi = c >> 6
        bit = _ONE << np.uint64(c & 63)
        p = -1
        for i in range(r, m):
            if rows[i, wi] & bit:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for k in range(wi, w):
                t = rows[r, k]
                rows[r, k] = rows[p, k]
                rows[p, k] = t
        # rows r+1..p-1 were scanned and are already zero in this column
        for i in range(p + 1, m):
            if rows[i, wi] & bit:
                for k in range(wi, w):
                    rows[i, k] ^= rows[r, k]
        pivots[r] = c
        r += 1
    return r, pivots[:r]


@njit("uint64[::1](uint64[:, ::1], int64)", cache=True)
def _back_substitute(rows, n_unknowns):
    """Solution of a full-rank echelon system whose rhs sits in column ``n_unknowns``."""
    w = rows.shape[1]
    x = np.zeros(w, dtype=np.uint64)
    rw = n_unknowns >> 6
    rbit = np.uint64(n_unknowns & 63)
    for r in range(n_unknowns - 1, -1, -1):
        acc = (rows[r, rw] >> rbit) & _ONE
        for k in range(r >> 6, w):
            acc ^= _parity(rows[r, k] & x[k])
        if acc:
            x[r >> 6] |= _ONE << np.uint64(r & 63)
    return x


def _echelon_rank(packed: np.ndarray, n_cols: int) -> int:
    if packed.shape[0] == 0 or n_cols == 0:
        return 0
    work = np.ascontiguousarray(packed, dtype=np.uint64).copy()
    rank, _ = _forward_eliminate(work, n_cols)
    return int(rank)


def rank_gf2(m: GenMatrix) -> int:
    return _echelon_rank(m.rows, m.n_cols)


@dataclass(frozen=True)
class Gf2System:
    """Equations ``coeffs[e] . u = rhs[e]`` over the listed unknowns.

    ``coeffs`` is packed with one extra bit of headroom so the solver can
    append the right-hand side as a final column without repacking.
    """

    unknown_ids: tuple
    coeffs: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        k = len(self.unknown_ids)
        if self.coeffs.ndim != 2 or self.coeffs.shape[1] != n_words(k + 1):
            raise ValueError("coefficient rows must be packed over the unknowns plus rhs")
        if self.coeffs.shape[0] != self.rhs.shape[0]:
            raise ValueError("one rhs bit per equation is required")
        if self.rhs.size and not np.isin(self.rhs, (0, 1)).all():
            raise ValueError("rhs must be 0 or 1")

    @classmethod
    def from_dense(cls, unknown_ids: Sequence, coeffs, rhs) -> Gf2System:
        k = len(unknown_ids)
        coeffs = np.asarray(coeffs, dtype=np.uint8).reshape(-1, k)
        rhs = np.asarray(rhs, dtype=np.uint8).ravel()
        if coeffs.size and not np.isin(coeffs, (0, 1)).all():
            raise ValueError("coefficients must be 0 or 1")
        aug = np.zeros((coeffs.shape[0], k + 1), dtype=np.uint8)
        aug[:, :k] = coeffs
        return cls(tuple(unknown_ids), pack_rows(aug) if len(aug) else
                   np.zeros((0, n_words(k + 1)), dtype=np.uint64), rhs)

    @classmethod
    def from_equations(cls, unknown_ids: Sequence, equations: Iterable[tuple[BitWord, int]]):
        eqs = list(equations)
        k = len(unknown_ids)
        for coef, _ in eqs:
            if len(coef) != k:
                raise ValueError(f"coefficient row has {len(coef)} bits, expected {k}")
        dense = np.array([c.to_array() for c, _ in eqs], dtype=np.uint8).reshape(-1, k)
        return cls.from_dense(unknown_ids, dense, [b for _, b in eqs])

    @property
    def n_equations(self) -> int:
        return self.coeffs.shape[0]

    def coefficient_matrix(self) -> np.ndarray:
        return unpack_rows(self.coeffs, len(self.unknown_ids))

    def augmented(self) -> np.ndarray:
        """Packed rows with the rhs written into column ``len(unknown_ids)``."""
        k = len(self.unknown_ids)
        aug = self.coeffs.copy()
        aug[:, k // WORD_BITS] |= self.rhs.astype(np.uint64) << np.uint64(k % WORD_BITS)
        return aug


class SolveTag(enum.Enum):
    UNIQUE = "unique"
    UNDERDETERMINED = "underdetermined"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class SolveOutcome:
    tag: SolveTag
    rank: int
    assignment: BitWord | None = None
    rank_deficit: int | None = None
    elapsed: float = 0.0


def solve_gf2(sys: Gf2System) -> SolveOutcome:
    """Gaussian elimination with first-nonzero pivoting.

    An assignment is returned only when the solution is unique; an
    underdetermined system reports its rank deficit and nothing else.
    ``elapsed`` covers the elimination and back-substitution alone.
    """
    k = len(sys.unknown_ids)
    work = np.ascontiguousarray(sys.augmented())
    t0 = time.perf_counter()
    rank = int(_forward_eliminate(work, k)[0]) if work.shape[0] else 0
    x = _back_substitute(work, k) if rank == k and k else None
    elapsed = time.perf_counter() - t0
    residual_rhs = (work[rank:, k // WORD_BITS] >> np.uint64(k % WORD_BITS)) & _ONE
    if residual_rhs.any():
        return SolveOutcome(SolveTag.INCONSISTENT, rank, elapsed=elapsed)
    if rank < k:
        return SolveOutcome(SolveTag.UNDERDETERMINED, rank, rank_deficit=k - rank, elapsed=elapsed)
    words = x[: n_words(k)] if k else np.zeros(1, dtype=np.uint64)
    return SolveOutcome(SolveTag.UNIQUE, rank, assignment=BitWord.from_words(words, k),
                        elapsed=elapsed)
