"""Polar generator matrices and encoders.

Two constructions are offered.  The default one takes the rows of the
Kronecker power ``F0^{(x)n}`` odd-indexed first, then even-indexed (a single
reverse shuffle of the rows); it reproduces the familiar printed ``G[4]`` and
``G[8]`` tables.  ``permuted=True`` gives ``B[N] . F0^{(x)n}`` with the full
bit-reversal permutation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .gf2 import F0, BitWord, GenMatrix, kron_power, vec_matmul

MAX_MATERIALIZED_N = 2**14
MAX_N = 2**20


def _is_power_of_two(n: int) -> bool:
    return n >= 2 and n & (n - 1) == 0


@dataclass(frozen=True)
class Permutation:
    """Reordering ``s -> (s[map[0]], s[map[1]], ...)`` with 1-based ``map``."""

    map: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.map) != list(range(1, len(self.map) + 1)):
            raise ValueError("permutation map must be a bijection on 1..N")

    @property
    def size(self) -> int:
        return len(self.map)

    def apply(self, seq):
        if len(seq) != self.size:
            raise ValueError(f"sequence of length {len(seq)} for permutation of size {self.size}")
        return [seq[i - 1] for i in self.map]

    def compose(self, inner: Permutation) -> Permutation:
        """Permutation equivalent to applying ``self`` and then ``inner``."""
        return Permutation(tuple(self.map[i - 1] for i in inner.map))

    def inverse(self) -> Permutation:
        inv = [0] * self.size
        for k, i in enumerate(self.map, start=1):
            inv[i - 1] = k
        return Permutation(tuple(inv))

    def index_array(self) -> np.ndarray:
        return np.asarray(self.map, dtype=np.intp) - 1


def reverse_shuffle(N: int) -> Permutation:
    """Odd-indexed entries first, then even-indexed ones."""
    if N < 2 or N % 2:
        raise ValueError(f"reverse shuffle needs an even length >= 2, got {N}")
    return Permutation(tuple(range(1, N + 1, 2)) + tuple(range(2, N + 1, 2)))


def bit_reversal(N: int) -> Permutation:
    """B[N] = R[N] (I_2 (x) B[N/2]) with B[2] the identity."""
    if not _is_power_of_two(N):
        raise ValueError(f"bit reversal needs a power of two >= 2, got {N}")
    if N == 2:
        return Permutation((1, 2))
    half = bit_reversal(N // 2).map
    blocks = Permutation(half + tuple(i + N // 2 for i in half))
    return reverse_shuffle(N).compose(blocks)


@dataclass(frozen=True)
class PolarCode:
    N: int
    frozen_set: tuple[int, ...]
    frozen_value: int = 0
    permuted: bool = False
    message_positions: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if not _is_power_of_two(self.N) or self.N > MAX_N:
            raise ValueError(f"block length must be a power of two in [2, {MAX_N}], got {self.N}")
        frozen = tuple(sorted(set(self.frozen_set)))
        if len(frozen) != len(self.frozen_set):
            raise ValueError("frozen positions must be distinct")
        if frozen and (frozen[0] < 1 or frozen[-1] > self.N):
            raise ValueError(f"frozen positions must lie in 1..{self.N}")
        if self.frozen_value not in (0, 1):
            raise ValueError("frozen value must be 0 or 1")
        object.__setattr__(self, "frozen_set", frozen)
        taken = set(frozen)
        object.__setattr__(
            self, "message_positions", tuple(p for p in range(1, self.N + 1) if p not in taken)
        )

    @classmethod
    def first_half(cls, N: int, frozen_value: int = 0, permuted: bool = False) -> PolarCode:
        return cls(N, tuple(range(1, N // 2 + 1)), frozen_value, permuted)

    @property
    def n(self) -> int:
        return self.N.bit_length() - 1

    @property
    def K(self) -> int:
        return self.N - len(self.frozen_set)


def _row_order(N: int, permuted: bool) -> np.ndarray:
    perm = bit_reversal(N) if permuted else reverse_shuffle(N)
    return perm.index_array()


@lru_cache(maxsize=32)
def _generator(N: int, permuted: bool) -> GenMatrix:
    if N > MAX_MATERIALIZED_N:
        raise ValueError(f"generator matrices are materialized only up to N={MAX_MATERIALIZED_N}")
    return kron_power(F0, N.bit_length() - 1).take_rows(_row_order(N, permuted))


def build_generator(code: PolarCode) -> GenMatrix:
    return _generator(code.N, code.permuted)


def encode(u: BitWord, code: PolarCode) -> BitWord:
    """x = u . G mod 2."""
    if len(u) != code.N:
        raise ValueError(f"input has {len(u)} bits, code expects {code.N}")
    if code.N > MAX_MATERIALIZED_N:
        return butterfly_encode(u, code)
    return vec_matmul(u, build_generator(code))


def polar_transform(v: np.ndarray) -> np.ndarray:
    """v . F0^{(x)n} over the last axis by XOR butterflies (works on batches)."""
    x = np.array(v, dtype=np.uint8, copy=True)
    N = x.shape[-1]
    lead = x.shape[:-1]
    span = 1
    while span < N:
        # x[i] ^= x[i + span] for every i whose bit `span` is clear
        blk = x.reshape(*lead, N // (2 * span), 2, span)
        blk[..., 0, :] ^= blk[..., 1, :]
        span *= 2
    return x


def butterfly_encode_array(u: np.ndarray, code: PolarCode) -> np.ndarray:
    u = np.asarray(u, dtype=np.uint8)
    if u.shape[-1] != code.N:
        raise ValueError(f"input has {u.shape[-1]} bits, code expects {code.N}")
    v = np.zeros_like(u)
    v[..., _row_order(code.N, code.permuted)] = u
    return polar_transform(v)


def butterfly_encode(u: BitWord, code: PolarCode) -> BitWord:
    """Same map as :func:`encode` in O(N log N) without the matrix."""
    if len(u) != code.N:
        raise ValueError(f"input has {len(u)} bits, code expects {code.N}")
    return BitWord(butterfly_encode_array(u.to_array(), code))


def assemble_input(message: BitWord, code: PolarCode) -> BitWord:
    if len(message) != code.K:
        raise ValueError(f"message has {len(message)} bits, code carries {code.K}")
    u = np.full(code.N, code.frozen_value, dtype=np.uint8)
    u[np.asarray(code.message_positions, dtype=np.intp) - 1] = message.to_array()
    return BitWord(u)
