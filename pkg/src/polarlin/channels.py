"""Erasure and Gaussian bit-flip channels.

The flip probability follows the convention P_e = erfc(1 / (sigma*sqrt(2))),
without the factor 1/2 that the two-sided overlap integral would give.  That
convention is what maps sigma = 1.48 to P_e = 0.5 and what sets the flipped
bit counts used by the Monte Carlo tables; pass ``half_erfc=True`` to get the
halved variant instead.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import brentq

from .gf2 import BitWord


def erfc(x: float) -> float:
    return math.erfc(x)


def flip_probability(sigma: float, half_erfc: bool = False) -> float:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    p = math.erfc(1.0 / (sigma * math.sqrt(2.0)))
    return 0.5 * p if half_erfc else p


def sigma_for_epsilon(epsilon: float, half_erfc: bool = False) -> float:
    """Noise level whose flip probability equals ``epsilon``."""
    top = 0.5 if half_erfc else 1.0
    if not 0.0 < epsilon < top:
        raise ValueError(f"epsilon must lie in (0, {top}), got {epsilon}")

    def g(s):
        return flip_probability(s, half_erfc) - epsilon

    lo, hi = 1e-3, 1.0
    while g(lo) > 0:
        lo /= 2
    while g(hi) < 0:
        hi *= 2
    sigma = brentq(g, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    if abs(g(sigma)) >= 1e-10:
        raise ArithmeticError(f"root search for epsilon={epsilon} stalled at sigma={sigma}")
    return sigma


def erased_count(N: int, epsilon: float) -> int:
    """round(N * epsilon), halves to even."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    return round(N * epsilon)


def flipped_count(N: int, sigma: float, half_erfc: bool = False) -> int:
    return round(N * flip_probability(sigma, half_erfc))


def bsc_mutual_information(p: float) -> float:
    """1 - H2(p) for equiprobable inputs."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    h = 0.0
    for q in (p, 1.0 - p):
        if q > 0:
            h -= q * math.log2(q)
    return 1.0 - h


def bec_mutual_information(epsilon: float) -> float:
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    return 1.0 - epsilon


# --------------------------------------------------------------------------- models


@dataclass(frozen=True)
class BEC:
    epsilon: float

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")

    def nominal_count(self, N: int) -> int:
        return erased_count(N, self.epsilon)


@dataclass(frozen=True)
class GaussianFlip:
    sigma: float
    half_erfc: bool = False

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def nominal_count(self, N: int) -> int:
        return flipped_count(N, self.sigma, self.half_erfc)


ChannelModel = Union[BEC, GaussianFlip]


class NoiseKind(enum.Enum):
    ERASE = "erase"
    FLIP = "flip"


@dataclass(frozen=True)
class NoiseRealization:
    positions: tuple[int, ...]  # sorted, distinct, 1-based
    kind: NoiseKind

    def __len__(self) -> int:
        return len(self.positions)


def sample_noise(N: int, model: ChannelModel, rng: np.random.Generator,
                 exact_count: bool = False) -> NoiseRealization:
    """Draw the nominal number of positions uniformly with replacement, then dedupe.

    The realized set can therefore be smaller than the nominal count.  With
    ``exact_count=True`` positions are drawn without replacement instead.
    """
    count = model.nominal_count(N)
    kind = NoiseKind.ERASE if isinstance(model, BEC) else NoiseKind.FLIP
    if count == 0:
        return NoiseRealization((), kind)
    if exact_count:
        pos = np.sort(rng.choice(N, size=min(count, N), replace=False)) + 1
    else:
        pos = np.unique(rng.integers(1, N + 1, size=count))
    return NoiseRealization(tuple(int(p) for p in pos), kind)


class Symbol(enum.IntEnum):
    ZERO = 0
    ONE = 1
    ERASED = 2


@dataclass(frozen=True, eq=False)
class ReceivedWord:
    """Channel output.  ``flagged`` lists flipped positions known to the receiver."""

    symbols: np.ndarray  # int8 values of Symbol
    flagged: tuple[int, ...] = ()

    def __len__(self) -> int:
        return self.symbols.size

    @classmethod
    def from_bits(cls, x: BitWord) -> ReceivedWord:
        s = x.to_array().astype(np.int8)
        s.flags.writeable = False
        return cls(s)

    @classmethod
    def from_string(cls, text: str, flagged=()) -> ReceivedWord:
        """'0'/'1' for bits, '?' or 'e' for an erasure."""
        table = {"0": Symbol.ZERO, "1": Symbol.ONE, "?": Symbol.ERASED, "e": Symbol.ERASED}
        try:
            s = np.array([table[c] for c in text], dtype=np.int8)
        except KeyError as exc:
            raise ValueError(f"unexpected symbol {exc.args[0]!r} in received word") from None
        flagged = tuple(sorted(set(int(p) for p in flagged)))
        if flagged and (flagged[0] < 1 or flagged[-1] > s.size):
            raise ValueError("flagged positions out of range")
        return cls(s, flagged)

    @property
    def erased_mask(self) -> np.ndarray:
        return self.symbols == Symbol.ERASED

    def erased_positions(self) -> tuple[int, ...]:
        return tuple(int(p) + 1 for p in np.flatnonzero(self.erased_mask))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReceivedWord):
            return NotImplemented
        return self.flagged == other.flagged and np.array_equal(self.symbols, other.symbols)

    def __str__(self) -> str:
        return "".join("01?"[s] for s in self.symbols)


def transmit(x: BitWord, noise: NoiseRealization) -> ReceivedWord:
    """Apply erasures or flips; flipped positions are recorded as flagged."""
    s = x.to_array().astype(np.int8)
    if noise.positions:
        idx = np.asarray(noise.positions, dtype=np.intp) - 1
        if idx.min() < 0 or idx.max() >= s.size:
            raise ValueError(f"noise position outside 1..{s.size}")
        if noise.kind is NoiseKind.ERASE:
            s[idx] = Symbol.ERASED
        else:
            s[idx] ^= 1
    s.flags.writeable = False
    flagged = noise.positions if noise.kind is NoiseKind.FLIP else ()
    return ReceivedWord(s, tuple(flagged))
