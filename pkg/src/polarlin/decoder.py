"""Linear decoding: solve the GF(2) system tying surviving codeword bits to the message.

Every received position that is neither erased nor dropped yields one
equation ``sum_{i in message} G[i, j] u_i = y_j + f * sum_{i in frozen} G[i, j]``.
The message is recovered iff that system has a unique solution.

Flipped positions are handled the way the reference flip protocol does it:
the receiver is assumed to know where flips happened and discards those
equations (genie-aided erasure conversion).  ``decode_flip(..., genie=False)``
keeps the corrupted equations for diagnostics; that is the only route to an
``INCONSISTENT`` outcome.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channels import ReceivedWord, Symbol
from .encoder import PolarCode, assemble_input, build_generator, encode
from .gf2 import BitWord, Gf2System, SolveTag, pack_rows, solve_gf2


class DecodeTag(enum.Enum):
    SUCCESS = "success"
    AMBIGUOUS = "ambiguous"
    INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class DecodeResult:
    tag: DecodeTag
    message: BitWord | None = None
    rank_deficit: int | None = None
    equations_used: int = 0
    solve_time: float = 0.0

    @property
    def ok(self) -> bool:
        return self.tag is DecodeTag.SUCCESS


@dataclass(frozen=True)
class SideInformation:
    dropped_positions: frozenset[int] = frozenset()


@dataclass(frozen=True)
class _CodeTables:
    columns: np.ndarray  # (N, words) packed: row j holds G[message, j] plus rhs headroom
    frozen_parity: np.ndarray  # (N,) parity of G[frozen, j]


@lru_cache(maxsize=16)
def _tables(code: PolarCode) -> _CodeTables:
    g = build_generator(code).to_dense()
    msg = np.asarray(code.message_positions, dtype=np.intp) - 1
    frz = np.asarray(code.frozen_set, dtype=np.intp) - 1
    aug = np.zeros((code.N, code.K + 1), dtype=np.uint8)
    aug[:, : code.K] = g[msg].T
    columns = pack_rows(aug)
    parity = (g[frz].sum(axis=0) & 1).astype(np.uint8) if frz.size else np.zeros(code.N, np.uint8)
    columns.flags.writeable = False
    parity.flags.writeable = False
    return _CodeTables(columns, parity)


def assemble_system(received: ReceivedWord, code: PolarCode,
                    side: SideInformation = SideInformation()) -> Gf2System:
    if len(received) != code.N:
        raise ValueError(f"received word has {len(received)} symbols, code expects {code.N}")
    t = _tables(code)
    keep = received.symbols != Symbol.ERASED
    if side.dropped_positions:
        dropped = np.fromiter(side.dropped_positions, dtype=np.intp) - 1
        if dropped.min() < 0 or dropped.max() >= code.N:
            raise ValueError(f"dropped position outside 1..{code.N}")
        keep = keep.copy()
        keep[dropped] = False
    rows = np.flatnonzero(keep)
    rhs = received.symbols[rows].astype(np.uint8)
    if code.frozen_value:
        rhs ^= t.frozen_parity[rows]
    return Gf2System(code.message_positions, t.columns[rows], rhs)


def decode(received: ReceivedWord, code: PolarCode,
           side: SideInformation = SideInformation()) -> DecodeResult:
    system = assemble_system(received, code, side)
    out = solve_gf2(system)
    elapsed = out.elapsed
    m = system.n_equations
    if out.tag is SolveTag.UNIQUE:
        return DecodeResult(DecodeTag.SUCCESS, out.assignment, None, m, elapsed)
    if out.tag is SolveTag.UNDERDETERMINED:
        return DecodeResult(DecodeTag.AMBIGUOUS, None, out.rank_deficit, m, elapsed)
    return DecodeResult(DecodeTag.INCONSISTENT, None, None, m, elapsed)


def decode_flip(received: ReceivedWord, code: PolarCode, genie: bool = True) -> DecodeResult:
    """Decode a flip-channel output, discarding equations at flagged positions."""
    side = SideInformation(frozenset(received.flagged) if genie else frozenset())
    return decode(received, code, side)


def verify(result: DecodeResult, original: BitWord) -> bool:
    if not result.ok:
        raise ValueError(f"cannot verify a {result.tag.value} decode")
    return result.message == original


def reencode_check(result: DecodeResult, received: ReceivedWord, code: PolarCode,
                   side: SideInformation = SideInformation()) -> bool:
    """True iff re-encoding the recovered input matches every equation that was used."""
    x = encode(assemble_input(result.message, code), code).to_array()
    keep = received.symbols != Symbol.ERASED
    for p in side.dropped_positions:
        keep[p - 1] = False
    return bool(np.array_equal(x[keep], received.symbols[keep]))

