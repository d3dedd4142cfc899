"""Fixed 8-bit text framing: one byte per character, most significant bit first."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import BitWord


def text_to_bits(text: str) -> BitWord:
    codes = [ord(ch) for ch in text]
    bad = [c for c in codes if c > 255]
    if bad:
        raise ValueError(f"character code {bad[0]} does not fit in 8 bits")
    return BitWord(np.unpackbits(np.array(codes, dtype=np.uint8)))


def bits_to_text(bits: BitWord) -> str:
    if len(bits) % 8:
        raise ValueError(f"bit length {len(bits)} is not a multiple of 8")
    return "".join(map(chr, np.packbits(bits.to_array()).tolist())) if len(bits) else ""


@dataclass(frozen=True)
class Payload:
    text: str

    @property
    def bits(self) -> BitWord:
        return text_to_bits(self.text)

    def __len__(self) -> int:
        return 8 * len(self.text)
