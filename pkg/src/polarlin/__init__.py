"""Polar encoding with GF(2) linear decoding over erasure and bit-flip channels."""

from .channels import (
    BEC,
    GaussianFlip,
    NoiseKind,
    NoiseRealization,
    ReceivedWord,
    Symbol,
    sample_noise,
    transmit,
)
from .codec import Payload, bits_to_text, text_to_bits
from .decoder import DecodeResult, DecodeTag, SideInformation, decode, decode_flip, verify
from .encoder import (
    PolarCode,
    assemble_input,
    bit_reversal,
    build_generator,
    butterfly_encode,
    encode,
    reverse_shuffle,
)
from .gf2 import F0, BitWord, GenMatrix, Gf2System, SolveOutcome, SolveTag, solve_gf2
from .polarization import CapacityProfile, FrozenPolicy, SigmoidFit, fit_sigmoid, polarize

__version__ = "0.1.0"

__all__ = [
    "BEC",
    "BitWord",
    "CapacityProfile",
    "DecodeResult",
    "DecodeTag",
    "F0",
    "FrozenPolicy",
    "GaussianFlip",
    "GenMatrix",
    "Gf2System",
    "NoiseKind",
    "NoiseRealization",
    "Payload",
    "PolarCode",
    "ReceivedWord",
    "SideInformation",
    "SigmoidFit",
    "SolveOutcome",
    "SolveTag",
    "Symbol",
    "assemble_input",
    "bit_reversal",
    "bits_to_text",
    "build_generator",
    "butterfly_encode",
    "decode",
    "decode_flip",
    "encode",
    "fit_sigmoid",
    "polarize",
    "reverse_shuffle",
    "sample_noise",
    "solve_gf2",
    "text_to_bits",
    "transmit",
    "verify",
]
