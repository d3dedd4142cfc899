import itertools

import numpy as np
import pytest

from polarlin.channels import ReceivedWord
from polarlin.codec import text_to_bits
from polarlin.decoder import decode
from polarlin.encoder import (
    MAX_MATERIALIZED_N,
    Permutation,
    PolarCode,
    assemble_input,
    bit_reversal,
    build_generator,
    butterfly_encode,
    butterfly_encode_array,
    encode,
    reverse_shuffle,
)
from polarlin.gf2 import F0, BitWord, kron_power, rank_gf2

G4_PRINTED = [
    [1, 0, 0, 0],
    [1, 0, 1, 0],
    [1, 1, 0, 0],
    [1, 1, 1, 1],
]

G8_PRINTED = [
    [1, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 1, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 1, 0, 0, 0],
    [1, 0, 1, 0, 1, 0, 1, 0],
    [1, 1, 0, 0, 0, 0, 0, 0],
    [1, 1, 1, 1, 0, 0, 0, 0],
    [1, 1, 0, 0, 1, 1, 0, 0],
    [1, 1, 1, 1, 1, 1, 1, 1],
]

# codeword bit j as the set of input indices summed into it
X8_PRINTED = [
    {1, 2, 3, 4, 5, 6, 7, 8},
    {5, 6, 7, 8},
    {2, 4, 6, 8},
    {6, 8},
    {3, 4, 7, 8},
    {7, 8},
    {4, 8},
    {8},
]


def digit_reversal(N):
    n = N.bit_length() - 1
    return tuple(int(format(i, f"0{n}b")[::-1], 2) + 1 for i in range(N))


# --------------------------------------------------------------------------- permutations


def test_reverse_shuffle_examples():
    assert reverse_shuffle(4).apply([1, 2, 3, 4]) == [1, 3, 2, 4]
    assert reverse_shuffle(8).apply(list(range(1, 9))) == [1, 3, 5, 7, 2, 4, 6, 8]
    with pytest.raises(ValueError):
        reverse_shuffle(5)


def test_bit_reversal_examples():
    assert bit_reversal(2).map == (1, 2)
    assert bit_reversal(4).map == (1, 3, 2, 4)
    assert bit_reversal(8).map == (1, 5, 3, 7, 2, 6, 4, 8)
    with pytest.raises(ValueError):
        bit_reversal(12)


@pytest.mark.parametrize("N", [2, 4, 8, 16, 32, 64, 1024])
def test_bit_reversal_matches_digit_reversal(N):
    assert bit_reversal(N).map == digit_reversal(N)


@pytest.mark.parametrize("N", [2, 4, 8, 16, 256])
def test_bit_reversal_involution(N):
    b = bit_reversal(N)
    assert b.compose(b).map == tuple(range(1, N + 1))
    assert b.inverse() == b


def test_permutation_validation_and_inverse():
    with pytest.raises(ValueError):
        Permutation((1, 1, 3))
    p = Permutation((3, 1, 2))
    assert p.compose(p.inverse()).map == (1, 2, 3)
    with pytest.raises(ValueError):
        p.apply([1, 2])


# --------------------------------------------------------------------------- code


def test_polar_code_validation():
    with pytest.raises(ValueError):
        PolarCode(6, ())
    with pytest.raises(ValueError):
        PolarCode(4, (0,))
    with pytest.raises(ValueError):
        PolarCode(4, (5,))
    with pytest.raises(ValueError):
        PolarCode(4, (1, 1))
    with pytest.raises(ValueError):
        PolarCode(4, (1,), frozen_value=2)


def test_polar_code_partition():
    code = PolarCode(8, (6, 2, 3))
    assert code.frozen_set == (2, 3, 6)
    assert code.message_positions == (1, 4, 5, 7, 8)
    assert code.K + len(code.frozen_set) == code.N
    assert code.n == 3
    assert PolarCode.first_half(256).frozen_set == tuple(range(1, 129))


# --------------------------------------------------------------------------- generator


def test_generator_g2_is_f0():
    assert build_generator(PolarCode(2, ())) == F0


def test_generator_matches_printed_g4():
    assert build_generator(PolarCode.first_half(4)).to_dense().tolist() == G4_PRINTED


def test_generator_matches_printed_g8():
    assert build_generator(PolarCode.first_half(8)).to_dense().tolist() == G8_PRINTED


def test_unit_vectors_reproduce_x8_structure():
    code = PolarCode(8, ())
    support = [set() for _ in range(8)]
    for i in range(8):
        x = encode(BitWord(np.eye(8, dtype=np.uint8)[i]), code)
        for j in range(8):
            if x[j]:
                support[j].add(i + 1)
    assert support == X8_PRINTED


def test_unit_vector_e8_is_all_ones():
    e8 = BitWord([0] * 7 + [1])
    assert encode(e8, PolarCode(8, ())) == BitWord("1" * 8)


@pytest.mark.parametrize("N", [2, 4, 8, 16, 32])
def test_generator_full_rank(N):
    assert rank_gf2(build_generator(PolarCode(N, ()))) == N


@pytest.mark.parametrize("N", [4, 8, 32])
def test_permuted_generator_is_bit_reversed_kron(N):
    k = kron_power(F0, N.bit_length() - 1).to_dense()
    g = build_generator(PolarCode(N, (), permuted=True)).to_dense()
    assert np.array_equal(g, k[np.asarray(digit_reversal(N)) - 1])


@pytest.mark.parametrize("N", [4, 8, 16])
def test_permuted_generator_involution(N):
    code = PolarCode(N, (), permuted=True)
    rng = np.random.default_rng(N)
    words = ([BitWord(b) for b in itertools.product((0, 1), repeat=N)] if N == 4
             else [BitWord(rng.integers(0, 2, size=N)) for _ in range(200)])
    for u in words:
        assert encode(encode(u, code), code) == u


def test_default_generator_not_involution_at_8():
    # the interleaved construction squares to a nontrivial permutation for N >= 8
    g = build_generator(PolarCode(8, ())).to_dense()
    assert not np.array_equal((g @ g) % 2, np.eye(8, dtype=int))
    g4 = build_generator(PolarCode(4, ())).to_dense()
    assert np.array_equal((g4 @ g4) % 2, np.eye(4, dtype=int))


def test_generator_size_limit():
    with pytest.raises(ValueError):
        build_generator(PolarCode(2 * MAX_MATERIALIZED_N, ()))


# --------------------------------------------------------------------------- encode


def test_encode_examples():
    assert encode(BitWord.zeros(16), PolarCode.first_half(16)) == BitWord.zeros(16)
    for u1, u2 in itertools.product((0, 1), repeat=2):
        assert butterfly_encode(BitWord([u1, u2]), PolarCode(2, ())) == BitWord([u1 ^ u2, u2])
    assert butterfly_encode(BitWord.zeros(8), PolarCode(8, ())) == BitWord.zeros(8)
    with pytest.raises(ValueError):
        encode(BitWord("101"), PolarCode(4, ()))
    with pytest.raises(ValueError):
        butterfly_encode(BitWord("101"), PolarCode(4, ()))


@pytest.mark.parametrize("N", [8, 64, 1024])
@pytest.mark.parametrize("permuted", [False, True])
def test_butterfly_matches_matrix(N, permuted):
    code = PolarCode(N, (), permuted=permuted)
    rng = np.random.default_rng(N + permuted)
    u = rng.integers(0, 2, size=(1000, N)).astype(np.uint8)
    g = build_generator(code).to_dense().astype(np.int64)
    assert np.array_equal(butterfly_encode_array(u, code), (u.astype(np.int64) @ g) % 2)
    for row in u[:20]:
        assert butterfly_encode(BitWord(row), code) == encode(BitWord(row), code)


def test_encode_beyond_materialized_limit_uses_butterfly():
    N = 2 * MAX_MATERIALIZED_N
    code = PolarCode(N, ())
    e = np.zeros(N, dtype=np.uint8)
    e[-1] = 1
    assert encode(BitWord(e), code).weight() == N
    e[:] = 0
    e[0] = 1
    assert encode(BitWord(e), code).to_array().tolist() == [1] + [0] * (N - 1)


# --------------------------------------------------------------------------- assemble


def test_assemble_input_examples():
    code = PolarCode(4, (1, 2))
    assert assemble_input(BitWord("10"), code) == BitWord("0010")
    assert assemble_input(BitWord("10"), PolarCode(4, (1, 2), frozen_value=1)) == BitWord("1110")
    assert assemble_input(BitWord("0110"), PolarCode(4, ())) == BitWord("0110")
    with pytest.raises(ValueError):
        assemble_input(BitWord("1"), code)


def test_assemble_input_text_payload():
    bits = text_to_bits("Write A Write BC")
    u = assemble_input(bits, PolarCode.first_half(256))
    assert u[:128] == BitWord.zeros(128)
    assert u[128:] == bits


@pytest.mark.parametrize("permuted", [False, True])
def test_noiseless_roundtrip_exhaustive_n8(permuted):
    code = PolarCode.first_half(8, permuted=permuted)
    for m in itertools.product((0, 1), repeat=4):
        msg = BitWord(m)
        y = ReceivedWord.from_bits(encode(assemble_input(msg, code), code))
        res = decode(y, code)
        assert res.ok and res.message == msg
