import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import chisquare

from polarlin.channels import (
    BEC,
    GaussianFlip,
    NoiseKind,
    NoiseRealization,
    ReceivedWord,
    Symbol,
    bec_mutual_information,
    bsc_mutual_information,
    erased_count,
    erfc,
    flip_probability,
    flipped_count,
    sample_noise,
    sigma_for_epsilon,
    transmit,
)
from polarlin.gf2 import BitWord

mpmath.mp.dps = 30


def erfc_oracle(x):
    """Gaussian tail by adaptive quadrature: 2/sqrt(pi) * int_x^inf exp(-t^2) dt."""
    x = mpmath.mpf(x)
    return 2 / mpmath.sqrt(mpmath.pi) * mpmath.quad(lambda t: mpmath.exp(-t * t), [x, x + 1, mpmath.inf])


# --------------------------------------------------------------------------- erfc


def test_erfc_examples():
    assert erfc(0.0) == 1.0
    assert erfc(0.4777) == pytest.approx(float(erfc_oracle(0.4777)), rel=1e-12)
    assert erfc(0.4777) == pytest.approx(0.4994, abs=1e-4)


@given(st.floats(-10, 10))
def test_erfc_reflection(x):
    assert erfc(x) + erfc(-x) == pytest.approx(2.0, abs=1e-15)


def test_erfc_matches_quadrature_grid():
    grid = np.linspace(-6, 6, 1000)
    worst = max(abs(erfc(x) - float(erfc_oracle(x))) / float(erfc_oracle(x)) for x in grid)
    assert worst < 1e-10


@pytest.mark.parametrize("x", [7.0, 8.5, 10.0])
def test_erfc_far_tail(x):
    assert erfc(x) == pytest.approx(float(erfc_oracle(x)), rel=1e-10)


# --------------------------------------------------------------------------- flip probability


def test_flip_probability_examples():
    assert flip_probability(1e-3) == 0.0
    assert flip_probability(1.48) == pytest.approx(0.50, abs=0.005)
    assert flip_probability(0.5) == pytest.approx(float(erfc_oracle(math.sqrt(2))), rel=1e-12)
    assert flip_probability(0.5) == pytest.approx(0.0455, abs=1e-4)
    assert flip_probability(0.5, half_erfc=True) == pytest.approx(flip_probability(0.5) / 2)
    with pytest.raises(ValueError):
        flip_probability(0.0)


def test_flip_probability_increasing():
    s = np.linspace(0.05, 10, 400)
    p = [flip_probability(v) for v in s]
    assert all(b > a for a, b in zip(p, p[1:]))


def test_sigma_for_epsilon():
    assert sigma_for_epsilon(0.5) == pytest.approx(1.48, abs=0.01)
    eps = np.linspace(0.01, 0.9, 90)
    sig = [sigma_for_epsilon(e) for e in eps]
    assert all(abs(flip_probability(s) - e) < 1e-9 for s, e in zip(sig, eps))
    assert all(b > a for a, b in zip(sig, sig[1:]))
    assert flip_probability(sigma_for_epsilon(0.2, True), True) == pytest.approx(0.2, abs=1e-10)
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(ValueError):
            sigma_for_epsilon(bad)


# --------------------------------------------------------------------------- counts


def test_counts():
    assert erased_count(256, 0.1) == 26
    assert erased_count(256, 0.0) == 0
    assert erased_count(256, 0.001) == 0
    assert erased_count(4, 0.125) == 0  # 0.5 rounds to even
    assert erased_count(4, 0.375) == 2  # 1.5 rounds to even
    assert flipped_count(1024, 0.3) == 1
    assert flipped_count(1024, 0.01) == 0
    assert flipped_count(1024, 0.5) == 47
    with pytest.raises(ValueError):
        erased_count(8, 1.5)


def test_mutual_information():
    assert bsc_mutual_information(0.0) == 1.0
    assert bsc_mutual_information(0.5) == 0.0
    assert bsc_mutual_information(0.11) == pytest.approx(0.5, abs=0.001)
    for p in (0.01, 0.2, 0.37):
        assert bsc_mutual_information(p) == pytest.approx(bsc_mutual_information(1 - p), abs=1e-15)
    assert bec_mutual_information(0.0) == 1.0
    assert bec_mutual_information(1.0) == 0.0
    assert bec_mutual_information(0.5) == 0.5
    with pytest.raises(ValueError):
        bsc_mutual_information(1.1)


def test_model_validation():
    with pytest.raises(ValueError):
        BEC(1.2)
    with pytest.raises(ValueError):
        GaussianFlip(-1.0)


# --------------------------------------------------------------------------- sampling


def test_sample_noise_empty():
    rng = np.random.default_rng(0)
    assert sample_noise(256, BEC(0.0), rng).positions == ()
    assert sample_noise(1024, GaussianFlip(0.01), rng).positions == ()


def test_sample_noise_determinism_and_kind():
    a = sample_noise(256, BEC(0.1), np.random.default_rng(5))
    b = sample_noise(256, BEC(0.1), np.random.default_rng(5))
    assert a == b and a.kind is NoiseKind.ERASE
    f = sample_noise(1024, GaussianFlip(0.5), np.random.default_rng(5))
    assert f.kind is NoiseKind.FLIP
    assert list(f.positions) == sorted(set(f.positions))


def test_sample_noise_dedupe_mean():
    N, draws = 256, 26
    expected = N * (1 - (1 - 1 / N) ** draws)  # mean number of distinct values
    rng = np.random.default_rng(12345)
    sizes = np.array([len(sample_noise(N, BEC(0.1), rng)) for _ in range(20_000)])
    assert sizes.max() <= 26
    assert sizes.mean() == pytest.approx(expected, abs=0.05)
    assert sizes.mean() == pytest.approx(24.7, abs=0.2)


def test_sample_noise_exact_count():
    rng = np.random.default_rng(1)
    for _ in range(50):
        assert len(sample_noise(256, BEC(0.1), rng, exact_count=True)) == 26


def test_sample_noise_uniform():
    N = 256
    rng = np.random.default_rng(2024)
    counts = np.zeros(N, dtype=np.int64)
    total = 0
    while total < 100_000:
        pos = np.asarray(sample_noise(N, BEC(0.1), rng).positions) - 1
        np.add.at(counts, pos, 1)
        total += pos.size
    assert counts.min() > 0
    assert chisquare(counts).pvalue > 0.001


# --------------------------------------------------------------------------- transmit


def test_transmit_examples():
    x = BitWord("1011")
    assert transmit(x, NoiseRealization((), NoiseKind.ERASE)) == ReceivedWord.from_bits(x)
    y = transmit(x, NoiseRealization((1,), NoiseKind.ERASE))
    assert str(y) == "?011"
    assert y.symbols[0] == Symbol.ERASED and y.erased_positions() == (1,)
    z = transmit(x, NoiseRealization((2,), NoiseKind.FLIP))
    assert str(z) == "1111" and z.flagged == (2,)
    with pytest.raises(ValueError):
        transmit(x, NoiseRealization((5,), NoiseKind.FLIP))


@given(st.lists(st.integers(0, 1), min_size=2, max_size=80), st.data())
def test_transmit_touches_only_listed(bits, data):
    x = BitWord(bits)
    pos = data.draw(st.sets(st.integers(1, len(bits))))
    kind = data.draw(st.sampled_from(list(NoiseKind)))
    y = transmit(x, NoiseRealization(tuple(sorted(pos)), kind))
    assert len(y) == len(x)
    for j in range(len(bits)):
        if j + 1 in pos:
            assert y.symbols[j] == (Symbol.ERASED if kind is NoiseKind.ERASE else 1 - bits[j])
        else:
            assert y.symbols[j] == bits[j]


def test_received_word_parsing():
    assert str(ReceivedWord.from_string("1e0?")) == "1?0?"
    with pytest.raises(ValueError):
        ReceivedWord.from_string("10x")
    with pytest.raises(ValueError):
        ReceivedWord.from_string("10", flagged=(3,))
