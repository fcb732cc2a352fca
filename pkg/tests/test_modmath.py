import random
from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from authlab.errors import NotCoprime, ZeroNotInvertible
from authlab.modmath import (
    exp_inv,
    from_hex,
    gen_prime,
    is_probable_prime,
    mod_inv,
    mod_pow,
    sample_exponent,
    to_hex,
)
from oracles import brute_inv, naive_pow, trial_division_prime


@pytest.mark.parametrize("x", range(1, 23))
def test_mod_pow_zero_exponent(x):
    assert mod_pow(x, 0, 23) == 1


def test_mod_pow_examples():
    assert mod_pow(2, 22, 23) == 1
    assert mod_pow(5, 3, 23) == 10


def test_mod_pow_matches_naive_grid():
    for base in range(23):
        for exp in range(51):
            assert mod_pow(base, exp, 23) == naive_pow(base, exp, 23), (base, exp)


def test_mod_pow_rejects_unreduced_base():
    with pytest.raises(ValueError):
        mod_pow(23, 2, 23)


@given(st.integers(0, 2**64), st.integers(0, 2**70), st.sampled_from([23, 1009, 2**61 - 1]))
def test_mod_pow_agrees_with_builtin(base, exp, m):
    base %= m
    assert mod_pow(base, exp, m) == pow(base, exp, m)


def test_mod_inv_examples():
    assert mod_inv(1, 23) == 1
    assert mod_inv(4, 23) == 6
    with pytest.raises(ZeroNotInvertible):
        mod_inv(0, 23)


def test_mod_inv_matches_exhaustive_search():
    for a in range(1, 23):
        assert mod_inv(a, 23) == brute_inv(a, 23)


def test_fermat_holds_on_z23():
    assert all(mod_pow(a, 22, 23) == 1 for a in range(1, 23))


def test_exp_inv_examples():
    assert exp_inv(1, 22) == 1
    assert exp_inv(3, 22) == 15
    with pytest.raises(NotCoprime):
        exp_inv(2, 22)


def test_exp_inv_undoes_exponentiation_exhaustively():
    for k in range(1, 22):
        if k % 2 == 0 or k % 11 == 0:
            with pytest.raises(NotCoprime):
                exp_inv(k, 22)
            continue
        k_inv = exp_inv(k, 22)
        for x in range(1, 23):
            assert mod_pow(mod_pow(x, k, 23), k_inv, 23) == x


def test_sample_exponent_is_reproducible():
    a = [sample_exponent(23, random.Random(5)) for _ in range(3)]
    assert a[0] == a[1] == a[2]
    assert 1 <= a[0] <= 21
    s1 = [sample_exponent(2**61 - 1, random.Random(1)) for _ in range(1)]
    s2 = [sample_exponent(2**61 - 1, random.Random(2)) for _ in range(1)]
    assert s1 != s2


def test_sample_exponent_covers_range():
    rng = random.Random(99)
    counts = Counter(sample_exponent(23, rng) for _ in range(10_000))
    assert set(counts) == set(range(1, 22))
    # chi-square against uniform on 21 cells; 21 - 1 dof, 0.999 quantile ~45.3
    expected = 10_000 / 21
    chi2 = sum((c - expected) ** 2 / expected for c in counts.values())
    assert chi2 < 45.3


def test_gen_prime_bit_lengths():
    p5 = gen_prime(5, random.Random(0))
    assert 17 <= p5 <= 31 and trial_division_prime(p5)
    p64 = gen_prime(64, random.Random(0))
    assert p64.bit_length() == 64
    assert trial_division_prime(p64, limit=10**6)
    assert is_probable_prime(p64)
    with pytest.raises(ValueError):
        gen_prime(4, random.Random(0))


def test_primality_agrees_with_trial_division():
    for n in list(range(0, 3000)) + list(range(65_000, 67_000)):
        assert is_probable_prime(n) == trial_division_prime(n), n


def test_primality_known_composites():
    # Carmichael numbers and a strong pseudoprime to several small bases
    for n in (561, 1105, 1729, 2465, 3215031751, 3825123056546413051):
        assert not is_probable_prime(n)
    assert is_probable_prime(2**61 - 1)
    assert is_probable_prime(2**127 - 1)


def test_hex_encoding():
    assert to_hex(0) == "0"
    assert to_hex(255) == "ff"
    assert from_hex("ff") == 255
    for bad in ("", "0ff", "FF", "0x1", "g"):
        with pytest.raises(ValueError):
            from_hex(bad)


@given(st.integers(0, 2**2048))
def test_hex_round_trip(n):
    assert from_hex(to_hex(n)) == n
