"""Modular arithmetic over Z_p and its exponent group Z_(p-1).

Plain Python ints carry every residue and exponent. Nothing here is
constant-time: this is a cryptanalysis bench, not a credential store.
"""

import random
from math import gcd

from authlab.errors import NotCoprime, ZeroNotInvertible

MIN_PRIME = 23
MR_ROUNDS = 40
TRIAL_DIVISION_LIMIT = 1 << 16

_SMALL_PRIMES = [n for n in range(2, 1000) if all(n % d for d in range(2, int(n**0.5) + 1))]


def mod_pow(base: int, exp: int, m: int) -> int:
    """Left-to-right square-and-multiply: ``base**exp % m``."""
    if not 0 <= base < m:
        raise ValueError(f"base must lie in [0, {m - 1}], got {base}")
    if exp < 0:
        raise ValueError("negative exponent; use mod_inv / exp_inv explicitly")
    result = 1 % m
    for bit in bin(exp)[2:]:
        result = result * result % m
        if bit == "1":
            result = result * base % m
    return result


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b == g == gcd(a, b)."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    return old_r, old_s, old_t


def mod_inv(a: int, m: int) -> int:
    """Multiplicative inverse of ``a`` modulo the prime ``m``."""
    if a == 0:
        raise ZeroNotInvertible("0 has no inverse modulo p")
    if not 0 < a < m:
        raise ValueError(f"a must lie in [1, {m - 1}], got {a}")
    g, s, _ = _egcd(a, m)
    if g != 1:
        # only reachable when m is not actually prime
        raise NotCoprime(f"gcd({a}, {m}) = {g}")
    return s % m


def exp_inv(k: int, group_order: int) -> int:
    """Inverse of exponent ``k`` modulo ``group_order`` (p-1 for Z_p^*).

    Raising to ``exp_inv(k, p-1)`` undoes raising to ``k``, i.e. it takes the
    k-th root of a residue. Requires gcd(k, p-1) == 1.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    g, s, _ = _egcd(k % group_order, group_order)
    if g != 1:
        raise NotCoprime(f"gcd({k}, {group_order}) = {g}")
    return s % group_order


def sample_exponent(m: int, rng: random.Random) -> int:
    """Uniform r in [1, p-2]."""
    return rng.randint(1, m - 2)


def is_probable_prime(n: int, rounds: int = MR_ROUNDS) -> bool:
    """Trial division below 2**16, Miller-Rabin with ``rounds`` bases above.

    The witnesses come from an RNG seeded by ``n`` itself, so the answer for a
    given n never changes between runs. 40 rounds bound the error by 4**-40.
    """
    if n < 2:
        return False
    if n < TRIAL_DIVISION_LIMIT:
        return all(n % d for d in range(2, int(n**0.5) + 1))
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    witnesses = random.Random(n)
    for _ in range(rounds):
        a = witnesses.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def gen_prime(bits: int, rng: random.Random) -> int:
    """A prime with exactly ``bits`` bits, drawn reproducibly from ``rng``."""
    if bits < 5:
        raise ValueError("bits must be >= 5")
    while True:
        candidate = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(candidate):
            return candidate


def check_prime(p: int) -> int:
    """Validate a modulus for use as the system prime; returns it unchanged."""
    if p < MIN_PRIME:
        raise ValueError(f"modulus must be >= {MIN_PRIME}, got {p}")
    if not is_probable_prime(p):
        raise ValueError(f"{p} is not prime")
    return p


def to_hex(n: int) -> str:
    """Lowercase hex, no prefix, no leading zeros; "0" for zero."""
    if n < 0:
        raise ValueError("negative integers have no wire encoding")
    return format(n, "x")


def from_hex(s: str) -> int:
    """Parse the canonical encoding produced by :func:`to_hex`."""
    if not isinstance(s, str) or not s:
        raise ValueError("expected a non-empty hex string")
    if any(c not in "0123456789abcdef" for c in s):
        raise ValueError(f"not lowercase hex: {s!r}")
    if len(s) > 1 and s[0] == "0":
        raise ValueError(f"non-canonical hex (leading zero): {s!r}")
    return int(s, 16)


def coprime(a: int, b: int) -> bool:
    return gcd(a, b) == 1
