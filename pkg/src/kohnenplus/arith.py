"""Small exact number-theory utilities used throughout the package.

Everything here is deterministic integer arithmetic: sieves, divisor sums,
squarefree/fundamental-discriminant tests, Moebius values.  All functions
accept and return plain Python ints so they stay exact at any size.
"""

from __future__ import annotations

import math
from functools import lru_cache


def primes_up_to(n: int) -> list[int]:
    """All primes <= n by a byte sieve."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            start = p * p
            sieve[start:n + 1:p] = b"\x00" * ((n - start) // p + 1)
    return [i for i, v in enumerate(sieve) if v]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for p in range(3, math.isqrt(n) + 1, 2):
        if n % p == 0:
            return False
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n >= 1 as (p, exponent) pairs, by trial division."""
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    out = []
    for p in (2, 3):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
    p = 5
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
        p += 2 if p % 6 == 5 else 4
    if n > 1:
        out.append((n, 1))
    return out


def divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in factorize(n):
        ds = [d * p**j for d in ds for j in range(e + 1)]
    return sorted(ds)


def mobius(n: int) -> int:
    if n < 1:
        raise ValueError("mobius expects n >= 1")
    mu = 1
    for _, e in factorize(n):
        if e > 1:
            return 0
        mu = -mu
    return mu


def is_squarefree(n: int) -> bool:
    return mobius(abs(n)) != 0 if n != 0 else False


def euler_phi(n: int) -> int:
    phi = n
    for p, _ in factorize(n):
        phi = phi // p * (p - 1)
    return phi


def divisor_count(n: int) -> int:
    return math.prod(e + 1 for _, e in factorize(n))


def sigma_sieve(power: int, n: int) -> list[int]:
    """List s with s[m] = sigma_power(m) for 0 <= m <= n (s[0] = 0), exact ints."""
    s = [0] * (n + 1)
    for d in range(1, n + 1):
        dp = d**power
        for m in range(d, n + 1, d):
            s[m] += dp
    return s


def mobius_sieve(n: int) -> list[int]:
    mu = [1] * (n + 1)
    mu[0] = 0
    for p in primes_up_to(n):
        for m in range(p, n + 1, p):
            mu[m] = -mu[m]
        p2 = p * p
        for m in range(p2, n + 1, p2):
            mu[m] = 0
    return mu


@lru_cache(maxsize=None)
def is_fundamental_discriminant(d: int) -> bool:
    """Discriminant of a quadratic field; d = 1 counts (trivial character)."""
    if d == 0:
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def fundamental_discriminants(lo: int, hi: int) -> list[int]:
    return [d for d in range(lo, hi + 1) if d != 0 and is_fundamental_discriminant(d)]
