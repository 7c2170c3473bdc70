"""Small number-theory utilities shared by the exponential-sum and prime-count modules."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

# Deterministic Miller-Rabin witness set, valid for all n < 3.3e24
# (Sorenson & Webster); far beyond the ranges used here.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41):
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization, returned as (prime, exponent) pairs."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out = []
    d = 2
    while d * d <= n:
        e = 0
        while n % d == 0:
            e += 1
            n //= d
        if e:
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def is_cubefree(n: int) -> bool:
    return all(e <= 2 for _, e in factorize(n))


def tau(n: int) -> int:
    """Number of divisors."""
    out = 1
    for _, e in factorize(n):
        out *= e + 1
    return out


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


def mobius(n: int) -> int:
    mu = 1
    for _, e in factorize(n):
        if e > 1:
            return 0
        mu = -mu
    return mu


@lru_cache(maxsize=128)
def inverse_table(q: int) -> np.ndarray:
    """inv[n] = n^-1 mod q for invertible n, and -1 where gcd(n, q) > 1.

    Cached; intended for moduli up to ~1e6 in cold paths.
    """
    if q < 1:
        raise ValueError("modulus must be positive")
    inv = np.full(q, -1, dtype=np.int64)
    if q == 1:
        inv[:] = 0
        return inv
    for n in range(1, q):
        if math.gcd(n, q) == 1:
            inv[n] = pow(n, -1, q)
    inv.setflags(write=False)
    return inv


def inverse_table_prime(p: int) -> np.ndarray:
    """inv[n] = n^-1 mod p for 1 <= n < p, via the standard O(p) recurrence."""
    inv = np.zeros(p, dtype=np.int64)
    if p == 1:
        return inv
    inv[1] = 1
    for n in range(2, p):
        inv[n] = (p - (p // n) * inv[p % n]) % p
    return inv


def inverses_mod_p2(n: np.ndarray, p: int, inv_p: np.ndarray | None = None) -> np.ndarray:
    """Vectorized inverses modulo p^2 by one Newton lift of the mod-p inverse.

    Entries with p | n come back as -1. Safe in int64 for p^2 <= 1e8.
    """
    if inv_p is None:
        inv_p = inverse_table_prime(p)
    q = p * p
    r = n % q
    base = inv_p[r % p]
    lifted = base * ((2 - r * base) % q) % q
    return np.where(r % p == 0, -1, lifted)
