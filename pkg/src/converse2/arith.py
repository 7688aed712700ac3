"""Small integer helpers shared by the character and coefficient code."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = b"\x00" * len(range(p * p, n + 1, p))
    return [i for i, v in enumerate(sieve) if v]


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division (n >= 1)."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n).items():
        divs = [d * p**j for d in divs for j in range(e + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    result = n
    for p in factorize(n):
        result -= result // p
    return result


def mobius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for e in fac.values()):
        return 0
    return -1 if len(fac) % 2 else 1


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with a*x + b*y == g == gcd(a, b)."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        t = a // b
        a, b = b, a - t * b
        x0, x1 = x1, x0 - t * x1
        y0, y1 = y1, y0 - t * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


@lru_cache(maxsize=32)
def smallest_prime_factor(n: int) -> np.ndarray:
    """spf[m] for 0 <= m <= n (spf[0] = spf[1] = 0)."""
    spf = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if spf[p] == 0:
            block = spf[p :: p]
            block[block == 0] = p
    spf.flags.writeable = False
    return spf


@lru_cache(maxsize=32)
def divisor_counts(n: int) -> np.ndarray:
    """d(m) for 0 <= m <= n, with d(0) = 0."""
    d = np.zeros(n + 1, dtype=np.int64)
    for k in range(1, n + 1):
        d[k::k] += 1
    d.flags.writeable = False
    return d
