import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from converse2.arith import (
    divisor_counts,
    divisors,
    egcd,
    euler_phi,
    factorize,
    is_prime,
    mobius,
    primes_up_to,
    smallest_prime_factor,
)


def test_primes_up_to_matches_trial_division():
    expected = [n for n in range(2, 200) if all(n % d for d in range(2, int(n**0.5) + 1))]
    assert primes_up_to(199) == expected
    assert [n for n in range(200) if is_prime(n)] == expected


def test_small_values():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert euler_phi(1) == 1 and euler_phi(36) == 12
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]


@given(st.integers(1, 5000))
def test_factorization_round_trip(n):
    assert math.prod(p**e for p, e in factorize(n).items()) == n
    assert euler_phi(n) == sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_egcd_bezout(a, b):
    g, x, y = egcd(a, b)
    assert g == math.gcd(a, b)
    assert a * x + b * y == g


def test_sieves_agree_with_direct():
    d = divisor_counts(300)
    spf = smallest_prime_factor(300)
    for n in range(2, 301):
        assert d[n] == len(divisors(n))
        assert spf[n] == min(factorize(n))
    assert isinstance(d, np.ndarray)
