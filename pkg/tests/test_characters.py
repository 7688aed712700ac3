import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from converse2.arith import euler_phi, mobius
from converse2.characters import (
    characters_mod,
    fourier_expansion_of_e,
    gauss_sum,
    orthogonality_defects,
    primitive_characters,
    ramanujan_sum,
    ramanujan_sum_direct,
    root_of_unity_sum_is_zero,
    trivial_character,
    verify_additive_fourier_identity,
)


def legendre(a: int, p: int) -> int:
    r = pow(a, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


@pytest.mark.parametrize("q", [1, 2, 3, 4, 5, 7, 8, 9, 12, 15, 16, 21, 24, 35])
def test_group_size_and_trivial_first(q):
    chars = characters_mod(q)
    assert len(chars) == euler_phi(q)
    assert chars[0].is_trivial
    assert trivial_character(q) is chars[0]


@pytest.mark.parametrize("q", range(1, 41))
def test_orthogonality_exact(q):
    assert orthogonality_defects(q) == []


@given(st.sampled_from([5, 7, 8, 9, 12, 13, 15, 20, 21]), st.integers(0, 500), st.integers(0, 500))
def test_complete_multiplicativity(q, a, b):
    for chi in characters_mod(q):
        assert abs(chi(a * b) - chi(a) * chi(b)) < 1e-12


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47])
def test_quadratic_character_and_gauss_sum(p):
    """Euler's criterion for the values; tau = sqrt p or i sqrt p by p mod 4."""
    quad = [c for c in characters_mod(p) if c.order == 2]
    assert len(quad) == 1
    chi = quad[0]
    assert all(chi.exact_value(a) == legendre(a, p) for a in range(1, p))
    expected = math.sqrt(p) if p % 4 == 1 else 1j * math.sqrt(p)
    assert abs(gauss_sum(chi) - expected) < 1e-12


@pytest.mark.parametrize("q", [4, 5, 7, 8, 9, 11, 12, 13, 15, 16, 24, 25, 27, 32, 45, 49])
def test_gauss_sum_modulus_and_direct_sum(q):
    for chi in primitive_characters(q):
        tau = gauss_sum(chi)
        assert abs(abs(tau) ** 2 - q) < 1e-12
        direct = sum(chi(a) * cmath.exp(2j * math.pi * a / q) for a in range(q))
        assert abs(tau - direct) < 1e-10


def test_conductors():
    # one primitive character mod 4 and one mod 3, so one mod 12
    assert len(primitive_characters(12)) == 1
    assert len(primitive_characters(6)) == 0
    assert len(primitive_characters(5)) == 3
    assert len(primitive_characters(15)) == 3
    assert len(primitive_characters(8)) == 2
    for chi in characters_mod(15):
        assert chi.conductor in (1, 3, 5, 15)


@given(st.integers(1, 60), st.integers(-200, 200))
def test_ramanujan_sum_formula(q, n):
    """c_q(n) = mu(q/g) phi(q)/phi(q/g), g = gcd(q, n)."""
    g = math.gcd(q, n)
    expected = mobius(q // g) * euler_phi(q) // euler_phi(q // g)
    assert ramanujan_sum(q, n) == expected
    assert abs(ramanujan_sum_direct(q, n) - expected) < 1e-9


@pytest.mark.parametrize("q", [5, 7, 11, 13])
def test_additive_fourier_identity(q):
    for n in range(-q, 2 * q):
        assert verify_additive_fourier_identity(q, n) < 1e-12
        assert abs(fourier_expansion_of_e(q, n) - cmath.exp(2j * math.pi * n / q)) < 1e-12


def test_root_of_unity_sums():
    counts = np.zeros((2, 6), dtype=np.int64)
    counts[0] = 1  # all sixth roots once: sum 0
    counts[1, 0] = 1  # just 1
    assert list(root_of_unity_sum_is_zero(counts)) == [True, False]


def test_conj_is_inverse():
    for chi in characters_mod(21):
        prod = chi.values * chi.conj().values
        units = [a for a in range(21) if math.gcd(a, 21) == 1]
        assert np.allclose(prod[units], 1)
