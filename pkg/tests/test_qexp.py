import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from converse2.characters import primitive_characters
from converse2.qexp import (
    IDENTITY,
    H,
    InsufficientTruncation,
    Mat2,
    P,
    UpperHalfPoint,
    balanced_points,
    check_matrix_identity,
    check_modularity,
    check_top_row_lemma,
    estimate_phase,
    eval_form,
    fourier_coefficients_slash_gamma,
    gamma_q_b,
    matrix_identity_details,
    tail_bound,
    twist_gamma,
    twisted_coeffs,
)

small = st.integers(-20, 20)


@given(small, small, small, small, small, small, small, small)
def test_mat2_algebra(a, b, c, d, e, f, g, h):
    A, B = Mat2(a, b, c, d), Mat2(e, f, g, h)
    assert (A @ B).det == A.det * B.det
    if A.det:
        assert A @ A.inverse() == IDENTITY
    assert (A @ B) @ P == A @ (B @ P)


def test_powers_of_translation():
    assert P**5 == Mat2(1, 5, 0, 1)
    assert P**-3 == Mat2(1, -3, 0, 1)


@pytest.mark.parametrize("N", [1, 11, 15])
@pytest.mark.parametrize("M", range(1, 11))
def test_matrix_identities(N, M):
    details = matrix_identity_details(N, M)
    assert all(details.values()), details
    assert check_matrix_identity(N, M)


@pytest.mark.parametrize("N,q", [(1, 5), (1, 7), (11, 23), (15, 31), (11, 5)])
def test_gamma_q_b(N, q):
    for b in range(1, 3 * q):
        if math.gcd(b * N, q) != 1:
            with pytest.raises(ValueError):
                gamma_q_b(N, q, b)
            continue
        g = gamma_q_b(N, q, b)
        assert (g.a, g.b) == (q, -b) and g.det == 1 and g.c % N == 0 and g.is_integral()
        assert check_top_row_lemma(N, q, b)


def test_delta_at_i(delta):
    """Delta(i) = Gamma(1/4)^24 / (2^24 pi^18)."""
    value, tail = eval_form(delta, 1j)
    ref = float(mpmath.gamma(0.25) ** 24 / (2**24 * mpmath.pi**18))
    assert abs(value - ref) < 1e-14 * ref
    assert tail < 1e-100


def test_periodicity_exact(delta):
    z = UpperHalfPoint(Fraction(2, 7), 0.05)
    v1, _ = eval_form(delta, z)
    v2, _ = eval_form(delta, z.shifted(3))
    assert v1 == v2


def test_delta_level_one_invariance(delta):
    assert check_modularity(delta, H(1), 1.0) < 1e-12
    for q in (5, 7):
        assert check_modularity(delta, Mat2(q, -1, 1 - q, 1), 1.0) < 1e-10


def test_level11_fricke_sign(level11):
    """For a weight 2 newform with p || N the Fricke eigenvalue is -a_p; here a_11 = 1."""
    ph = estimate_phase(level11, H(11), conjugated_right=True)
    assert abs(ph.omega + 1) < 1e-10 and ph.spread < 1e-10


def test_twist_matrix_phase(delta, level11):
    assert abs(estimate_phase(delta, twist_gamma(1, 5), conjugated_left=True).omega - 1) < 1e-10
    ph = estimate_phase(level11, twist_gamma(11, 23), conjugated_left=True)
    assert ph.unimodularity_defect < 1e-10 and ph.spread < 1e-10


def test_perturbed_form_is_not_modular(delta):
    ph = estimate_phase(delta.perturbed(2, 0.01), H(1))
    assert ph.spread > 1e-4


def test_tail_bound_is_rigorous(delta):
    y, X = 0.02, 500
    n = np.arange(X + 1, delta.length + 1)
    actual = np.sum(np.abs(delta.f[X + 1 :]) * np.exp(-2 * np.pi * n * y))
    assert actual <= tail_bound(delta.growth_constant, 12, y, X)


def test_insufficient_truncation_reports_needed_length(delta):
    short = delta.truncated(50)
    with pytest.raises(InsufficientTruncation) as info:
        eval_form(short, UpperHalfPoint(0, 0.01), rtol=1e-12)
    assert info.value.min_X > 50


def test_balanced_points_on_isometric_circle():
    g = Mat2(7, -1, -6, 1)
    for pt in balanced_points(g):
        assert abs(g.act(pt.z).imag - pt.y) < 1e-12


@pytest.mark.parametrize("q", [5, 7])
def test_twisted_form_level(delta, q):
    """f_chi is modular for Gamma_1(q^2): invariant under [[1, 0], [q^2, 1]]."""
    for chi in primitive_characters(q):
        tw = twisted_coeffs(delta, q, chi)
        assert tw.level == q * q
        assert check_modularity(tw, Mat2(1, 0, q * q, 1), 1.0) < 1e-8


def test_twisted_requires_congruence(level11):
    with pytest.raises(ValueError):
        twisted_coeffs(level11, 5)
    assert twisted_coeffs(level11, 23).level == 11 * 23**2


def test_slash_coefficients_trivial_case(delta):
    S = np.ones(5, dtype=complex)
    out = fourier_coefficients_slash_gamma(delta.truncated(200), 5, 2, S, 0.0)
    assert np.array_equal(out[1:], delta.f[1:201])
