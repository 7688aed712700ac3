import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from converse2 import converse_checks as cc
from converse2.characters import characters_mod, primitive_characters
from converse2.coefficients import euler_factor_inverse

finite = st.floats(-10, 10, allow_nan=False)


def test_dq_reflection_examples():
    assert cc.verify_dq_reflection(0.7, 1.0, 5).passed
    assert cc.verify_dq_reflection(0, 0, 7).passed
    A, B, C = cc.dq_coefficients(0.7, 1.0, 1.0, 5)
    assert A == -1  # r = 0 so A = r - 1
    assert (B, C) == (3.5, -5.0)


@given(finite, finite, finite, finite, st.sampled_from([2, 3, 5, 7, 11, 13]))
def test_dq_reflection_any_local_data(lr, li, mr, mi, q):
    """The reflection holds for every (lam, mu) once eps and r are defined from them."""
    assert cc.verify_dq_reflection(complex(lr, li), complex(mr, mi), q, tol=1e-12).passed


def test_quadratic_surd_arithmetic():
    r5 = cc.QuadraticSurd(Fraction(0), Fraction(1), 5)
    assert r5 * r5 == 5
    assert (r5 + 1) * (r5 - 1) == 4
    assert cc.QuadraticSurd(Fraction(2), Fraction(-1), 5).sign() == -1
    assert cc.QuadraticSurd(Fraction(3), Fraction(-1), 5).sign() == 1
    assert float(r5 / 2) == pytest.approx(5**0.5 / 2)


@pytest.mark.parametrize("name,k,primes", [("delta", 12, range(2, 98)), ("level11", 2, range(2, 98))])
def test_dq_reflection_exact_on_eta_data(request, name, k, primes):
    series = request.getfixturevalue(name)
    raw = series.raw_exact
    for q in primes:
        if not all(q % d for d in range(2, q)) or series.level % q == 0:
            continue
        lam, mu = cc.exact_local_data(int(raw[q]), int(raw[q * q]), q, k)
        assert mu == 1  # |mu| = 1 exactly for these newforms
        res = cc.verify_dq_reflection_exact(lam, mu, q)
        assert res.passed and res.exact


def test_ramanujan_fe_delta(delta):
    res = cc.verify_ramanujan_fe(delta, 5)
    assert res.residual_a < 1e-9
    assert res.residual_b < 1e-8
    assert res.r == 0


def test_ramanujan_fe_corrupted_mu(delta):
    mu = euler_factor_inverse(delta, 5, 2).mu
    res = cc.verify_ramanujan_fe(delta, 5, mu_override=mu + 0.01)
    assert res.residual_b > 1e-4


def test_ramanujan_fe_level11(level11):
    res = cc.verify_ramanujan_fe(level11, 23)
    assert res.residual_a < 1e-9 and res.residual_b < 1e-8


def test_ramanujan_fe_requires_congruence(level11):
    with pytest.raises(ValueError, match="not 1 mod"):
        cc.verify_ramanujan_fe(level11, 5)


def test_compute_C_chi_examples():
    chi0 = characters_mod(5)[0]
    assert cc.compute_C_chi(chi0, 1.0, None, 1, 1.0) == 1
    quad = next(c for c in primitive_characters(5) if c.order == 2)
    eps_chi = cmath.exp(0.3j)
    C = cc.compute_C_chi(quad, 1.0, eps_chi, 1, 1.0)
    assert abs(C - quad(-1) * np.conj(eps_chi)) < 1e-12
    with pytest.raises(ValueError, match="unimodular"):
        cc.compute_C_chi(quad, 1.0, 1.2, 1, 1.0)


@pytest.mark.parametrize("q", [5, 7])
def test_local_data_on_delta(delta, q):
    data = cc.build_local_data(delta, q)
    assert all(abs(abs(c) - 1) < 1e-10 for c in data.C.values())
    assert data.unit_defect() < 1e-6
    assert data.zero_defect() < 1e-10
    assert abs(data.S[0] - 1) < 1e-10  # r = 0, eps = 1
    assert np.max(np.abs(cc.reconstruct_C_hat(data.S) - data.C_hat)) < 1e-10
    assert np.max(np.abs(cc.c_hat_from_S0(data.S[0], q) - data.C_hat)) < 1e-10


def test_local_data_on_level11(level11):
    data = cc.build_local_data(level11, 23)
    assert data.unit_defect() < 1e-6
    assert abs(data.r) < 1e-8 and abs(abs(data.mu) - 1) < 1e-8


def test_random_unimodular_constants_break_S(delta):
    rng = np.random.default_rng(1)
    roots = {"untwisted": 1.0}
    for chi in primitive_characters(7):
        roots[chi.label] = cmath.exp(2j * np.pi * rng.random())
    data = cc.build_local_data(delta, 7, root_numbers=roots)
    assert data.unit_defect() > 1e-2


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5, 7, 11]), st.integers(0, 2**32 - 1))
def test_inverse_dft(q, seed):
    rng = np.random.default_rng(seed)
    table = rng.normal(size=q) + 1j * rng.normal(size=q)
    S = cc.compute_S_q(q, table)
    assert np.max(np.abs(cc.reconstruct_C_hat(S) - table)) < 1e-10


@pytest.mark.parametrize("name,qs", [("delta", (5, 7, 13)), ("level11", (23,))])
def test_newform_local_invariants(request, name, qs):
    series = request.getfixturevalue(name)
    for q in qs:
        d = euler_factor_inverse(series, q, 2)
        assert abs(d.r) < 1e-8 and abs(abs(d.mu) - 1) < 1e-8
        if abs(d.lam) > 0 and d.lam.imag == 0:
            assert d.eps == 1


def test_find_nonvanishing_residue(delta, level11):
    assert cc.find_nonvanishing_residue(delta, 5, 1, 100) == 1
    assert cc.find_nonvanishing_residue(delta, 5, 2, 100) == 2
    for a in range(1, 23):
        n = cc.find_nonvanishing_residue(level11, 23, a, 500)
        assert n is not None and n % 23 == a and n <= 500
    # a_n = 0 for n = 19 (a_19 = 0 for the level-11 form) so the scan moves on
    assert cc.find_nonvanishing_residue(level11, 23, 19, 500) != 19
    assert cc.find_nonvanishing_residue(level11, 23, 19, 18) is None
    with pytest.raises(ValueError):
        cc.find_nonvanishing_residue(delta, 5, 10, 100)


def test_euler_inequivalence(delta, level11, eis15):
    assert cc.euler_inequivalence(delta, level11, 50) == 2
    assert cc.euler_inequivalence(delta, delta, 50) is None
    assert cc.euler_inequivalence(eis15, delta, 50) == 2


@pytest.mark.parametrize("b", [0, 1, 2, 5])
def test_gamma_invariance_delta(delta, b):
    assert cc.verify_gamma_invariance(delta, 5, b) < 1e-8


def test_gamma_invariance_level11(level11):
    for b in (1, 2, 3):
        assert cc.verify_gamma_invariance(level11, 23, b) < 1e-8


def test_fourier_route(delta):
    data = cc.build_local_data(delta, 7)
    for b in (1, 3):
        assert cc.fourier_gamma_defect(delta, data, b, 2000) < 1e-10


def test_invariance_matrix_diagonal_case():
    assert cc.invariance_matrix(1, 5, 10) == cc.P ** (-10)
    g = cc.invariance_matrix(11, 23, 4)
    assert (g.a, g.b, g.det) == (23, -4, 1)


def test_perturbed_delta_S_defect(delta):
    data = cc.build_local_data(delta.perturbed(2, 0.01), 5, strict=False)
    assert data.unit_defect() > 1e-4
