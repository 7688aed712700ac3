"""Acceptance criteria 1-8, one printed PASS/FAIL line each (also shown in the terminal summary)."""

import math
import time

import numpy as np
import pytest

from converse2 import converse_checks as cc
from converse2.arith import primes_up_to
from converse2.characters import gauss_sum, orthogonality_defects, primitive_characters
from converse2.coefficients import euler_factor_inverse
from converse2.forms import BUNDLED
from converse2.lfunction import (
    Twist,
    estimate_root_number,
    verify_twist_identity,
    y_independence_sweep,
)
from converse2.qexp import check_matrix_identity, check_top_row_lemma, matrix_identity_details

from .conftest import ACCEPTANCE_LINES

FE_S = (0.5, 0.5 + 1.0j, 0.75)


def report(n: int, ok: bool, elapsed: float, budget: float, detail: str) -> None:
    within = elapsed < budget
    status = "PASS" if ok and within else "FAIL"
    line = f"criterion {n}: {status}  ({detail}; {elapsed:.2f}s of {budget:g}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line
    assert within, line


def test_criterion_1_characters():
    t0 = time.perf_counter()
    orth = sum(len(orthogonality_defects(q)) for q in range(1, 51))
    gauss = max(abs(abs(gauss_sum(c)) ** 2 - q) for q in range(1, 51) for c in primitive_characters(q))
    elapsed = time.perf_counter() - t0
    report(1, orth == 0 and gauss < 1e-12, elapsed, 5,
           f"orthogonality failures {orth}, max ||tau|^2 - q| {gauss:.2e}")


def test_criterion_2_euler_factors():
    t0 = time.perf_counter()
    X = 97**3
    worst, exact_ok, roots_ok, checked = 0.0, True, True, 0
    for desc in BUNDLED.values():
        series = desc.build(X)
        for q in primes_up_to(97):
            d = euler_factor_inverse(series, q, 6, clamp=True)
            if len(d.inverse_poly) > 3:
                checked += 1
            worst = max(worst, d.defect)
            if d.exact:
                exact_ok &= all(c == 0 for c in d.exact_inverse[3:])
            if series.level % q:
                roots_ok &= d.satisfies_nonvanishing()
    elapsed = time.perf_counter() - t0
    report(2, worst < 1e-9 and exact_ok and roots_ok, elapsed, 10,
           f"max |c_3..c_J| {worst:.2e}, exact zeros {exact_ok}, root condition {roots_ok}, "
           f"{checked} (form, q) pairs with c_3 exposed")


def test_criterion_3_twist_identity(delta):
    t0 = time.perf_counter()
    coef = analytic = truncated = 0.0
    for q in (5, 7):
        roots = None
        for s in (2.0, 2.0 + 1.0j):
            res = verify_twist_identity(delta, q, s, root_numbers=roots)
            roots = res.root_numbers
            coef = max(coef, res.coefficient_defect)
            analytic = max(analytic, res.analytic_residual)
            truncated = max(truncated, res.truncated_residual)
    elapsed = time.perf_counter() - t0
    report(3, coef < 1e-12 and analytic < 1e-10 and truncated < 1e-10, elapsed, 30,
           f"coefficient defect {coef:.2e}, analytic residual {analytic:.2e}, truncated residual {truncated:.2e}")


def fe_residuals(series):
    """(max relative Y-residual, max absolute Y-residual, max spread, max ||eps| - 1|) over chi mod 5 and 7."""
    rel = absolute = spread = unimod = 0.0
    for q in (5, 7):
        for chi in primitive_characters(q):
            tw = Twist.character(chi)
            est = estimate_root_number(series, tw, s_samples=FE_S)
            spread = max(spread, est.spread)
            unimod = max(unimod, est.unimodularity_defect)
            for s in FE_S:
                y = y_independence_sweep(series, tw, s, est.eps)
                rel = max(rel, y.relative_residual)
                absolute = max(absolute, y.residual)
    return rel, absolute, spread, unimod


def test_criterion_4_functional_equations(delta):
    t0 = time.perf_counter()
    rel, absolute, spread, unimod = fe_residuals(delta)
    elapsed = time.perf_counter() - t0
    report(4, rel < 1e-8 and absolute < 1e-8 and spread < 1e-7 and unimod < 1e-8, elapsed, 120,
           f"Y-residual {rel:.2e} relative / {absolute:.2e} absolute, root spread {spread:.2e}, "
           f"||eps|-1| {unimod:.2e}")


def test_criterion_5_ramanujan_fe(delta):
    t0 = time.perf_counter()
    res = cc.verify_ramanujan_fe(delta, 5)
    lam, mu = cc.exact_local_data(int(delta.raw_exact[5]), int(delta.raw_exact[25]), 5, 12)
    exact = cc.verify_dq_reflection_exact(lam, mu, 5)
    elapsed = time.perf_counter() - t0
    report(5, res.residual_a < 1e-8 and res.residual_b < 1e-8 and exact.passed and exact.exact, elapsed, 60,
           f"Lambda_(c_q+r) - D_q Lambda_1 {res.residual_a:.2e}, Y-residual {res.residual_b:.2e}, "
           f"exact reflection {exact.passed}")


def test_criterion_6_conclusions(delta, level11):
    t0 = time.perf_counter()
    r = mu = S = gamma = 0.0
    for series, q in ((delta, 5), (delta, 7), (level11, 23)):
        data = cc.build_local_data(series, q)
        r = max(r, abs(data.r))
        mu = max(mu, abs(abs(data.mu) - 1))
        S = max(S, data.unit_defect())
        for b in (1, 2, 3):
            gamma = max(gamma, cc.verify_gamma_invariance(series, q, b))
    elapsed = time.perf_counter() - t0
    report(6, r < 1e-8 and mu < 1e-8 and S < 1e-6 and gamma < 1e-8, elapsed, 180,
           f"|r| {r:.2e}, ||mu|-1| {mu:.2e}, S_q defect {S:.2e}, gamma residual {gamma:.2e}")


def test_criterion_7_sensitivity(delta):
    t0 = time.perf_counter()
    bad = delta.perturbed(2, 0.01)
    rel, _, _, _ = fe_residuals(bad)
    S = max(cc.build_local_data(bad, q, strict=False).unit_defect() for q in (5, 7))
    coef = max(verify_twist_identity(bad, q, 2.0).coefficient_defect for q in (5, 7))
    elapsed = time.perf_counter() - t0
    report(7, rel > 1e-4 and S > 1e-4 and coef < 1e-12, elapsed, 120,
           f"perturbed a_2: Y-residual {rel:.2e}, S_q defect {S:.2e}, coefficient defect {coef:.2e}")


def test_criterion_8_matrix_identities():
    t0 = time.perf_counter()
    ok = all(check_matrix_identity(N, M) for N in (1, 11, 15) for M in range(1, 11))
    count = sum(len(matrix_identity_details(N, M)) for N in (1, 11, 15) for M in range(1, 11))
    lemma = all(
        check_top_row_lemma(N, M * N + 1, b)
        for N in (1, 11, 15)
        for M in range(1, 11)
        for b in (1, 2, 3)
        if math.gcd(b * N, M * N + 1) == 1
    )
    elapsed = time.perf_counter() - t0
    report(8, ok and lemma, elapsed, 1, f"{count} exact identities, top-row lemma {lemma}")
