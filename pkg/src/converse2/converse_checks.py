"""Local data at a prime q and the consequences drawn from it.

From lam = a_q and mu = a_q^2 - a_{q^2}: the unit eps, r = 1 - eps conj(mu),
the Dirichlet polynomial D_q(s) = r + q - 1 - q (1 - lam q^-s + mu q^-2s),
the constants C_chi built from root numbers and Gauss sums, their Fourier
transform C_hat on Z/qZ and the sum S_q(x) = sum_a C_hat(a) e((a-1)x/q).
For a genuine newform r = 0, |mu| = 1 and S_q(x) = 1 for x prime to q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .arith import is_prime, primes_up_to
from .characters import DirichletCharacter, characters_mod, gauss_sum, root_of_unity
from .coefficients import CoefficientSeries, classify_epsilon, euler_factor_inverse
from .lfunction import (
    UNTWISTED,
    CompletedLContext,
    Twist,
    estimate_root_number,
    lambda_completed,
    y_independence_sweep,
)
from .qexp import P, Mat2, check_modularity, fourier_coefficients_slash_gamma, gamma_q_b

UNIT_TOL = 1e-10
EULER_MATCH_TOL = 1e-9


def check_level_congruence(q: int, N: int, allow_any_prime: bool = False) -> None:
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if N % q == 0:
        raise ValueError(f"q = {q} divides the level {N}")
    if not allow_any_prime and (q - 1) % N:
        raise ValueError(f"q = {q} is not 1 mod N = {N}")


# D_q ------------------------------------------------------------------------------------


def dq_coefficients(lam, mu, eps, q: int):
    """(A, B, C) with D_q = A + B z + C z^2 in z = q^-s."""
    r = 1 - eps * _conj(mu)
    return r - 1, q * lam, -q * mu


def _conj(v):
    return v.conjugate() if hasattr(v, "conjugate") else v


@dataclass(frozen=True)
class DqReflection:
    passed: bool
    defect: float
    exact: bool


def verify_dq_reflection(lam: complex, mu: complex, q: int, tol: float = 1e-12) -> DqReflection:
    """Check A = eps conj(C)/q, B = eps conj(B), C = eps conj(A) q in floating point."""
    lam, mu = complex(lam), complex(mu)
    eps = classify_epsilon(lam, mu)
    A, B, C = dq_coefficients(lam, mu, eps, q)
    d = max(
        abs(A - eps * C.conjugate() / q),
        abs(B - eps * B.conjugate()),
        abs(C - eps * A.conjugate() * q),
    )
    scale = max(1.0, abs(B), abs(C))
    return DqReflection(d <= tol * scale, float(d), False)


@dataclass(frozen=True)
class QuadraticSurd:
    """x + y sqrt(d) with rational x, y; d > 0 is fixed by the operands (real field, so conj is trivial)."""

    x: Fraction
    y: Fraction = Fraction(0)
    d: int = 1

    def _lift(self, o) -> QuadraticSurd:
        if isinstance(o, QuadraticSurd):
            if self.y and o.y and o.d != self.d:
                raise ValueError("mixed quadratic fields")
            return o
        return QuadraticSurd(Fraction(o), Fraction(0), self.d)

    def _field(self, o: QuadraticSurd) -> int:
        return self.d if self.y else o.d

    def __add__(self, o):
        o = self._lift(o)
        return QuadraticSurd(self.x + o.x, self.y + o.y, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.x, -self.y, self.d)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        d = self._field(o)
        return QuadraticSurd(self.x * o.x + self.y * o.y * d, self.x * o.y + self.y * o.x, d)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._lift(o)
        if o.y:
            raise NotImplementedError("division by an irrational surd")
        return QuadraticSurd(self.x / o.x, self.y / o.x, self.d)

    def conjugate(self):
        return self

    def __eq__(self, o):
        o = self._lift(o)
        return self.x == o.x and self.y == o.y

    def __hash__(self):
        return hash((self.x, self.y))

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def sign(self) -> int:
        # sign of x + y sqrt(d) without floating point
        if self.y == 0:
            return (self.x > 0) - (self.x < 0)
        if self.x == 0:
            return (self.y > 0) - (self.y < 0)
        if (self.x > 0) == (self.y > 0):
            return 1 if self.x > 0 else -1
        bigger_y = self.y * self.y * self.d > self.x * self.x
        return (1 if self.y > 0 else -1) if bigger_y else (1 if self.x > 0 else -1)

    def __float__(self):
        return float(self.x) + float(self.y) * math.sqrt(self.d)


def exact_local_data(f_q: int, f_q2: int, q: int, k: int) -> tuple[QuadraticSurd, QuadraticSurd]:
    """lam = f_q q^-(k-1)/2 and mu = (f_q^2 - f_{q^2}) / q^(k-1) in Q(sqrt q)."""
    if (k - 1) % 2 == 0:
        lam = QuadraticSurd(Fraction(f_q, q ** ((k - 1) // 2)), Fraction(0), q)
    else:
        # q^-(k-1)/2 = q^-(k/2) sqrt(q)
        lam = QuadraticSurd(Fraction(0), Fraction(f_q, q ** (k // 2)), q)
    mu = QuadraticSurd(Fraction(f_q * f_q - f_q2, q ** (k - 1)), Fraction(0), q)
    return lam, mu


def verify_dq_reflection_exact(lam: QuadraticSurd, mu: QuadraticSurd, q: int) -> DqReflection:
    """Exact reflection check for real lam, mu (eps is then 1 or sign(mu))."""
    if not lam.is_zero():
        eps = 1
    elif not mu.is_zero():
        eps = mu.sign()
    else:
        eps = 1
    A, B, C = dq_coefficients(lam, mu, eps, q)
    ok = A == eps * C / q and B == eps * B and C == eps * A * q
    return DqReflection(bool(ok), 0.0 if ok else math.inf, True)


def dq_value(lam: complex, mu: complex, r: complex, q: int, s: complex) -> complex:
    z = q ** (-complex(s))
    return r + q - 1 - q * (1 - lam * z + mu * z * z)


# local data at q ------------------------------------------------------------------------------


def compute_C_chi(
    chi: DirichletCharacter, eps1: complex, eps_chi: complex | None, N: int, eps: complex, strict: bool = True
) -> complex:
    """conj(eps) for trivial chi, else chi(-N) eps1 conj(eps_chi tau(chi_bar) / tau(chi))."""
    if chi.is_trivial:
        C = np.conj(eps)
        inputs = [eps]
    else:
        C = chi(-N) * eps1 * np.conj(eps_chi * gauss_sum(chi.conj()) / gauss_sum(chi))
        inputs = [eps1, eps_chi]
    if strict:
        for v in inputs:
            if abs(abs(v) - 1) > 1e-6:
                raise ValueError(f"input {v} is not unimodular")
        if abs(abs(C) - 1) > UNIT_TOL:
            raise ValueError(f"|C_chi| = {abs(C)} differs from 1")
    return complex(C)


@dataclass(frozen=True)
class LocalTwistData:
    q: int
    lam: complex
    mu: complex
    eps: complex
    r: complex
    eps1: complex
    eps_chi: dict = field(repr=False)
    C: dict = field(repr=False)
    C_hat: np.ndarray = field(repr=False)
    S: np.ndarray = field(repr=False)

    @property
    def phi(self) -> int:
        return self.q - 1

    def unit_defect(self) -> float:
        """max over x prime to q of |S_q(x) - 1|."""
        return float(np.max(np.abs(self.S[1:] - 1)))

    def zero_defect(self) -> float:
        """|S_q(0) - conj(eps) (r / phi(q) + 1)|."""
        return float(abs(self.S[0] - np.conj(self.eps) * (self.r / self.phi + 1)))


def c_hat_table(q: int, C: dict, eps: complex, r: complex) -> np.ndarray:
    phi = q - 1
    out = np.zeros(q, dtype=complex)
    out[0] = np.conj(eps) * r / phi
    for chi in characters_mod(q):
        out[1:] += C[chi.label] * np.conj(chi.values[1:]) / phi
    return out


def compute_S_q(q: int, C_hat: np.ndarray) -> np.ndarray:
    """S_q(x) = sum_a C_hat(a) e((a-1)x/q) for x = 0..q-1."""
    S = np.zeros(q, dtype=complex)
    for x in range(q):
        S[x] = sum(C_hat[a] * root_of_unity((a - 1) * x, q) for a in range(q))
    return S


def reconstruct_C_hat(S: np.ndarray) -> np.ndarray:
    """Inverse transform: C_hat(a) = (1/q) sum_x S(x) e(-(a-1)x/q)."""
    q = len(S)
    return np.array([sum(S[x] * root_of_unity(-(a - 1) * x, q) for x in range(q)) / q for a in range(q)])


def c_hat_from_S0(S0: complex, q: int) -> np.ndarray:
    """C_hat(a + 1) = [a = 0] + (S(0) - 1)/q, valid once S = 1 on units."""
    out = np.full(q, (S0 - 1) / q, dtype=complex)
    out[1] += 1
    return out


def build_local_data(
    series: CoefficientSeries,
    q: int,
    root_numbers: dict | None = None,
    allow_any_prime: bool = False,
    strict: bool = True,
) -> LocalTwistData:
    """Assemble eps, r, C_chi, C_hat and S_q at q, estimating root numbers not supplied.

    ``root_numbers`` maps "untwisted" and character labels to values; pass
    synthetic ones to run negative controls.
    """
    N = series.level
    check_level_congruence(q, N, allow_any_prime)
    data = euler_factor_inverse(series, q, 2)
    lam, mu, eps, r = data.lam, data.mu, data.eps, data.r
    roots = dict(root_numbers or {})
    if "untwisted" not in roots:
        roots["untwisted"] = estimate_root_number(series).eps
    eps1 = roots["untwisted"]
    C = {}
    for chi in characters_mod(q):
        if chi.is_trivial:
            C[chi.label] = compute_C_chi(chi, eps1, None, N, eps, strict)
            continue
        if chi.label not in roots:
            roots[chi.label] = estimate_root_number(series, Twist.character(chi)).eps
        C[chi.label] = compute_C_chi(chi, eps1, roots[chi.label], N, eps, strict)
    C_hat = c_hat_table(q, C, eps, r)
    S = compute_S_q(q, C_hat)
    eps_chi = {k: v for k, v in roots.items() if k != "untwisted"}
    return LocalTwistData(q, lam, mu, eps, r, eps1, eps_chi, C, C_hat, S)


# the Ramanujan-sum functional equation ------------------------------------------------------------


@dataclass(frozen=True)
class RamanujanFEResult:
    residual_a: float
    residual_b: float
    root_number: complex
    r: complex


def verify_ramanujan_fe(
    series: CoefficientSeries,
    q: int,
    eps1: complex | None = None,
    mu_override: complex | None = None,
    s_direct: tuple[complex, ...] = (2.0, 2.0 + 1.0j),
    s_fe: tuple[complex, ...] = (0.5, 0.5 + 1.0j, 0.75),
    allow_any_prime: bool = False,
    precision_bits: int | None = None,
) -> RamanujanFEResult:
    """(a) Lambda_{c_q+r} = D_q Lambda_1 at s_direct, (b) Y-independence of Lambda_{c_q+r} with root eps eps1.

    Both residuals are relative to the summed term magnitudes.
    """
    check_level_congruence(q, series.level, allow_any_prime)
    data = euler_factor_inverse(series, q, 2)
    lam = data.lam
    mu = data.mu if mu_override is None else complex(mu_override)
    eps = classify_epsilon(lam, mu)
    r = 1 - eps * np.conj(mu)
    if eps1 is None:
        eps1 = estimate_root_number(series).eps
    tw = Twist.ramanujan(q, r)
    root = eps * eps1
    ctx_q = CompletedLContext.for_series(series, tw, precision_bits=precision_bits)
    ctx_1 = CompletedLContext.for_series(series, UNTWISTED, precision_bits=precision_bits)
    res_a = 0.0
    for s in s_direct:
        left = lambda_completed(series, tw, s, ctx_q, root)
        right = lambda_completed(series, UNTWISTED, s, ctx_1, eps1)
        D = dq_value(lam, mu, r, q, s)
        scale = max(left.scale, abs(D) * right.scale)
        res_a = max(res_a, abs(left.value - D * right.value) / scale)
    res_b = max(y_independence_sweep(series, tw, s, root, ctx_q).relative_residual for s in s_fe)
    return RamanujanFEResult(float(res_a), float(res_b), complex(root), complex(r))


# Lemma-type searches and invariance ---------------------------------------------------------------


def find_nonvanishing_residue(series: CoefficientSeries, q: int, a: int, bound: int) -> int | None:
    """Smallest n = a mod q, n <= bound, with |f_n| > 1e-12 n^((k-1)/2); None if there is none."""
    if math.gcd(a, q) != 1:
        raise ValueError(f"{a} is not prime to {q}")
    bound = min(bound, series.length)
    start = a % q or q
    for n in range(start, bound + 1, q):
        if abs(series.a[n]) > 1e-12:
            return n
    return None


def euler_inequivalence(s1: CoefficientSeries, s2: CoefficientSeries, bound: int) -> int | None:
    """First prime p <= bound where (lam_p, mu_p) differ by more than 1e-9; None if none does."""
    for p in primes_up_to(bound):
        if p * p > min(s1.length, s2.length):
            raise ValueError(f"series too short for p = {p}")
        d1 = euler_factor_inverse(s1, p, 2)
        d2 = euler_factor_inverse(s2, p, 2)
        if abs(d1.lam - d2.lam) > EULER_MATCH_TOL or abs(d1.mu - d2.mu) > EULER_MATCH_TOL:
            return p
    return None


def invariance_matrix(N: int, q: int, b: int) -> Mat2:
    """gamma_{q,b}; for b = 0 mod q the translation P^-b stands in (the m = 0 case)."""
    if b % q == 0:
        return P ** (-b)
    return gamma_q_b(N, q, b)


def verify_gamma_invariance(series: CoefficientSeries, q: int, b: int, allow_any_prime: bool = False) -> float:
    """Relative residual of f|gamma_{q,b} = f at well-conditioned points."""
    check_level_congruence(q, series.level, allow_any_prime)
    return check_modularity(series, invariance_matrix(series.level, q, b), 1.0)


def fourier_gamma_defect(series: CoefficientSeries, data: LocalTwistData, b: int, X: int | None = None) -> float:
    """max_n |(predicted n-th coefficient of f|gamma_{q,b}) - f_n| / max |f_n| for n <= X."""
    s = series if X is None else series.truncated(min(X, series.length))
    pred = fourier_coefficients_slash_gamma(s, data.q, b, data.S, data.r)
    n = np.arange(1, s.length + 1)
    # compare in the analytic normalisation so that every n weighs the same
    diff = np.abs(pred[1:] - s.f[1:]) * n ** (-(s.weight - 1) / 2)
    return float(np.max(diff))
