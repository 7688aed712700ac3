"""q-expansions on the upper half-plane, the weight-k slash action, and the
integer matrix identities behind the modularity relations.

Points carry their real part as a Fraction when possible so that e(nx) can be
reduced exactly modulo 1; this makes f(z + 1) = f(z) hold bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .arith import egcd, euler_phi, is_prime
from .characters import DirichletCharacter, gauss_sum, ramanujan_sum
from .coefficients import CoefficientSeries
from .incgamma import X_RANGE, upper_incomplete_gamma
from .summation import csum

TWO_PI = 2.0 * math.pi
RATIO_FLOOR = 1e-30


class InsufficientTruncation(ValueError):
    """The tail bound of a truncated q-expansion exceeds the requested precision."""

    def __init__(self, message: str, min_X: int | None = None):
        self.min_X = min_X
        hint = f" (need X >= {min_X})" if min_X else ""
        super().__init__(message + hint)


# matrices ------------------------------------------------------------------------


def _q(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class Mat2:
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, _q(getattr(self, name)))

    @classmethod
    def of(cls, rows: Sequence[Sequence]) -> Mat2:
        (a, b), (c, d) = rows
        return cls(a, b, c, d)

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> Fraction:
        return self.a + self.d

    def __matmul__(self, o: Mat2) -> Mat2:
        return Mat2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __pow__(self, e: int) -> Mat2:
        base = self if e >= 0 else self.inverse()
        out = IDENTITY
        for _ in range(abs(e)):
            out = out @ base
        return out

    def __neg__(self) -> Mat2:
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def scaled(self, s) -> Mat2:
        s = _q(s)
        return Mat2(s * self.a, s * self.b, s * self.c, s * self.d)

    def inverse(self) -> Mat2:
        D = self.det
        if D == 0:
            raise ZeroDivisionError("singular matrix")
        return Mat2(self.d / D, -self.b / D, -self.c / D, self.a / D)

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for v in (self.a, self.b, self.c, self.d))

    def rows(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        return ((self.a, self.b), (self.c, self.d))

    def normalized(self) -> tuple[Mat2, bool]:
        """Representative with positive trace (ties broken by c, then d); flag says whether it was negated.

        Since f|(-g) = (-1)^k f|g, callers multiply by (-1)^k when the flag is set.
        """
        key = (self.trace, self.c, self.d)
        for v in key:
            if v > 0:
                return self, False
            if v < 0:
                return -self, True
        return self, False

    def act(self, z: complex) -> complex:
        num = float(self.a) * z + float(self.b)
        den = float(self.c) * z + float(self.d)
        return num / den

    def __repr__(self) -> str:
        f = lambda v: str(v.numerator) if v.denominator == 1 else str(v)
        return f"[[{f(self.a)}, {f(self.b)}], [{f(self.c)}, {f(self.d)}]]"


IDENTITY = Mat2(1, 0, 0, 1)
P = Mat2(1, 1, 0, 1)


def H(N: int) -> Mat2:
    return Mat2(0, -1, N, 0)


def gamma_q_b(N: int, q: int, b: int, shift: int = 0) -> Mat2:
    """An element of Gamma_0(N) with top row (q, -b); ``shift`` picks another completion."""
    g, x, y = egcd(q, b * N)
    if g != 1:
        raise ValueError(f"no element of Gamma_0({N}) has top row ({q}, {-b})")
    # q x + b N y = 1, so [[q, -b], [N y, x]] has determinant 1
    d = x + b * N * shift
    m = y - q * shift
    return Mat2(q, -b, N * m, d)


def twist_gamma(N: int, q: int) -> Mat2:
    """[[q-1, -1], [Nq, -N]], the matrix relating f and its conjugate near the cusp 1/q."""
    return Mat2(q - 1, -1, N * q, -N)


def check_matrix_identity(N: int, M: int) -> bool:
    """Exact check of the H_N / P^M product identities for level N and q = MN + 1."""
    return all(matrix_identity_details(N, M).values())


def matrix_identity_details(N: int, M: int) -> dict[str, bool]:
    HN = H(N)
    q = M * N + 1
    prod = HN @ (P**M) @ HN
    lhs = P.inverse() @ prod
    out = {
        "H_N P^M H_N = [[-N, 0], [M N^2, -N]]": prod == Mat2(-N, 0, M * N * N, -N),
        "H_N^2 = -N I": HN @ HN == IDENTITY.scaled(-N),
        "H_N P^M H_N = -N [[1, 0], [-MN, 1]]": prod == Mat2(1, 0, -M * N, 1).scaled(-N),
        "P^-1 H_N P^M H_N = -N [[q, -1], [1-q, 1]]": lhs == Mat2(q, -1, 1 - q, 1).scaled(-N),
        "top row of P^-1 H_N P^M H_N is (q, -1) up to -N": (lhs.a / -N, lhs.b / -N) == (q, -1),
        "H_N P^-1 H_N P^M H_N = -N [[q-1, -1], [Nq, -N]]": HN @ lhs == twist_gamma(N, q).scaled(-N),
        "[[1, 0], [N, 1]] = H_N P^-1 H_N^-1": Mat2(1, 0, N, 1) == HN @ P.inverse() @ HN.inverse(),
    }
    return out


def check_top_row_lemma(N: int, q: int, b: int, completions: int = 3) -> bool:
    """Two elements of Gamma_0(N) with the same top row differ by a power of [[1,0],[N,1]]."""
    base = gamma_q_b(N, q, b)
    T = Mat2(1, 0, N, 1)
    for shift in range(1, completions + 1):
        other = gamma_q_b(N, q, b, shift)
        if other.a != q or other.b != -b or other.det != 1 or other.c % N != 0:
            return False
        quotient = other @ base.inverse()
        if not quotient.is_integral() or quotient.a != 1 or quotient.b != 0 or quotient.d != 1:
            return False
        if quotient.c % N != 0 or quotient != T ** int(quotient.c / N):
            return False
    return True


# points ----------------------------------------------------------------------------


@dataclass(frozen=True)
class UpperHalfPoint:
    x: Fraction | float
    y: float

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError(f"Im(z) = {self.y} is not positive")

    @classmethod
    def of(cls, z) -> UpperHalfPoint:
        if isinstance(z, UpperHalfPoint):
            return z
        z = complex(z)
        return cls(z.real, z.imag)

    @property
    def z(self) -> complex:
        return complex(float(self.x), self.y)

    def shifted(self, t) -> UpperHalfPoint:
        return UpperHalfPoint(self.x + t, self.y)


def default_points(q: int, N: int) -> list[UpperHalfPoint]:
    y = 1.0 / (q * math.sqrt(N))
    return [UpperHalfPoint(Fraction(0), y), UpperHalfPoint(Fraction(1, q), y), UpperHalfPoint(Fraction(1, 3), y)]


def balanced_points(
    gamma: Mat2, count: int = 3, series: CoefficientSeries | None = None, candidates: int = 15
) -> list[UpperHalfPoint]:
    """Points on the isometric circle |cz + d| = sqrt(det), where Im(gamma z) = Im(z).

    Without ``series`` the angles are evenly spaced in (0, pi). With it, the
    ``count`` best-conditioned of ``candidates`` angles are kept (largest
    |f(z)| / sum |f_n e(nz)|), since near-cancelling points lose digits.
    """
    if gamma.c == 0:
        y = 1.0 / math.sqrt(float(gamma.det))
        return [UpperHalfPoint(Fraction(j, count + 1), y) for j in range(count)]
    center = -float(gamma.d) / float(gamma.c)
    radius = math.sqrt(float(gamma.det)) / abs(float(gamma.c))

    def on_circle(t: float) -> UpperHalfPoint:
        return UpperHalfPoint(center + radius * math.cos(t), radius * math.sin(t))

    if series is None:
        return [on_circle(math.pi * (j + 1) / (count + 1)) for j in range(count)]
    thetas = [math.pi * (0.15 + 0.7 * j / (candidates - 1)) for j in range(candidates)]
    scored = sorted(thetas, key=lambda t: -conditioning(series, on_circle(t)))
    return [on_circle(t) for t in sorted(scored[:count])]


def conditioning(series: CoefficientSeries, z) -> float:
    """|f(z)| / sum |f_n e(nz)|; near 1 means little cancellation in the q-expansion."""
    pt = UpperHalfPoint.of(z)
    X = min(series.length, _useful_terms(series.growth_constant, series.weight, pt.y))
    n = np.arange(1, X + 1)
    mags = np.abs(series.f[1 : X + 1]) * np.exp(-TWO_PI * n * pt.y)
    value, _ = eval_form(series, pt, terms=X)
    total = math.fsum(mags)
    return abs(value) / total if total > 0 else 0.0


# evaluation --------------------------------------------------------------------------


def tail_bound(C: float, weight: int, y: float, X: int) -> float:
    """Bound for sum_{n>X} C d(n) n^((k-1)/2) e^(-2 pi n y), using d(n) <= n.

    With g(t) = C t^a e^(-bt), a = (k+1)/2, b = 2 pi y, the sum is at most
    int_X^oo g + max_{t >= X} g; the result is doubled for safety.
    """
    a = (weight + 1) / 2
    b = TWO_PI * y
    x = b * X
    if x < X_RANGE[0]:
        return math.inf
    peak_t = max(X, a / b)
    log_peak = math.log(C) + a * math.log(peak_t) - b * peak_t
    if x <= X_RANGE[1]:
        g = upper_incomplete_gamma(a + 1, x).real
        integral = C * b ** (-a - 1) * g
    elif x > 2 * (a + 1):
        # Gamma(a+1, x) <= x^a e^-x x / (x - a) for x > a
        log_int = math.log(C) - (a + 1) * math.log(b) + a * math.log(x) - x + math.log(x / (x - a))
        integral = math.exp(log_int) if log_int > -745 else 0.0
    else:
        integral = math.inf
    peak = math.exp(log_peak) if log_peak > -745 else 0.0
    return 2.0 * (integral + peak)


def min_truncation(C: float, weight: int, y: float, target: float, cap: int = 10**9) -> int:
    """Smallest X whose tail bound is at most ``target`` (capped)."""
    hi = 1
    while tail_bound(C, weight, y, hi) > target:
        hi *= 2
        if hi > cap:
            return cap
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_bound(C, weight, y, mid) > target:
            lo = mid
        else:
            hi = mid
    return hi


def _phases(n: np.ndarray, x) -> np.ndarray:
    """2 pi (n x mod 1), exact reduction when x is a Fraction with a small denominator."""
    if isinstance(x, Fraction) and x.denominator < 2**31 and n[-1] < 2**31:
        num = (n * (x.numerator % x.denominator)) % x.denominator
        return TWO_PI * num / x.denominator
    x = float(x)
    return TWO_PI * np.mod(n * (x - math.floor(x)), 1.0)


def _useful_terms(C: float, weight: int, y: float) -> int:
    # beyond this n every term is below 1e-320 and contributes nothing in double precision
    a = (weight - 1) / 2 + 1
    b = TWO_PI * y
    n = 745.0 / b
    for _ in range(3):
        n = (745.0 + max(math.log(C), 0.0) + a * math.log(max(n, 1.0))) / b
    return int(n) + 1


def eval_form(
    series: CoefficientSeries,
    z,
    conjugated: bool = False,
    rtol: float | None = None,
    atol: float = 0.0,
    terms: int | None = None,
) -> tuple[complex, float]:
    """Truncated sum f(z) = sum_{n<=X} f_n e(nz) and a rigorous bound on the omitted tail.

    ``conjugated`` uses conj(f_n). With ``rtol`` set, a tail above
    ``atol + rtol |value|`` raises InsufficientTruncation carrying the minimal X.
    """
    pt = UpperHalfPoint.of(z)
    X = series.length if terms is None else min(terms, series.length)
    C = series.growth_constant
    X_eff = min(X, _useful_terms(C, series.weight, pt.y))
    n = np.arange(1, X_eff + 1)
    coeff = series.f[1 : X_eff + 1]
    if conjugated:
        coeff = np.conj(coeff)
    weights = np.exp(1j * _phases(n, pt.x) - TWO_PI * n * pt.y)
    value = csum(coeff * weights)
    tail = tail_bound(C, series.weight, pt.y, X)
    if rtol is not None:
        allowed = atol + rtol * abs(value)
        if tail > allowed:
            need = min_truncation(C, series.weight, pt.y, max(allowed, 1e-300))
            raise InsufficientTruncation(
                f"tail bound {tail:.3g} at Im z = {pt.y:.3g} exceeds {allowed:.3g} with X = {X}", need
            )
    return value, tail


def slash_eval(
    series: CoefficientSeries,
    gamma: Mat2,
    z,
    k: int | None = None,
    conjugated: bool = False,
    rtol: float | None = None,
    atol: float = 0.0,
) -> complex:
    """(f|gamma)(z) = det^(k/2) (cz+d)^(-k) f(gamma z); k is an integer so no branch arises."""
    k = series.weight if k is None else k
    if gamma.det <= 0:
        raise ValueError("slash action needs positive determinant")
    pt = UpperHalfPoint.of(z)
    zc = pt.z
    gz = gamma.act(zc)
    if gz.imag <= 0:
        raise ValueError(f"gamma z = {gz} is not in the upper half-plane")
    value, _ = eval_form(series, UpperHalfPoint.of(gz), conjugated, rtol=rtol, atol=atol)
    factor = float(gamma.det) ** (k / 2) * (float(gamma.c) * zc + float(gamma.d)) ** (-k)
    return factor * value


@dataclass(frozen=True)
class PhaseEstimate:
    omega: complex
    spread: float
    unimodularity_defect: float
    points_used: int
    skipped: tuple[int, ...] = ()


def _ratios(series, gamma, k, points, conjugated_left, conjugated_right, rtol):
    lefts, rights = [], []
    for pt in points:
        lefts.append(slash_eval(series, gamma, pt, k, conjugated_left, rtol=rtol))
        rights.append(eval_form(series, pt, conjugated_right, rtol=rtol)[0])
    return np.array(lefts), np.array(rights)


def estimate_phase(
    series: CoefficientSeries,
    gamma: Mat2,
    k: int | None = None,
    points: Iterable | None = None,
    conjugated_left: bool = False,
    conjugated_right: bool = False,
    rtol: float | None = 1e-12,
    skip_ratio: float = 1e-8,
) -> PhaseEstimate:
    """omega with (g|gamma) = omega h at the given points, g and h being f or its conjugate."""
    pts = list(points) if points is not None else balanced_points(gamma, series=series)
    if len(pts) < 2:
        raise ValueError("need at least two points")
    lefts, rights = _ratios(series, gamma, k, pts, conjugated_left, conjugated_right, rtol)
    scale = float(np.max(np.abs(rights)))
    keep = [i for i in range(len(pts)) if abs(rights[i]) > skip_ratio * scale and scale > 0]
    skipped = tuple(i for i in range(len(pts)) if i not in keep)
    if not keep:
        raise ValueError("every evaluation point has a vanishing denominator")
    ratios = lefts[keep] / rights[keep]
    omega = complex(ratios[0])
    spread = float(np.max(np.abs(ratios - omega)))
    return PhaseEstimate(omega, spread, abs(abs(omega) - 1.0), len(keep), skipped)


def check_modularity(
    series: CoefficientSeries,
    gamma: Mat2,
    omega: complex,
    k: int | None = None,
    points: Iterable | None = None,
    conjugated_left: bool = False,
    conjugated_right: bool = False,
    rtol: float | None = 1e-12,
) -> float:
    """max over points of |g|gamma - omega h| / max(|h|, 1e-30)."""
    if abs(abs(omega) - 1) > 1e-6:
        raise ValueError(f"|omega| = {abs(omega)} is not 1")
    pts = list(points) if points is not None else balanced_points(gamma, series=series)
    lefts, rights = _ratios(series, gamma, k, pts, conjugated_left, conjugated_right, rtol)
    res = np.abs(lefts - omega * rights) / np.maximum(np.abs(rights), RATIO_FLOOR)
    return float(np.max(res))


# twisted forms ----------------------------------------------------------------------


def ramanujan_weights(q: int, X: int) -> np.ndarray:
    """c_q(n) for n = 0..X (periodic in n mod q)."""
    table = np.array([ramanujan_sum(q, a) for a in range(q)], dtype=float)
    return np.tile(table, X // q + 1)[: X + 1]


def twisted_coeffs(
    series: CoefficientSeries,
    q: int,
    chi: DirichletCharacter | None = None,
    r: complex = 0.0,
    allow_any_prime: bool = False,
) -> CoefficientSeries:
    """Fourier coefficients of f_chi: f_n tau(chi_bar) chi(n), or f_n (c_q(n) + r) for trivial chi.

    The result is returned through its raw coefficients with level N q^2.
    """
    N = series.level
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if N % q == 0:
        raise ValueError(f"q = {q} divides the level {N}")
    if not allow_any_prime and q % N != 1 % N:
        raise ValueError(f"q = {q} is not 1 mod N = {N}")
    X = series.length
    if chi is None or chi.is_trivial:
        w = ramanujan_weights(q, X) + r
        provenance = f"{series.provenance} twisted by c_{q} + {r}"
    else:
        if chi.modulus != q:
            raise ValueError("character modulus must equal q")
        w = gauss_sum(chi.conj()) * chi.values_upto(X)
        provenance = f"{series.provenance} twisted by {chi!r}"
    f = series.f * w
    f[0] = 0
    return CoefficientSeries.from_raw(
        f,
        N * q * q,
        series.weight,
        provenance=provenance,
        growth_constant=series.growth_constant * float(np.max(np.abs(w[1:]))),
    )


def fourier_coefficients_slash_gamma(
    series: CoefficientSeries, q: int, b: int, S: np.ndarray, r: complex
) -> np.ndarray:
    """Predicted coefficients of f|gamma_{q,b}: f_n S_q(bn) - conj(r)/phi(q) q^k [q^2 | n] f_{n/q^2}."""
    X = series.length
    n = np.arange(X + 1)
    out = series.f * np.asarray(S)[(b * n) % q]
    k = series.weight
    idx = np.arange(q * q, X + 1, q * q)
    out[idx] -= np.conj(r) / euler_phi(q) * q**k * series.f[idx // (q * q)]
    out[0] = 0
    return out
