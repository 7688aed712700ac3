"""Completed L-values by split Mellin integrals.

For coefficients b_n = a_n w_n (w_n = chi(n) or c_q(n) + r) of a weight-k
series whose completed L-function has conductor L = N q^2, write
s' = s + (k-1)/2. Splitting the Mellin integral of the theta series at Y and
folding the lower half with the modular relation gives

    Lambda(s) = 2 [ U(s, Y) + eps * B(s, Y) ]
    U = (2 pi)^(-s') sum b_n n^(-s) Gamma(s', 2 pi n Y)
    B = L^(k/2 - s') (2 pi)^(s' - k) sum conj(b_n) n^(s-1) Gamma(k - s', 2 pi n / (L Y))

where eps is the root number. Independence of Y is the numerical content of
the functional equation, and two split points determine eps.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath
import numpy as np

from .arith import is_prime
from .characters import DirichletCharacter, characters_mod, fourier_expansion_of_e, gauss_sum
from .coefficients import CoefficientSeries, euler_factor_inverse
from .incgamma import X_RANGE, upper_incomplete_gamma
from .qexp import InsufficientTruncation, ramanujan_weights, twist_gamma, estimate_phase
from .summation import abs_sum, csum

TWO_PI = 2.0 * math.pi
DEFAULT_SAMPLES = (0.5, 0.75 + 0.5j, 1.25)
# asymmetric about Y0 = 1/sqrt(L): a pair swapped by Y -> 1/(LY) is degenerate at s = 1/2
ESTIMATE_SPLIT_FACTORS = (0.55, 1.35)


class FunctionalEquationViolated(ArithmeticError):
    pass


# twists -------------------------------------------------------------------------------


@dataclass(frozen=True)
class Twist:
    """Coefficient weights w_n and the modulus q they add to the conductor.

    kind is "none", "character" or "ramanujan" (w_n = c_q(n) + r).
    """

    kind: str = "none"
    q: int = 1
    chi: DirichletCharacter | None = None
    r: complex = 0.0

    @classmethod
    def character(cls, chi: DirichletCharacter) -> Twist:
        if chi.is_trivial and chi.modulus == 1:
            return cls()
        return cls("character", chi.modulus, chi)

    @classmethod
    def ramanujan(cls, q: int, r: complex = 0.0) -> Twist:
        return cls("ramanujan", q, None, complex(r))

    def weights(self, X: int) -> np.ndarray:
        if self.kind == "none":
            w = np.ones(X + 1, dtype=complex)
        elif self.kind == "character":
            w = self.chi.values_upto(X).astype(complex)
        else:
            w = ramanujan_weights(self.q, X) + self.r
        w[0] = 0
        return w

    def label(self) -> str:
        if self.kind == "none":
            return "untwisted"
        if self.kind == "character":
            return f"chi mod {self.q} {self.chi.label}"
        return f"c_{self.q} + {self.r:.3g}"


UNTWISTED = Twist()


# context and results ----------------------------------------------------------------------


@dataclass(frozen=True)
class CompletedLContext:
    level: int
    weight: int
    q: int = 1
    Y: float | None = None
    X: int | None = None
    tol: float = 1e-9
    precision_bits: int | None = None

    def __post_init__(self):
        if self.Y is not None and not self.Y > 0:
            raise ValueError("split point must be positive")
        if not self.tol > 0:
            raise ValueError("precision target must be positive")
        if self.X is not None and self.X < 1:
            raise ValueError("truncation must be at least 1")

    @property
    def conductor(self) -> int:
        return self.level * self.q * self.q

    @property
    def split(self) -> float:
        return self.Y if self.Y is not None else 1.0 / math.sqrt(self.conductor)

    @classmethod
    def for_series(cls, series: CoefficientSeries, twist: Twist = UNTWISTED, **kw) -> CompletedLContext:
        return cls(series.level, series.weight, twist.q, **kw)


@dataclass(frozen=True)
class LValueResult:
    value: complex
    error_estimate: float
    split_point_used: float
    terms_used: int
    scale: float = 0.0


@dataclass(frozen=True)
class _Pieces:
    U: complex
    B: complex
    tail_U: float
    tail_B: float
    scale_U: float
    scale_B: float
    terms: int


def gamma_C(s: complex) -> complex:
    """Gamma_C(s) = 2 (2 pi)^-s Gamma(s)."""
    with mpmath.workprec(80):
        return complex(2 * mpmath.power(2 * mpmath.pi, -mpmath.mpc(s)) * mpmath.gamma(mpmath.mpc(s)))


def _tail(C: float, W: float, sigma: float, shift: float, sp: float, b: float, X: int) -> float:
    """Bound on sum_{n>X} C W n * n^shift |Gamma(sp, b n)| using d(n) <= n and |Gamma(s,x)| <= Gamma(Re s, x)."""
    if b * (X + 1) > X_RANGE[1]:
        return 0.0
    n_hi = int(X_RANGE[1] / b)
    n = np.arange(X + 1, n_hi + 1, dtype=float)
    if n.size == 0:
        return 0.0
    g = upper_incomplete_gamma(sp, b * n).real
    terms = C * W * n ** (1.0 + shift) * np.abs(g)
    # past x = 300 the terms fall by at least e^-b per step
    rest = terms[-1] * math.exp(-b) / (1 - math.exp(-b)) if b > 0 else math.inf
    return float(np.sum(terms)) + rest


def _pieces(series: CoefficientSeries, twist: Twist, s: complex, Y: float, X: int) -> _Pieces:
    k = series.weight
    L = series.level * twist.q**2
    sp = s + (k - 1) / 2
    sm = k - sp
    bY = TWO_PI * Y
    bM = TWO_PI / (L * Y)
    nU = min(X, int(X_RANGE[1] / bY))
    nM = min(X, int(X_RANGE[1] / bM))
    w = twist.weights(max(nU, nM))
    b = series.a[: max(nU, nM) + 1] * w
    n = np.arange(1, nU + 1, dtype=float)
    termsU = b[1 : nU + 1] * np.exp(-s * np.log(n)) * upper_incomplete_gamma(sp, bY * n)
    termsU *= cmath.exp(-sp * math.log(TWO_PI))
    n = np.arange(1, nM + 1, dtype=float)
    termsB = np.conj(b[1 : nM + 1]) * np.exp((s - 1) * np.log(n)) * upper_incomplete_gamma(sm, bM * n)
    termsB *= cmath.exp((k / 2 - sp) * math.log(L) + (sp - k) * math.log(TWO_PI))
    C = series.growth_constant
    W = float(np.max(np.abs(w[1:]))) if len(w) > 1 else 1.0
    sigma = complex(s).real
    tU = abs(cmath.exp(-sp * math.log(TWO_PI))) * _tail(C, W, sigma, -sigma, sp.real, bY, X)
    tB = abs(cmath.exp((k / 2 - sp) * math.log(L) + (sp - k) * math.log(TWO_PI))) * _tail(
        C, W, sigma, sigma - 1, sm.real, bM, X
    )
    return _Pieces(csum(termsU), csum(termsB), tU, tB, abs_sum(termsU), abs_sum(termsB), max(nU, nM))


def _pieces_mp(series: CoefficientSeries, twist: Twist, s: complex, Y: float, X: int, prec: int) -> _Pieces:
    k = series.weight
    L = series.level * twist.q**2
    w = twist.weights(X)
    with mpmath.workprec(prec):
        s_ = mpmath.mpc(s)
        sp = s_ + mpmath.mpf(k - 1) / 2
        sm = k - sp
        twopi = 2 * mpmath.pi
        bY = twopi * mpmath.mpf(Y)
        bM = twopi / (L * mpmath.mpf(Y))
        U = mpmath.mpc(0)
        B = mpmath.mpc(0)
        sU = sB = mpmath.mpf(0)
        for n in range(1, X + 1):
            bn = mpmath.mpc(complex(series.a[n] * w[n]))
            if bn == 0:
                continue
            tU = bn * mpmath.power(n, -s_) * mpmath.gammainc(sp, bY * n)
            tB = mpmath.conj(bn) * mpmath.power(n, s_ - 1) * mpmath.gammainc(sm, bM * n)
            U += tU
            B += tB
            sU += abs(tU)
            sB += abs(tB)
        fU = mpmath.power(twopi, -sp)
        fB = mpmath.power(L, mpmath.mpf(k) / 2 - sp) * mpmath.power(twopi, sp - k)
        return _Pieces(
            complex(U * fU), complex(B * fB), 0.0, 0.0, float(sU * abs(fU)), float(sB * abs(fB)), X
        )


def _choose_X(series: CoefficientSeries, twist: Twist, s: complex, Y: float, tol: float) -> int:
    L = series.level * twist.q**2
    slow = min(Y, 1.0 / (L * Y))
    X = max(8, int(math.ceil(40.0 / (TWO_PI * slow))))
    while True:
        X = min(X, series.length)
        p = _pieces(series, twist, s, Y, X)
        if p.tail_U + p.tail_B <= 1e-3 * tol * max(p.scale_U + p.scale_B, 1e-300) or X == series.length:
            return X
        X *= 2


def split_pieces(
    series: CoefficientSeries, twist: Twist, s: complex, ctx: CompletedLContext, Y: float | None = None
) -> _Pieces:
    Y = ctx.split if Y is None else Y
    X = ctx.X if ctx.X is not None else _choose_X(series, twist, s, Y, ctx.tol)
    X = min(X, series.length)
    if ctx.precision_bits:
        p = _pieces(series, twist, s, Y, X)
        exact = _pieces_mp(series, twist, s, Y, p.terms, ctx.precision_bits)
        return _Pieces(exact.U, exact.B, p.tail_U, p.tail_B, exact.scale_U, exact.scale_B, p.terms)
    return _pieces(series, twist, s, Y, X)


def lambda_completed(
    series: CoefficientSeries,
    twist: Twist,
    s: complex,
    ctx: CompletedLContext | None = None,
    root_number: complex | None = None,
    Y: float | None = None,
) -> LValueResult:
    """Lambda(s) for the twisted coefficients, given the root number of its functional equation."""
    if root_number is None:
        raise ValueError("root number required (estimate it with estimate_root_number)")
    ctx = ctx or CompletedLContext.for_series(series, twist)
    Yused = ctx.split if Y is None else Y
    p = split_pieces(series, twist, s, ctx, Yused)
    value = 2 * (p.U + root_number * p.B)
    scale = 2 * (p.scale_U + abs(root_number) * p.scale_B)
    err = 2 * (p.tail_U + abs(root_number) * p.tail_B) + 64 * np.finfo(float).eps * scale
    if p.tail_U + p.tail_B > ctx.tol * max(scale, 1e-300):
        raise InsufficientTruncation(
            f"L-value tail {p.tail_U + p.tail_B:.3g} above target with X = {p.terms}", 2 * p.terms
        )
    return LValueResult(complex(value), float(err), float(Yused), p.terms, float(scale))


# root numbers ----------------------------------------------------------------------------


@dataclass(frozen=True)
class RootNumberEstimate:
    eps: complex
    spread: float
    unimodularity_defect: float
    samples: tuple[complex, ...]
    per_sample: tuple[complex, ...]
    violated: bool = False


def root_number_at(
    series: CoefficientSeries, twist: Twist, s: complex, ctx: CompletedLContext | None = None
) -> complex:
    """The unique eps making U + eps B agree at two split points around the default one."""
    ctx = ctx or CompletedLContext.for_series(series, twist)
    Y0 = ctx.split
    p1 = split_pieces(series, twist, s, ctx, Y0 * ESTIMATE_SPLIT_FACTORS[0])
    p2 = split_pieces(series, twist, s, ctx, Y0 * ESTIMATE_SPLIT_FACTORS[1])
    den = p2.B - p1.B
    if abs(den) <= 1e-14 * max(p1.scale_B, p2.scale_B, 1e-300):
        raise FunctionalEquationViolated(f"split-point system is degenerate at s = {s}")
    return complex((p1.U - p2.U) / den)


def estimate_root_number(
    series: CoefficientSeries,
    twist: Twist = UNTWISTED,
    ctx: CompletedLContext | None = None,
    s_samples: Sequence[complex] = DEFAULT_SAMPLES,
    strict: bool = False,
) -> RootNumberEstimate:
    """Root number from the Y-splitting condition at several s; spread is the largest pairwise gap."""
    if len(s_samples) < 3:
        raise ValueError("need at least three sample points")
    ctx = ctx or CompletedLContext.for_series(series, twist)
    per = [root_number_at(series, twist, s, ctx) for s in s_samples]
    eps = complex(np.mean(per))
    spread = max(abs(a - b) for a in per for b in per)
    defect = abs(abs(eps) - 1)
    violated = defect > spread + ctx.tol
    if violated and strict:
        raise FunctionalEquationViolated(
            f"root number {eps:.6g} has | |eps| - 1 | = {defect:.3g} beyond spread {spread:.3g}"
        )
    return RootNumberEstimate(eps, float(spread), float(defect), tuple(s_samples), tuple(per), violated)


@dataclass(frozen=True)
class YIndependence:
    value_Y: complex
    value_2Y: complex
    residual: float
    relative_residual: float
    error_estimate: float
    scale: float


def y_independence(
    series: CoefficientSeries,
    twist: Twist,
    s: complex,
    root_number: complex,
    ctx: CompletedLContext | None = None,
    Y: float | None = None,
) -> YIndependence:
    """|Lambda(s; Y) - Lambda(s; 2Y)|, absolute and relative to the summed term magnitudes."""
    ctx = ctx or CompletedLContext.for_series(series, twist)
    Y = ctx.split if Y is None else Y
    r1 = lambda_completed(series, twist, s, ctx, root_number, Y)
    r2 = lambda_completed(series, twist, s, ctx, root_number, 2 * Y)
    diff = abs(r1.value - r2.value)
    scale = max(r1.scale, r2.scale)
    return YIndependence(
        r1.value, r2.value, diff, diff / scale, r1.error_estimate + r2.error_estimate, scale
    )


Y_SWEEP = (1.0, 2.0, 4.0)


def y_independence_sweep(
    series: CoefficientSeries,
    twist: Twist,
    s: complex,
    root_number: complex,
    ctx: CompletedLContext | None = None,
    factors: tuple[float, ...] = Y_SWEEP,
) -> YIndependence:
    """Worst y_independence over split points Y0 * factor.

    Near Y0 the theta mass is weighted by small powers of y, so a wrong
    local factor can hide there; larger Y exposes it.
    """
    ctx = ctx or CompletedLContext.for_series(series, twist)
    runs = [y_independence(series, twist, s, root_number, ctx, ctx.split * f) for f in factors]
    return max(runs, key=lambda r: r.relative_residual)


# additive twists ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdditiveTwistResult:
    value: complex
    tail_bound: float
    terms_used: int


def dirichlet_tail_bound(C: float, sigma: float, X: int) -> float:
    """sum_{n>X} C d(n) n^-sigma <= C sigma X^(1-sigma) [(log X + 1)/(sigma-1) + 1/(sigma-1)^2]."""
    if sigma <= 1:
        return math.inf
    g = sigma - 1
    return C * sigma * X ** (-g) * ((math.log(X) + 1) / g + 1 / g**2)


def min_admissible_sigma(C: float, X: int, tol: float) -> float:
    lo, hi = 1.0 + 1e-9, 60.0
    for _ in range(100):
        mid = (lo + hi) / 2
        if dirichlet_tail_bound(C, mid, X) > tol:
            lo = mid
        else:
            hi = mid
    return hi


def additive_twist_value(
    series: CoefficientSeries, a: int, q: int, s: complex, X: int | None = None, tol: float | None = 1e-9
) -> AdditiveTwistResult:
    """F(s, a/q) = sum_{n<=X} a_n n^-s e(na/q) with a bound on the omitted tail.

    With ``tol`` set, a real part of s too small for that bound raises
    ValueError naming the smallest admissible Re(s).
    """
    X = series.length if X is None else min(X, series.length)
    s = complex(s)
    bound = dirichlet_tail_bound(series.growth_constant, s.real, X)
    if tol is not None and bound > tol:
        need = min_admissible_sigma(series.growth_constant, X, tol)
        raise ValueError(f"Re(s) = {s.real} too small for tolerance {tol} at X = {X}; need Re(s) >= {need:.4f}")
    n = np.arange(1, X + 1)
    phase = np.exp(1j * TWO_PI * ((n * (a % q)) % q) / q)
    value = csum(series.a[1 : X + 1] * np.exp(-s * np.log(n)) * phase)
    return AdditiveTwistResult(value, bound, X)


def additive_twist_mellin(
    series: CoefficientSeries,
    q: int,
    s: complex,
    omega: complex | None = None,
    y0: float | None = None,
    tol: float = 1e-12,
) -> LValueResult:
    """F(s, 1/q) from the Mellin integral of f(1/q + iy), split at y0.

    Below y0 the relation conj(f)|[[q-1, -1], [Nq, -N]] = omega f moves the
    integrand to the cusp at infinity; omega is estimated when not supplied.
    Needs q = 1 mod N so that the matrix lies in Gamma_0(N) up to scaling.
    """
    N, k = series.level, series.weight
    if (q - 1) % N:
        raise ValueError(f"q = {q} is not 1 mod N = {N}")
    if omega is None:
        omega = estimate_phase(series, twist_gamma(N, q), conjugated_left=True).omega
    s = complex(s)
    sp = s + (k - 1) / 2
    sm = k - sp
    Lq = N * q * q
    y0 = 1.0 / (q * math.sqrt(N)) if y0 is None else y0
    bU = TWO_PI * y0
    bM = TWO_PI / (Lq * y0)
    X = series.length
    nU = min(X, int(X_RANGE[1] / bU))
    nM = min(X, int(X_RANGE[1] / bM))
    f = series.f
    n = np.arange(1, nU + 1, dtype=float)
    ph = np.exp(1j * TWO_PI * (np.arange(1, nU + 1) % q) / q)
    termsU = f[1 : nU + 1] * ph * np.exp(-sp * np.log(TWO_PI * n)) * upper_incomplete_gamma(sp, bU * n)
    n = np.arange(1, nM + 1, dtype=float)
    step = (q - 1) // N  # e(n (q-1)/(Nq)) = e(n step / q)
    ph = np.exp(1j * TWO_PI * ((np.arange(1, nM + 1) * step) % q) / q)
    termsM = np.conj(f[1 : nM + 1]) * ph * np.exp(-sm * np.log(TWO_PI * n)) * upper_incomplete_gamma(sm, bM * n)
    factor = np.conj(omega) * N ** (-k / 2) * (1j * q) ** (-k) * cmath.exp(sm * math.log(Lq))
    with mpmath.workprec(80):
        norm = complex(mpmath.power(2 * mpmath.pi, -mpmath.mpc(sp)) * mpmath.gamma(mpmath.mpc(sp)))
    total = csum(termsU) + factor * csum(termsM)
    scale = (abs_sum(termsU) + abs(factor) * abs_sum(termsM)) / abs(norm)
    C = series.growth_constant
    tail = _tail(C, 1.0, 0.0, (k - 1) / 2 - sp.real, sp.real, bU, nU) * math.exp(-sp.real * math.log(TWO_PI))
    tail += abs(factor) * _tail(C, 1.0, 0.0, (k - 1) / 2 - sm.real, sm.real, bM, nM) * math.exp(
        -sm.real * math.log(TWO_PI)
    )
    err = tail / abs(norm) + 64 * np.finfo(float).eps * scale
    if nU == X or nM == X:
        if tail / abs(norm) > tol * max(scale, 1e-300):
            raise InsufficientTruncation(f"additive twist tail {tail:.3g} too large", 2 * X)
    return LValueResult(complex(total / norm), float(err), float(y0), max(nU, nM), float(scale))


# the additive/multiplicative twist identity ---------------------------------------------------


@dataclass(frozen=True)
class TwistIdentityResult:
    analytic_residual: float
    truncated_residual: float
    coefficient_defect: float
    additive: complex
    rhs: complex
    root_numbers: dict = field(default_factory=dict)


def coefficient_defect(series: CoefficientSeries, q: int, X: int | None = None) -> float:
    """max_n |a_n| |e(n/q) - (Fourier expansion over characters mod q at n)| for n <= X."""
    X = series.length if X is None else min(X, series.length)
    table = np.array([fourier_expansion_of_e(q, a) for a in range(q)])
    exact = np.exp(1j * TWO_PI * np.arange(q) / q)
    n = np.arange(1, X + 1)
    a = series.a[1 : X + 1]
    return float(np.max(np.abs(a * exact[n % q] - a * table[n % q])))


def local_factor_coefficients(series: CoefficientSeries, q: int) -> tuple[complex, complex]:
    """(lam, mu) at q from the degree-two part of the formal inverse."""
    data = euler_factor_inverse(series, q, 2)
    return data.lam, data.mu


def _euler_removed(a: np.ndarray, q: int, lam: complex, mu: complex) -> np.ndarray:
    """Coefficients of L_f(s) (1 - lam q^-s + mu q^-2s) by convolution."""
    m = a.copy()
    m[q::q] -= lam * a[1 : len(a[q::q]) + 1]
    qq = q * q
    m[qq::qq] += mu * a[1 : len(a[qq::qq]) + 1]
    return m


def verify_twist_identity(
    series: CoefficientSeries,
    q: int,
    s: complex,
    X: int | None = None,
    root_numbers: dict | None = None,
    tol: float = 1e-12,
) -> TwistIdentityResult:
    """Residuals of F(s,1/q) = L_f - q/(q-1) L_f/F_q + 1/(q-1) sum_{chi != chi0} tau(chi_bar) F(s, chi).

    analytic_residual uses completed values (Mellin for F(s,1/q), split
    integrals with estimated root numbers for L_f and F(s, chi));
    truncated_residual compares the same Dirichlet polynomials of length X
    on both sides; coefficient_defect is the termwise Fourier identity.
    """
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if series.level % q == 0:
        raise ValueError(f"q = {q} divides the level")
    s = complex(s)
    k = series.weight
    lam, mu = local_factor_coefficients(series, q)
    chars = characters_mod(q)[1:]
    taus = {chi.label: gauss_sum(chi.conj()) for chi in chars}
    roots = dict(root_numbers or {})

    # common-truncation Dirichlet polynomials
    Xc = series.length if X is None else min(X, series.length)
    a = series.a[: Xc + 1]
    n = np.arange(1, Xc + 1)
    ns = np.exp(-s * np.log(n))
    lhs_t = csum(a[1:] * ns * np.exp(1j * TWO_PI * (n % q) / q))
    L_t = csum(a[1:] * ns)
    M_t = csum(_euler_removed(a, q, lam, mu)[1:] * ns)
    chi_t = sum(taus[c.label] * csum(a[1:] * c.values_upto(Xc)[1:] * ns) for c in chars)
    rhs_t = L_t - q / (q - 1) * M_t + chi_t / (q - 1)
    truncated = abs(lhs_t - rhs_t)

    # completed values
    sp = s + (k - 1) / 2
    gc = gamma_C(sp)
    if "untwisted" not in roots:
        roots["untwisted"] = estimate_root_number(series).eps
    ctx1 = CompletedLContext.for_series(series, tol=tol)
    Lf = lambda_completed(series, UNTWISTED, s, ctx1, roots["untwisted"]).value / gc
    Fq_inv = 1 - lam * q ** (-s) + mu * q ** (-2 * s)
    total_chi = 0j
    for chi in chars:
        tw = Twist.character(chi)
        if chi.label not in roots:
            roots[chi.label] = estimate_root_number(series, tw).eps
        ctx = CompletedLContext.for_series(series, tw, tol=tol)
        total_chi += taus[chi.label] * lambda_completed(series, tw, s, ctx, roots[chi.label]).value / gc
    rhs = Lf - q / (q - 1) * Lf * Fq_inv + total_chi / (q - 1)
    additive = additive_twist_mellin(series, q, s).value if (q - 1) % series.level == 0 else math.nan
    analytic = abs(additive - rhs)
    return TwistIdentityResult(
        float(analytic), float(truncated), coefficient_defect(series, q, Xc), complex(additive), complex(rhs), roots
    )
