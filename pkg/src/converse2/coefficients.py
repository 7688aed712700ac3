"""Multiplicative coefficient series and their local Euler-factor data.

Coefficients are held in the analytic normalisation a_n (a_1 = 1, Deligne
size |a_n| <= d(n) for eigenforms) alongside the raw Fourier coefficients
f_n = a_n n^((k-1)/2). Series built from eta products or real character
pairs also keep the raw coefficients as exact Python integers, which lets the
Euler-factor inversion run in integer arithmetic.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from collections.abc import Sequence

import gmpy2
import numpy as np

from .arith import divisor_counts, is_prime, primes_up_to, smallest_prime_factor
from .characters import DirichletCharacter

ZERO_THRESHOLD = 1e-12
DEGREE_DEFECT_THRESHOLD = 1e-9
_DIRECT_LIMIT = 2000


class CoefficientFileError(ValueError):
    """A coefficient file could not be parsed; ``problems`` lists each issue with its row."""

    def __init__(self, path, problems: Sequence[str]):
        self.path = str(path)
        self.problems = list(problems)
        super().__init__(f"{path}: " + "; ".join(self.problems))


class MultiplicativityWarning(UserWarning):
    pass


def normalize(f: np.ndarray, weight: int) -> np.ndarray:
    """a_n = f_n n^(-(k-1)/2) for an array indexed from n = 0 (entry 0 is ignored)."""
    n = np.arange(len(f), dtype=float)
    n[0] = 1.0
    out = np.asarray(f, dtype=complex) * n ** (-(weight - 1) / 2)
    out[0] = 0
    return out


def denormalize(a: np.ndarray, weight: int) -> np.ndarray:
    n = np.arange(len(a), dtype=float)
    n[0] = 1.0
    out = np.asarray(a, dtype=complex) * n ** ((weight - 1) / 2)
    out[0] = 0
    return out


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class CoefficientSeries:
    """a_1..a_X of a degree-2 L-function of weight k and level N.

    ``a`` and ``f`` are arrays of length X + 1 indexed directly by n; entry 0
    is unused and zero.
    """

    level: int
    weight: int
    a: np.ndarray
    f: np.ndarray
    provenance: str = "external file"
    growth_constant: float = 1.0
    raw_exact: Sequence[int] | None = None

    @classmethod
    def from_normalized(cls, a, level: int, weight: int, **kw) -> CoefficientSeries:
        a = np.asarray(a, dtype=complex)
        return cls(level, weight, _frozen(a), _frozen(denormalize(a, weight)), **kw)

    @classmethod
    def from_raw(cls, f, level: int, weight: int, **kw) -> CoefficientSeries:
        f = np.asarray(f, dtype=complex)
        return cls(level, weight, _frozen(normalize(f, weight)), _frozen(f), **kw)

    @property
    def length(self) -> int:
        return len(self.a) - 1

    def __len__(self) -> int:
        return self.length

    def truncated(self, X: int) -> CoefficientSeries:
        if X > self.length:
            raise ValueError(f"series has only {self.length} terms, asked for {X}")
        exact = None if self.raw_exact is None else self.raw_exact[: X + 1]
        return replace(self, a=_frozen(self.a[: X + 1]), f=_frozen(self.f[: X + 1]), raw_exact=exact)

    def perturbed(self, n: int, delta: complex) -> CoefficientSeries:
        """Copy with a_n shifted by ``delta`` (drops the exact raw coefficients)."""
        a = self.a.copy()
        a[n] += delta
        return CoefficientSeries.from_normalized(
            a,
            self.level,
            self.weight,
            provenance=f"{self.provenance} perturbed a_{n}",
            growth_constant=self.growth_constant + abs(delta),
        )

    def conjugate(self) -> CoefficientSeries:
        exact = self.raw_exact
        return replace(self, a=_frozen(np.conj(self.a)), f=_frozen(np.conj(self.f)), raw_exact=exact)

    def growth_violations(self) -> list[int]:
        d = divisor_counts(self.length)
        n = np.nonzero(np.abs(self.a[1:]) > self.growth_constant * d[1:] * (1 + 1e-12))[0] + 1
        return n.tolist()


# eta products ----------------------------------------------------------------


def _pentagonal(D: int) -> dict[int, int]:
    """prod_{n>=1} (1 - q^n) to degree < D as a sparse {exponent: coefficient}."""
    out: dict[int, int] = {}
    k = 0
    while True:
        hit = False
        for kk in ((k, -k) if k else (0,)):
            ex = kk * (3 * kk - 1) // 2
            if ex < D:
                out[ex] = -1 if kk % 2 else 1
                hit = True
        if not hit:
            break
        k += 1
    return out


def _jacobi_cube(D: int) -> dict[int, int]:
    """prod (1 - q^n)^3 = sum_m (-1)^m (2m+1) q^{m(m+1)/2}."""
    out: dict[int, int] = {}
    m = 0
    while m * (m + 1) // 2 < D:
        out[m * (m + 1) // 2] = (-1) ** m * (2 * m + 1)
        m += 1
    return out


def _dilate(sparse: dict[int, int], m: int, D: int) -> dict[int, int]:
    return {e * m: c for e, c in sparse.items() if e * m < D}


def _mul_sparse(dense: np.ndarray, sparse: dict[int, int]) -> np.ndarray:
    D = len(dense)
    out = np.zeros(D, dtype=object)
    for ex, c in sparse.items():
        out[ex:] += c * dense[: D - ex]
    return out


def _div_sparse(dense: np.ndarray, sparse: dict[int, int]) -> np.ndarray:
    # sparse has constant term 1
    D = len(dense)
    terms = sorted((ex, c) for ex, c in sparse.items() if ex)
    out = [0] * D
    for n in range(D):
        acc = dense[n]
        for ex, c in terms:
            if ex > n:
                break
            acc -= c * out[n - ex]
        out[n] = acc
    return np.array(out, dtype=object)


# Kronecker substitution: a polynomial with signed integer coefficients |c_i| <
# 2^(B-1) is the integer sum c_i 2^(B i); GMP multiplies those fast.


def _kron_pack(sparse: dict[int, int], B: int) -> gmpy2.mpz:
    width = B // 8
    top = max(sparse) + 1
    pos = bytearray(width * top)
    neg = bytearray(width * top)
    for ex, c in sparse.items():
        buf = pos if c > 0 else neg
        buf[ex * width : (ex + 1) * width] = abs(c).to_bytes(width, "little")
    return gmpy2.mpz(int.from_bytes(pos, "little")) - gmpy2.mpz(int.from_bytes(neg, "little"))


def _kron_truncate(v: gmpy2.mpz, B: int, D: int) -> gmpy2.mpz:
    """Keep the coefficients of degree < D (balanced residue mod 2^(B D))."""
    bits = B * D
    t = gmpy2.f_mod_2exp(v, bits)
    if gmpy2.bit_test(t, bits - 1):
        t -= gmpy2.mpz(1) << bits
    return t


class PackedIntegers(Sequence):
    """Read-only signed integers stored as balanced base-2^B digits of one big integer.

    Entry i is decoded on access; ``floats`` converts everything at once.
    """

    def __init__(self, value: gmpy2.mpz, B: int, D: int, offset: int = 0):
        if B % 32:
            raise ValueError("digit width must be a multiple of 32 bits")
        self._sign = -1 if value < 0 else 1
        self._width = B // 8
        self._raw = abs(int(value)).to_bytes(self._width * D + 1, "little")
        self._len = D
        self._offset = offset

    @classmethod
    def _view(cls, src: PackedIntegers, length: int) -> PackedIntegers:
        out = cls.__new__(cls)
        out.__dict__.update(src.__dict__)
        out._len = length
        return out

    def __len__(self) -> int:
        return self._len

    def _digit(self, i: int) -> int:
        w = self._width
        d = int.from_bytes(self._raw[i * w : (i + 1) * w], "little", signed=True)
        if i and self._raw[i * w - 1] & 0x80:
            d += 1
        return self._sign * d

    def __getitem__(self, idx):
        if isinstance(idx, slice):
            start, stop, step = idx.indices(self._len)
            if start == 0 and step == 1:
                return PackedIntegers._view(self, stop)
            return [self[i] for i in range(start, stop, step)]
        if idx < 0:
            idx += self._len
        if not 0 <= idx < self._len:
            raise IndexError(idx)
        if idx < self._offset:
            return 0
        return self._digit(idx - self._offset)

    def __eq__(self, other) -> bool:
        return len(self) == len(other) and all(x == y for x, y in zip(self, other))

    def __hash__(self):
        return None  # type: ignore[return-value]

    def floats(self) -> np.ndarray:
        w = self._width // 4
        n = self._len - self._offset
        words = np.frombuffer(self._raw, dtype="<u4", count=w * n).reshape(n, w)
        top = words[:, -1].view(np.int32).astype(float)
        val = top
        for j in range(w - 2, -1, -1):
            val = val * 4294967296.0 + words[:, j]
        carry = np.zeros(n)
        carry[1:] = words[:-1, -1] >= 0x80000000
        out = np.zeros(self._len)
        out[self._offset :] = self._sign * (val + carry)
        return out


def _kron_bits(weight: float, X: int) -> int:
    # raw coefficients of a weight-k eigenform obey |f_n| <= d(n) n^((k-1)/2); partial
    # products of eta factors are held to the bound for their own weight
    need = (max(weight, 1) - 1) / 2 * math.log2(max(X, 2)) + 12 + 16
    return 32 * math.ceil((need + 1) / 32)


def _kron_widen(v: gmpy2.mpz, B1: int, B2: int, D: int) -> gmpy2.mpz:
    """Re-space the balanced base-2^B1 digits of v (degree < D) to base 2^B2, B2 >= B1."""
    if B2 == B1:
        return v
    w1, w2 = B1 // 8, B2 // 8
    sign = -1 if v < 0 else 1
    chunks = np.frombuffer(abs(int(v)).to_bytes(w1 * D, "little"), dtype=np.uint8).reshape(D, w1)
    negative = chunks[:, -1] >= 0x80
    # chunk i read as a signed integer s_i; digit i is s_i plus the sign bit of chunk i-1
    wide = np.zeros((D, w2), dtype=np.uint8)
    wide[:, :w1] = chunks
    wide[negative, w1:] = 0xFF
    borrow = np.zeros((D + 1, w2), dtype=np.uint8)
    borrow[1:, 0] = negative
    carry = np.zeros((D, w2), dtype=np.uint8)
    carry[1:, 0] = negative[:-1]
    total = (
        gmpy2.mpz(int.from_bytes(wide.tobytes(), "little"))
        - gmpy2.mpz(int.from_bytes(borrow.tobytes(), "little"))
        + gmpy2.mpz(int.from_bytes(carry.tobytes(), "little"))
    )
    return sign * total


@dataclass(frozen=True)
class _Packed:
    value: gmpy2.mpz
    B: int
    etas: int  # number of eta factors multiplied in; weight is etas / 2


def _kron_mul(x: _Packed, y: _Packed, X: int) -> _Packed:
    etas = x.etas + y.etas
    B = max(_kron_bits(etas / 2, X), x.B, y.B)
    xv = _kron_widen(x.value, x.B, B, X)
    prod = xv * xv if y is x else xv * _kron_widen(y.value, y.B, B, X)
    return _Packed(_kron_truncate(prod, B, X), B, etas)


def _eta_raw_kronecker(spec: tuple[tuple[int, int], ...], weight: int, X: int) -> PackedIntegers:
    D = X
    total: _Packed | None = None
    for m, r in spec:
        B3, B1 = _kron_bits(1.5, X), _kron_bits(0.5, X)
        cube = _Packed(_kron_pack(_dilate(_jacobi_cube(D), m, D), B3), B3, 3)
        pent = _Packed(_kron_pack(_dilate(_pentagonal(D), m, D), B1), B1, 1)
        factor = None
        base, e = cube, r // 3
        while e:
            if e & 1:
                factor = base if factor is None else _kron_mul(factor, base, X)
            e >>= 1
            if e:
                base = _kron_mul(base, base, X)
        for _ in range(r % 3):
            factor = pent if factor is None else _kron_mul(factor, pent, X)
        if factor is not None:
            total = factor if total is None else _kron_mul(total, factor, X)
    B = _kron_bits(weight, X)
    value = _kron_widen(total.value, total.B, B, D) if total.B < B else total.value
    # shift by q^1 so that entry n is f_n
    return PackedIntegers(value, max(B, total.B), D + 1, offset=1)


@lru_cache(maxsize=16)
def _eta_raw(spec: tuple[tuple[int, int], ...], X: int, weight: int = 0) -> Sequence[int]:
    if weight and all(r >= 0 for _, r in spec) and X > _DIRECT_LIMIT:
        fast = _eta_raw_kronecker(spec, weight, X)
        if list(fast[: _DIRECT_LIMIT + 1]) != list(_eta_raw(spec, _DIRECT_LIMIT)):
            raise ArithmeticError("Kronecker expansion disagrees with direct expansion")
        return fast
    D = X  # coefficients of q^0..q^{X-1} of the product, shifted by q^1
    series = np.zeros(D, dtype=object)
    series[0] = 1
    for m, r in spec:
        if r >= 0:
            cube = _dilate(_jacobi_cube(D), m, D)
            for _ in range(r // 3):
                series = _mul_sparse(series, cube)
            pent = _dilate(_pentagonal(D), m, D)
            for _ in range(r % 3):
                series = _mul_sparse(series, pent)
        else:
            pent = _dilate(_pentagonal(D), m, D)
            for _ in range(-r):
                series = _div_sparse(series, pent)
    return (0,) + tuple(int(c) for c in series)


def eta_product_coeffs(
    spec: Sequence[tuple[int, int]], weight: int, level: int, X: int
) -> CoefficientSeries:
    """q * prod_{(m, r)} prod_n (1 - q^{mn})^r expanded to X terms.

    ``spec`` lists (scale m, exponent r) pairs; the eta quotient must start at
    q^1, i.e. sum m r = 24.
    """
    spec = tuple((int(m), int(r)) for m, r in spec)
    if any(m < 1 for m, _ in spec):
        raise ValueError("eta scales must be positive")
    lead = Fraction(sum(m * r for m, r in spec), 24)
    if lead != 1:
        raise ValueError(f"eta quotient has leading exponent {lead}, expected 1")
    if X < 1:
        raise ValueError(f"truncation must be >= 1, got {X}")
    raw = _eta_raw(spec, X, weight)
    if isinstance(raw, PackedIntegers):
        f = raw.floats().astype(complex)
    else:
        f = np.array([float(c) for c in raw], dtype=complex)
    return CoefficientSeries.from_raw(
        f, level, weight, provenance=f"eta product {list(spec)}", growth_constant=1.0, raw_exact=raw
    )


# character pairs --------------------------------------------------------------


def _divisor_convolution(v1: np.ndarray, v2: np.ndarray, X: int) -> np.ndarray:
    """sum_{d m = n} v1[m] v2[d] for n <= X, split at sqrt(X) so each pair is visited once."""
    out = np.zeros(X + 1, dtype=np.result_type(v1, v2))
    for t in range(1, math.isqrt(X) + 1):
        top = X // t
        out[t * t :: t] += v2[t] * v1[t : top + 1]
        out[t * (t + 1) :: t] += v1[t] * v2[t + 1 : top + 1]
    return out


def eisenstein_coeffs(xi1: DirichletCharacter, xi2: DirichletCharacter, X: int) -> CoefficientSeries:
    """a_n = sum_{d | n} xi1(n/d) xi2(d), weight 1, level N1 N2."""
    if not (xi1.is_primitive and xi2.is_primitive):
        raise ValueError("both characters must be primitive")
    if xi1.parity * xi2.parity != -1:
        raise ValueError("need xi1(-1) xi2(-1) = -1 for weight 1")
    if xi1.parity != 1:
        raise ValueError("xi1 must be the even character")
    if X < 1:
        raise ValueError(f"truncation must be >= 1, got {X}")
    if xi1.is_real and xi2.is_real:
        e1 = np.array([xi1.exact_value(n) for n in range(X + 1)], dtype=np.int64)
        e2 = np.array([xi2.exact_value(n) for n in range(X + 1)], dtype=np.int64)
        ex = _divisor_convolution(e1, e2, X)
        exact = _frozen(ex)
        a = ex.astype(complex)
    else:
        exact = None
        a = _divisor_convolution(xi1.values_upto(X), xi2.values_upto(X), X)
    return CoefficientSeries.from_normalized(
        a,
        xi1.modulus * xi2.modulus,
        1,
        provenance=f"character pair ({xi1.modulus}:{xi1.label}, {xi2.modulus}:{xi2.label})",
        growth_constant=1.0,
        raw_exact=exact,
    )


# files -------------------------------------------------------------------------

_HEADER = re.compile(r"#\s*(.*)")


def save_coeffs(series: CoefficientSeries, path) -> None:
    lines = [f"# N={series.level} k={series.weight} C={float(series.growth_constant)!r}"]
    for n in range(1, series.length + 1):
        v = complex(series.a[n])
        lines.append(f"{n},{v.real!r},{v.imag!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_coeffs(path, N: int | None = None, k: int | None = None, X: int | None = None) -> CoefficientSeries:
    """Read ``n,re,im`` rows (analytic normalisation).

    An optional header ``# N=<level> k=<weight> [C=<growth constant>]`` fills
    in whatever the arguments leave out. Structural problems raise
    ``CoefficientFileError``; failures of multiplicativity only warn.
    """
    text = Path(path).read_text()
    header: dict[str, str] = {}
    rows: list[tuple[int, int, complex]] = []
    problems: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            for tok in m.group(1).split():
                if "=" in tok:
                    key, val = tok.split("=", 1)
                    header[key.strip()] = val.strip()
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            problems.append(f"row {lineno}: expected 3 fields, got {len(parts)}")
            continue
        try:
            n = int(parts[0])
            v = complex(float(parts[1]), float(parts[2]))
        except ValueError:
            problems.append(f"row {lineno}: cannot parse {line!r}")
            continue
        rows.append((lineno, n, v))
    if not rows and not problems:
        raise CoefficientFileError(path, ["no rows"])
    expected = 1
    for lineno, n, _ in rows:
        if n != expected:
            problems.append(f"row {lineno}: index {n} where {expected} was expected")
            expected = n
        expected += 1
    if rows and rows[0][1] == 1 and abs(rows[0][2] - 1) > ZERO_THRESHOLD:
        problems.append(f"row {rows[0][0]}: a_1 = {rows[0][2]} but must be 1")
    try:
        level = N if N is not None else int(header["N"])
        weight = k if k is not None else int(header["k"])
    except (KeyError, ValueError):
        problems.append("level N and weight k missing (pass them or add a '# N=.. k=..' header)")
        level = weight = 0
    if problems:
        raise CoefficientFileError(path, problems)
    a = np.zeros(len(rows) + 1, dtype=complex)
    for _, n, v in rows:
        a[n] = v
    if X is not None:
        if X > len(rows):
            raise CoefficientFileError(path, [f"file has {len(rows)} rows, {X} requested"])
        a = a[: X + 1]
    d = divisor_counts(len(a) - 1)
    if "C" in header:
        C = float(header["C"])
    else:
        C = 2.0 * float(np.max(np.abs(a[1:]) / d[1:]))
    series = CoefficientSeries.from_normalized(
        a, level, weight, provenance=f"external file {Path(path).name}", growth_constant=C
    )
    bad = check_multiplicativity(series)
    if bad:
        shown = ", ".join(map(str, bad[:20])) + (" ..." if len(bad) > 20 else "")
        warnings.warn(
            f"{path}: coefficients not multiplicative at n = {shown}", MultiplicativityWarning, stacklevel=2
        )
    return series


# multiplicativity ----------------------------------------------------------------


def multiplicative_closure(a: np.ndarray) -> np.ndarray:
    """prod_{p^e || n} a_{p^e} for every n (entry 0 unused)."""
    X = len(a) - 1
    prod = np.ones(X + 1, dtype=complex)
    for p in primes_up_to(X):
        pe = p
        while pe <= X:
            idx = np.arange(pe, X + 1, pe)
            exact = idx[(idx // pe) % p != 0]
            prod[exact] *= a[pe]
            pe *= p
    prod[0] = 0
    return prod


def check_multiplicativity(series: CoefficientSeries, tol: float = ZERO_THRESHOLD) -> list[int]:
    """Indices n whose a_n differs from the product of a_{p^e} over p^e || n."""
    a = series.a
    prod = multiplicative_closure(a)
    err = np.abs(a - prod)
    bad = np.nonzero(err > tol * np.maximum(1.0, np.abs(prod)))[0]
    return [int(n) for n in bad if n > 1]


# Euler factors -------------------------------------------------------------------


def classify_epsilon(lam: complex, mu: complex) -> complex:
    """lam/conj(lam) if lam != 0; mu/|mu| if lam = 0 != mu; 1 otherwise."""
    lam, mu = complex(lam), complex(mu)
    scale = max(abs(lam), abs(mu), 1.0)
    if abs(lam) > ZERO_THRESHOLD * scale:
        if lam.imag == 0:
            return 1.0 + 0j
        return lam / lam.conjugate()
    if abs(mu) > ZERO_THRESHOLD * scale:
        return mu / abs(mu)
    return 1.0 + 0j


@dataclass(frozen=True)
class EulerFactorData:
    prime: int
    lam: complex
    mu: complex
    eps: complex
    r: complex
    inverse_poly: tuple[complex, ...]
    defect: float
    exact: bool = False
    exact_inverse: tuple[int, ...] | None = field(default=None, repr=False)

    @property
    def degree(self) -> int:
        nz = [j for j, c in enumerate(self.inverse_poly) if abs(c) > DEGREE_DEFECT_THRESHOLD]
        return max(nz) if nz else 0

    @property
    def is_degree_two(self) -> bool:
        return self.defect < DEGREE_DEFECT_THRESHOLD

    def roots(self) -> list[complex]:
        """Roots of 1 - lam z + mu z^2 (one root if mu = 0, none if both vanish)."""
        return euler_roots(self.lam, self.mu)

    def satisfies_nonvanishing(self) -> bool:
        """All roots z satisfy |z| >= q^(-1/2), i.e. no zero of F_q^{-1} with Re(s) >= 1/2."""
        bound = self.prime ** -0.5
        return all(abs(z) >= bound * (1 - 1e-12) for z in self.roots())


def euler_roots(lam: complex, mu: complex) -> list[complex]:
    scale = max(abs(lam), abs(mu), 1.0)
    if abs(mu) > ZERO_THRESHOLD * scale:
        disc = np.sqrt(complex(lam * lam - 4 * mu))
        return [complex((lam + disc) / (2 * mu)), complex((lam - disc) / (2 * mu))]
    if abs(lam) > ZERO_THRESHOLD * scale:
        return [complex(1 / lam)]
    return []


def formal_inverse(coeffs: Sequence) -> list:
    """c with (sum_j coeffs_j z^j)(sum_j c_j z^j) = 1 to the same degree; coeffs[0] must be 1."""
    out = [coeffs[0] / coeffs[0] if not isinstance(coeffs[0], int) else 1]
    for j in range(1, len(coeffs)):
        acc = 0 * coeffs[0]
        for i in range(1, j + 1):
            acc += coeffs[i] * out[j - i]
        out.append(-acc)
    return out


def euler_factor_inverse(
    series: CoefficientSeries, q: int, J: int = 6, clamp: bool = False
) -> EulerFactorData:
    """Formal inverse of sum_j a_{q^j} z^j up to z^J, plus lam, mu, eps, r and the c_3..c_J defect.

    With ``clamp`` the degree is lowered to the largest J with q^J <= X instead
    of raising; ``EulerFactorData.inverse_poly`` then has fewer entries.
    """
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if J < 2:
        raise ValueError("degree cap must be at least 2")
    if q**J > series.length:
        if not clamp:
            raise ValueError(f"q^J = {q**J} exceeds truncation {series.length}")
        J = max(j for j in range(J + 1) if q**j <= series.length)
        if J < 2:
            raise ValueError(f"q^2 = {q * q} exceeds truncation {series.length}")
    k = series.weight
    exact = series.raw_exact is not None
    if exact:
        raw = [int(series.raw_exact[q**j]) for j in range(J + 1)]
        inv_raw = formal_inverse(raw)
        # a_{q^j} z^j = f_{q^j} (q^{-(k-1)/2} z)^j
        scale = [q ** (-(k - 1) * j / 2) for j in range(J + 1)]
        inverse = tuple(complex(c * s) for c, s in zip(inv_raw, scale))
        defect = max((abs(c) for c in inverse[3:]), default=0.0)
        lam = complex(series.a[q])
        mu_frac = Fraction(raw[1] ** 2 - raw[2], q ** (k - 1))
        mu = complex(float(mu_frac))
        exact_inverse = tuple(inv_raw)
    else:
        coeffs = [complex(series.a[q**j]) for j in range(J + 1)]
        inverse = tuple(formal_inverse(coeffs))
        defect = max((abs(c) for c in inverse[3:]), default=0.0)
        lam = coeffs[1]
        mu = coeffs[1] ** 2 - coeffs[2]
        exact_inverse = None
    eps = classify_epsilon(lam, mu)
    r = 1 - eps * np.conj(mu)
    return EulerFactorData(q, lam, mu, eps, complex(r), inverse, float(defect), exact, exact_inverse)


def hecke_recursion_defect(series: CoefficientSeries, q: int, J: int = 6) -> float:
    """max_j |a_{q^{j+1}} - lam a_{q^j} + mu a_{q^{j-1}}| for 1 <= j < J."""
    a = series.a
    lam = a[q]
    mu = a[q] ** 2 - a[q * q]
    worst = 0.0
    for j in range(1, J):
        if q ** (j + 1) > series.length:
            break
        worst = max(worst, abs(a[q ** (j + 1)] - lam * a[q**j] + mu * a[q ** (j - 1)]))
    return float(worst)
