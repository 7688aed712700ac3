"""Dirichlet characters with exact root-of-unity values, Gauss and Ramanujan sums.

A character mod q is stored as a table of exponents ``t`` meaning
``chi(a) = e(t / order)``; residues sharing a factor with q map to ``None``.
Floating point only enters when a value is requested as a complex number.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .arith import divisors, euler_phi, factorize, is_prime, mobius

TWO_PI = 2.0 * math.pi


def e(x: float) -> complex:
    """e(x) = exp(2 pi i x)."""
    return cmath.exp(1j * TWO_PI * x)


def root_of_unity(num: int, den: int) -> complex:
    """e(num/den) with the angle reduced exactly before converting to float."""
    num %= den
    if num == 0:
        return 1.0 + 0.0j
    if 2 * num == den:
        return -1.0 + 0.0j
    if 4 * num == den:
        return 1j
    if 4 * num == 3 * den:
        return -1j
    angle = TWO_PI * num / den
    return complex(math.cos(angle), math.sin(angle))


@dataclass(frozen=True)
class DirichletCharacter:
    modulus: int
    order: int
    value_exponents: tuple[int | None, ...]
    conductor: int
    parity: int
    label: tuple[int, ...] = ()

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    def exponent(self, n: int) -> int | None:
        return self.value_exponents[n % self.modulus]

    def __call__(self, n: int) -> complex:
        t = self.value_exponents[n % self.modulus]
        if t is None:
            return 0j
        return root_of_unity(t, self.order)

    def exact_value(self, n: int) -> int | None:
        """Integer value for real characters, None for complex ones."""
        if not self.is_real:
            return None
        t = self.value_exponents[n % self.modulus]
        if t is None:
            return 0
        return -1 if t else 1

    @cached_property
    def values(self) -> np.ndarray:
        """chi(a) for a = 0..q-1 as a read-only complex array."""
        v = np.array([self(a) for a in range(self.modulus)], dtype=complex)
        v.flags.writeable = False
        return v

    def values_upto(self, X: int) -> np.ndarray:
        """chi(n) for n = 0..X."""
        reps = X // self.modulus + 1
        return np.tile(self.values, reps)[: X + 1]

    def conj(self) -> DirichletCharacter:
        exps = tuple(None if t is None else (-t) % self.order for t in self.value_exponents)
        orders, _ = _group_structure(self.modulus)
        label = tuple((-j) % m for j, m in zip(self.label, orders))
        return DirichletCharacter(self.modulus, self.order, exps, self.conductor, self.parity, label)

    def __repr__(self) -> str:
        return (
            f"DirichletCharacter(modulus={self.modulus}, order={self.order}, "
            f"conductor={self.conductor}, parity={self.parity:+d}, label={self.label})"
        )


def _component_generators(p: int, e: int) -> list[tuple[int, int, dict[int, int]]]:
    """Generators of (Z/p^e)^x as (generator, order, dlog table over residues mod p^e)."""
    pe = p**e
    if p == 2:
        if e == 1:
            return []
        if e == 2:
            return [(3, 2, {1: 0, 3: 1})]
        # (Z/2^e)^x = <-1> x <5>
        half = 2 ** (e - 2)
        logs_m1: dict[int, int] = {}
        logs_5: dict[int, int] = {}
        x5 = 1
        for j in range(half):
            logs_m1[x5] = 0
            logs_5[x5] = j
            logs_m1[(-x5) % pe] = 1
            logs_5[(-x5) % pe] = j
            x5 = x5 * 5 % pe
        return [(pe - 1, 2, logs_m1), (5, half, logs_5)]
    order = euler_phi(pe)
    prime_divs = list(factorize(order))
    g = 2
    while True:
        if math.gcd(g, p) == 1 and all(pow(g, order // r, pe) != 1 for r in prime_divs):
            break
        g += 1
    logs: dict[int, int] = {}
    x = 1
    for j in range(order):
        logs[x] = j
        x = x * g % pe
    return [(g, order, logs)]


@lru_cache(maxsize=256)
def _group_structure(q: int) -> tuple[tuple[int, ...], np.ndarray]:
    """Orders of a generating set of (Z/q)^x and the dlog matrix (residue x generator)."""
    comps: list[tuple[int, int, dict[int, int]]] = []
    moduli: list[int] = []
    for p, e in sorted(factorize(q).items()) if q > 1 else []:
        for gen in _component_generators(p, e):
            comps.append(gen)
            moduli.append(p**e)
    orders = tuple(c[1] for c in comps)
    dlog = np.full((q, len(comps)), -1, dtype=np.int64)
    for a in range(q):
        if math.gcd(a, q) != 1:
            continue
        for i, ((_, _, table), m) in enumerate(zip(comps, moduli)):
            dlog[a, i] = table[a % m]
    if q == 1:
        dlog = np.zeros((1, 0), dtype=np.int64)
    dlog.flags.writeable = False
    return orders, dlog


def _conductor(q: int, exps: Sequence[int | None]) -> int:
    for d in divisors(q):
        if all(exps[a] == 0 for a in range(1, q, d) if exps[a] is not None):
            return d
    return q


def _build(q: int, label: tuple[int, ...]) -> DirichletCharacter:
    orders, dlog = _group_structure(q)
    M = math.lcm(*orders) if orders else 1
    raw: list[int | None] = []
    for a in range(q):
        if math.gcd(a, q) != 1:
            raw.append(None)
            continue
        t = 0
        for i, m in enumerate(orders):
            t += label[i] * int(dlog[a, i]) * (M // m)
        raw.append(t % M)
    g = M
    for t in raw:
        if t is not None:
            g = math.gcd(g, t)
    order = M // g
    exps = tuple(None if t is None else t // g for t in raw)
    parity = 1
    if q > 2:
        parity = 1 if exps[q - 1] == 0 else -1
    return DirichletCharacter(q, order, exps, _conductor(q, exps), parity, label)


@lru_cache(maxsize=256)
def characters_mod(q: int) -> tuple[DirichletCharacter, ...]:
    """All phi(q) characters mod q, trivial character first.

    Characters are labelled by the exponent vector of their values on a fixed
    generating set of (Z/q)^x, enumerated lexicographically.
    """
    if q < 1:
        raise ValueError(f"modulus must be a positive integer, got {q}")
    orders, _ = _group_structure(q)
    return tuple(_build(q, label) for label in itertools.product(*(range(m) for m in orders)))


def character(q: int, index: int) -> DirichletCharacter:
    """The index-th character in ``characters_mod(q)``."""
    chars = characters_mod(q)
    if not 0 <= index < len(chars):
        raise ValueError(f"character index {index} out of range for modulus {q}")
    return chars[index]


def character_index(chi: DirichletCharacter) -> int:
    return characters_mod(chi.modulus).index(chi)


def trivial_character(q: int) -> DirichletCharacter:
    return characters_mod(q)[0]


def primitive_characters(q: int) -> list[DirichletCharacter]:
    return [chi for chi in characters_mod(q) if chi.is_primitive]


def gauss_sum(chi: DirichletCharacter) -> complex:
    """tau(chi) = sum_{a=1}^{q} chi(a) e(a/q), summed with fsum on each component."""
    q = chi.modulus
    re: list[float] = []
    im: list[float] = []
    for a in range(1, q + 1):
        t = chi.value_exponents[a % q]
        if t is None:
            continue
        # e(t/order + a/q) with the angle reduced exactly
        z = root_of_unity(t * q + a * chi.order, chi.order * q)
        re.append(z.real)
        im.append(z.imag)
    return complex(math.fsum(re), math.fsum(im))


def ramanujan_sum(q: int, n: int) -> int:
    """c_q(n) = sum over units a mod q of e(an/q), via sum_{d | (n,q)} mu(q/d) d."""
    if q < 1:
        raise ValueError(f"modulus must be a positive integer, got {q}")
    g = math.gcd(n, q)
    return sum(mobius(q // d) * d for d in divisors(g))


def ramanujan_sum_direct(q: int, n: int) -> complex:
    re = [math.cos(TWO_PI * (a * n % q) / q) for a in range(1, q + 1) if math.gcd(a, q) == 1]
    im = [math.sin(TWO_PI * (a * n % q) / q) for a in range(1, q + 1) if math.gcd(a, q) == 1]
    return complex(math.fsum(re), math.fsum(im))


def fourier_expansion_of_e(q: int, n: int) -> complex:
    """Right-hand side of the Z/qZ expansion of e(n/q) in terms of characters mod prime q."""
    chars = characters_mod(q)
    chi0 = chars[0]
    terms = [1.0 + 0j, -q / (q - 1) * chi0(n)]
    for chi in chars[1:]:
        terms.append(gauss_sum(chi.conj()) * chi(n) / (q - 1))
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def verify_additive_fourier_identity(q: int, n: int) -> float:
    """|e(n/q) - [1 - q/(q-1) chi0(n) + 1/(q-1) sum_{chi != chi0} tau(chi_bar) chi(n)]|."""
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    return abs(root_of_unity(n, q) - fourier_expansion_of_e(q, n))


# exact cyclotomic arithmetic -------------------------------------------------


@lru_cache(maxsize=128)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Integer coefficients (constant term first) of the m-th cyclotomic polynomial."""
    num = [-1] + [0] * (m - 1) + [1]  # x^m - 1
    for d in divisors(m)[:-1]:
        num = _poly_divexact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    num = num[:]
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        for j, dj in enumerate(den):
            num[i + j] -= c * dj
    if any(num):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=128)
def _power_basis_reduction(m: int) -> np.ndarray:
    """Row t holds x^t mod Phi_m in the power basis (m x phi(m), integer)."""
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    rows = np.zeros((m, deg), dtype=np.int64)
    cur = [0] * deg
    cur[0] = 1
    for t in range(m):
        rows[t] = cur
        # multiply by x and reduce with the monic relation
        top = cur[-1]
        cur = [0] + cur[:-1]
        for j in range(deg):
            cur[j] -= top * phi[j]
    return rows


def root_of_unity_sum_is_zero(counts: np.ndarray) -> np.ndarray:
    """Exact test that sum_t counts[..., t] e(t/m) vanishes, m = counts.shape[-1]."""
    m = counts.shape[-1]
    reduced = counts.astype(np.int64) @ _power_basis_reduction(m)
    return ~np.any(reduced, axis=-1)


def orthogonality_defects(q: int) -> list[tuple[int, int]]:
    """Pairs (a, b) of units mod q where (1/phi(q)) sum_chi chi(a) conj(chi(b)) != [a == b].

    Evaluated exactly: every character value is an m-th root of unity with
    m the exponent of the unit group, and vanishing of the sum is decided by
    reduction modulo the m-th cyclotomic polynomial.
    """
    chars = characters_mod(q)
    units = [a for a in range(q) if math.gcd(a, q) == 1]
    m = math.lcm(*(c.order for c in chars))
    E = np.array(
        [[chi.value_exponents[a] * (m // chi.order) for a in units] for chi in chars],
        dtype=np.int64,
    )
    bad: list[tuple[int, int]] = []
    for j, b in enumerate(units):
        diff = (E - E[:, j : j + 1]) % m  # (chars, units)
        counts = np.zeros((len(units), m), dtype=np.int64)
        for col in range(len(units)):
            counts[col] = np.bincount(diff[:, col], minlength=m)
        zero = root_of_unity_sum_is_zero(counts)
        for i, a in enumerate(units):
            if a == b:
                if counts[i, 0] != len(chars):
                    bad.append((a, b))
            elif not zero[i]:
                bad.append((a, b))
    return bad
