"""Bundled input forms and the ``--form`` descriptor syntax.

Descriptors: a bundled name (``delta``, ``level11``, ``eis15``, ``eis35``),
``eis:<q1>.<i1>,<q2>.<i2>`` for the Eisenstein pair of characters
``characters_mod(q1)[i1]`` and ``characters_mod(q2)[i2]``, or ``file:<path>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from .characters import DirichletCharacter, characters_mod
from .coefficients import CoefficientSeries, eisenstein_coeffs, eta_product_coeffs, load_coeffs


@dataclass(frozen=True)
class FormDescriptor:
    name: str
    summary: str
    level: int
    weight: int
    build: Callable[[int], CoefficientSeries]
    genuine: bool = True  # cuspidal newform, so the local conclusions at q are asserted


def _order6_odd_mod7() -> DirichletCharacter:
    return next(c for c in characters_mod(7) if c.order == 6 and c.parity == -1)


def _quadratic_mod5() -> DirichletCharacter:
    return next(c for c in characters_mod(5) if c.order == 2)


def _odd_mod3() -> DirichletCharacter:
    return next(c for c in characters_mod(3) if c.order == 2)


def _eis_label(chi: DirichletCharacter) -> str:
    return f"{chi.modulus}.{characters_mod(chi.modulus).index(chi)}"


BUNDLED: dict[str, FormDescriptor] = {
    "delta": FormDescriptor(
        "delta", "Ramanujan Delta = eta(z)^24", 1, 12, lambda X: eta_product_coeffs([(1, 24)], 12, 1, X)
    ),
    "level11": FormDescriptor(
        "level11",
        "eta(z)^2 eta(11z)^2, weight 2 newform of level 11",
        11,
        2,
        lambda X: eta_product_coeffs([(1, 2), (11, 2)], 2, 11, X),
    ),
    "eis15": FormDescriptor(
        "eis15",
        f"Eisenstein pair (quadratic mod 5, quadratic mod 3) = eis:{_eis_label(_quadratic_mod5())},{_eis_label(_odd_mod3())}",
        15,
        1,
        lambda X: eisenstein_coeffs(_quadratic_mod5(), _odd_mod3(), X),
        genuine=False,
    ),
    "eis35": FormDescriptor(
        "eis35",
        f"Eisenstein pair (quadratic mod 5, order-6 odd mod 7) = eis:{_eis_label(_quadratic_mod5())},{_eis_label(_order6_odd_mod7())}",
        35,
        1,
        lambda X: eisenstein_coeffs(_quadratic_mod5(), _order6_odd_mod7(), X),
        genuine=False,
    ),
}


class FormSpecError(ValueError):
    pass


def _parse_eis(body: str) -> tuple[DirichletCharacter, DirichletCharacter]:
    try:
        parts = [tuple(int(t) for t in p.split(".")) for p in body.split(",")]
        (q1, i1), (q2, i2) = parts
        return characters_mod(q1)[i1], characters_mod(q2)[i2]
    except (ValueError, IndexError) as exc:
        raise FormSpecError(f"bad Eisenstein descriptor {body!r}; expected q1.i1,q2.i2") from exc


def describe(spec: str) -> str:
    """Canonical form of a descriptor (used to check round trips)."""
    spec = spec.strip()
    if spec in BUNDLED or spec.startswith("file:"):
        return spec
    if spec.startswith("eis:"):
        xi1, xi2 = _parse_eis(spec[4:])
        return f"eis:{_eis_label(xi1)},{_eis_label(xi2)}"
    raise FormSpecError(f"unknown form {spec!r}")


@lru_cache(maxsize=16)
def _build_cached(spec: str, X: int) -> CoefficientSeries:
    if spec in BUNDLED:
        return BUNDLED[spec].build(X)
    if spec.startswith("eis:"):
        xi1, xi2 = _parse_eis(spec[4:])
        return eisenstein_coeffs(xi1, xi2, X)
    raise FormSpecError(f"unknown form {spec!r}")


def load_form(spec: str, X: int) -> CoefficientSeries:
    """Series for a descriptor; files are read whole and truncated to X when longer."""
    spec = spec.strip()
    if spec.startswith("file:"):
        series = load_coeffs(spec[5:])
        return series.truncated(X) if series.length > X else series
    return _build_cached(describe(spec), X)


def is_genuine(spec: str) -> bool:
    """Whether r = 0, |mu| = 1 and S_q = 1 on units should hold (bundled cusp forms and unlabelled files)."""
    spec = spec.strip()
    if spec in BUNDLED:
        return BUNDLED[spec].genuine
    return not spec.startswith("eis:")


def list_forms() -> list[dict]:
    return [
        {"descriptor": d.name, "level": d.level, "weight": d.weight, "summary": d.summary}
        for d in BUNDLED.values()
    ]
