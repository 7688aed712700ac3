"""Compensated summation for complex arrays (math.fsum on each component)."""

from __future__ import annotations

import math

import numpy as np


def csum(terms) -> complex:
    arr = np.asarray(terms, dtype=complex).ravel()
    return complex(math.fsum(arr.real), math.fsum(arr.imag))


def abs_sum(terms) -> float:
    return math.fsum(np.abs(np.asarray(terms, dtype=complex)).ravel())
