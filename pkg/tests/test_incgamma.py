import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from converse2.incgamma import upper_incomplete_gamma, upper_incomplete_gamma_mp


def oracle(s, x):
    with mpmath.workprec(400):
        return complex(mpmath.gammainc(mpmath.mpc(s), mpmath.mpf(x)))


GRID_S = [0.5, 1.0, 6.5, 12.25 + 3j, 40.0, -0.5 + 0.1j, -7.3 + 2j, -29.5, 0.75 + 39j, 5.5 - 20j, 1e-3 + 1e-3j]
GRID_X = [1e-4, 0.01, 0.3, 1.0, 2.7, 9.0, 30.0, 120.0, 299.0]


@pytest.mark.parametrize("s", GRID_S)
def test_against_high_precision(s):
    got = upper_incomplete_gamma(s, np.array(GRID_X))
    for x, v in zip(GRID_X, got):
        ref = oracle(s, x)
        assert abs(v - ref) <= 1e-12 * abs(ref) + 1e-300, (s, x)


def test_scalar_and_known_closed_forms():
    # Gamma(1, x) = e^-x and Gamma(1/2, x) = sqrt(pi) erfc(sqrt x)
    for x in (0.1, 1.0, 5.0, 50.0):
        assert upper_incomplete_gamma(1, x) == pytest.approx(math.exp(-x), rel=1e-13)
        assert upper_incomplete_gamma(0.5, x) == pytest.approx(math.sqrt(math.pi) * math.erfc(math.sqrt(x)), rel=1e-12)


def test_near_nonpositive_integer():
    for s in (0.0, -1.0, -3.0 + 1e-8j):
        assert abs(upper_incomplete_gamma(s, 0.7) - oracle(s, 0.7)) < 1e-12 * abs(oracle(s, 0.7))


@settings(max_examples=60, deadline=None)
@given(
    st.floats(-25, 35),
    st.floats(-30, 30),
    st.floats(1e-3, 200),
)
def test_recurrence(re, im, x):
    """Gamma(s+1, x) = s Gamma(s, x) + x^s e^-x."""
    s = complex(re, im)
    lhs = upper_incomplete_gamma(s + 1, x)
    rhs = s * upper_incomplete_gamma(s, x) + np.exp(s * math.log(x) - x)
    scale = abs(lhs) + abs(s * upper_incomplete_gamma(s, x)) + abs(np.exp(s * math.log(x) - x))
    assert abs(lhs - rhs) <= 1e-11 * scale


def test_range_errors():
    with pytest.raises(ValueError):
        upper_incomplete_gamma(50.0, 1.0)
    with pytest.raises(ValueError):
        upper_incomplete_gamma(1.0, 400.0)
    with pytest.raises(ValueError):
        upper_incomplete_gamma(1.0, -1.0)


def test_mp_path():
    assert complex(upper_incomplete_gamma_mp(3.5 + 1j, 2.0, prec=200)) == pytest.approx(oracle(3.5 + 1j, 2.0), rel=1e-15)
