from fractions import Fraction

import numpy as np
from hypothesis import given, settings, strategies as st

from septensor._dd import DD, outer

finite = st.floats(-1e6, 1e6, allow_nan=False).filter(lambda v: v == 0 or abs(v) > 1e-6)


def exact(d: DD) -> Fraction:
    return Fraction(float(d.hi)) + Fraction(float(d.lo))


@settings(max_examples=300, deadline=None)
@given(finite, finite)
def test_sum_is_exact(a, b):
    s = DD(np.float64(a)) + DD(np.float64(b))
    assert exact(s) == Fraction(a) + Fraction(b)


@settings(max_examples=300, deadline=None)
@given(finite, finite)
def test_product_is_exact(a, b):
    p = DD(np.float64(a)) * DD(np.float64(b))
    assert exact(p) == Fraction(a) * Fraction(b)


@settings(max_examples=300, deadline=None)
@given(finite, finite.filter(lambda v: v != 0))
def test_division_to_double_double_accuracy(a, b):
    q = DD(np.float64(a)) / DD(np.float64(b))
    ref = Fraction(a) / Fraction(b)
    if ref != 0:
        assert abs((exact(q) - ref) / ref) < 1e-30


def test_matmul_recovers_cancellation():
    big = 1e17
    A = DD(np.array([[big, 1.0, -big]]))
    x = DD(np.array([[1.0], [1.0], [1.0]]))
    assert (A @ x).to_float()[0, 0] == 1.0
    assert (np.array([[big, 1.0, -big]]) @ np.ones((3, 1)))[0, 0] != 1.0


def test_outer_shape():
    u = DD(np.array([1.0, 2.0]))
    v = DD(np.array([3.0, 4.0, 5.0]))
    np.testing.assert_array_equal(outer(u, v).to_float(), [[3, 4, 5], [6, 8, 10]])
