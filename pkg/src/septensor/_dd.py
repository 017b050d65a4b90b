"""Vectorized double-double arithmetic on numpy float64 arrays.

A value is the unevaluated sum ``hi + lo`` with ``|lo| <= ulp(hi)/2``,
giving roughly 106 bits of significand.  The error-free transformations
are the classical ones of Dekker and Knuth; they assume IEEE round-to-nearest
and no fused multiply-add contraction, which holds for numpy ufuncs.
"""

from __future__ import annotations

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


class DD:
    """Array of double-double numbers."""

    __slots__ = ("hi", "lo")

    def __init__(self, hi, lo=None):
        self.hi = np.asarray(hi, dtype=float)
        self.lo = np.zeros_like(self.hi) if lo is None else np.asarray(lo, dtype=float)

    @staticmethod
    def _coerce(other) -> "DD":
        return other if isinstance(other, DD) else DD(other)

    @property
    def shape(self):
        return self.hi.shape

    @property
    def T(self) -> "DD":
        return DD(self.hi.T, self.lo.T)

    def __getitem__(self, idx) -> "DD":
        return DD(self.hi[idx], self.lo[idx])

    def __neg__(self) -> "DD":
        return DD(-self.hi, -self.lo)

    def __add__(self, other) -> "DD":
        o = self._coerce(other)
        s, e = _two_sum(self.hi, o.hi)
        t, f = _two_sum(self.lo, o.lo)
        e = e + t
        s, e = _quick_two_sum(s, e)
        e = e + f
        return DD(*_quick_two_sum(s, e))

    __radd__ = __add__

    def __sub__(self, other) -> "DD":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "DD":
        return self._coerce(other) - self

    def __mul__(self, other) -> "DD":
        o = self._coerce(other)
        p, e = _two_prod(self.hi, o.hi)
        e = e + (self.hi * o.lo + self.lo * o.hi)
        return DD(*_quick_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "DD":
        o = self._coerce(other)
        q1 = self.hi / o.hi
        r = self - o * q1
        q2 = r.hi / o.hi
        r = r - o * q2
        q3 = r.hi / o.hi
        s, e = _quick_two_sum(q1, q2)
        return DD(s, e) + DD(q3)

    def __matmul__(self, other) -> "DD":
        o = self._coerce(other)
        a_hi = np.atleast_2d(self.hi)
        a_lo = np.atleast_2d(self.lo)
        b_hi = o.hi.reshape(o.hi.shape[0], -1)
        b_lo = o.lo.reshape(b_hi.shape)
        if a_hi.shape[1] != b_hi.shape[0]:
            raise ValueError(f"matmul shape mismatch {self.shape} @ {o.shape}")
        acc = DD(np.zeros((a_hi.shape[0], b_hi.shape[1])))
        for j in range(a_hi.shape[1]):
            acc = acc + DD(a_hi[:, j:j + 1], a_lo[:, j:j + 1]) * DD(b_hi[j:j + 1], b_lo[j:j + 1])
        shape = self.hi.shape[:-1] + o.hi.shape[1:]
        return DD(acc.hi.reshape(shape), acc.lo.reshape(shape))

    def copy(self) -> "DD":
        return DD(self.hi.copy(), self.lo.copy())

    def to_float(self) -> np.ndarray:
        return self.hi + self.lo

    def __repr__(self):
        return f"DD(hi={self.hi!r}, lo={self.lo!r})"


def outer(u: DD, v: DD) -> DD:
    return DD(u.hi[:, None], u.lo[:, None]) * DD(v.hi[None, :], v.lo[None, :])


def zeros(shape) -> DD:
    return DD(np.zeros(shape))
