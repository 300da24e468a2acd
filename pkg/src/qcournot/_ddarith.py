"""Vectorised double-double arithmetic.

A value is a pair of float64 arrays ``(hi, lo)`` with ``|lo| <= ulp(hi)/2``,
giving roughly 32 significant digits. Only the handful of operations the
best-response search needs are provided. The error-free transforms rely on
strict IEEE float64 evaluation, which numpy guarantees.
"""

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def _split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def add(x, y):
    s, e = two_sum(x[0], y[0])
    e = e + (x[1] + y[1])
    return _quick_two_sum(s, e)


def neg(x):
    return -x[0], -x[1]


def scale(x, f):
    """Multiply by a power of two ``f`` (exact)."""
    return x[0] * f, x[1] * f


def mul(x, y):
    p, e = two_prod(x[0], y[0])
    e = e + (x[0] * y[1] + x[1] * y[0])
    return _quick_two_sum(p, e)


def greater(x, y):
    """Elementwise ``x > y``."""
    return (x[0] - y[0]) + (x[1] - y[1]) > 0


def from_float(a):
    a = np.asarray(a, dtype=float)
    return a, np.zeros_like(a)
