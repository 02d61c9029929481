"""Vectorized double-double arithmetic on (hi, lo) float64 array pairs.

Error-free transformations (two_sum, two_prod via Dekker splitting) give
roughly 31 significant decimal digits.  All operations broadcast like the
underlying numpy ufuncs; scalars work as 0-d arrays.  No transcendentals:
square roots are done by one Newton correction from the double estimate,
which is all the eigenvalue oracle needs.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "dd",
    "add",
    "sub",
    "neg",
    "mul",
    "div",
    "sqrt",
    "to_float",
]

_SPLITTER = 134217729.0  # 2^27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _quick_two_sum(a, b):
    # requires |a| >= |b| componentwise
    s = a + b
    err = b - (s - a)
    return s, err


def _split(a):
    c = _SPLITTER * a
    abig = c - a
    hi = c - abig
    lo = a - hi
    return hi, lo


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def dd(x):
    """Promote a float/array to a (hi, lo) pair."""
    hi = np.asarray(x, dtype=np.float64)
    return hi, np.zeros_like(hi)


def to_float(x):
    return x[0] + x[1]


def add(x, y):
    s, e = _two_sum(x[0], y[0])
    e = e + (x[1] + y[1])
    return _quick_two_sum(s, e)


def neg(x):
    return -x[0], -x[1]


def sub(x, y):
    return add(x, neg(y))


def mul(x, y):
    p, e = _two_prod(x[0], y[0])
    e = e + (x[0] * y[1] + x[1] * y[0])
    return _quick_two_sum(p, e)


def div(x, y):
    q1 = x[0] / y[0]
    r = sub(x, mul(dd(q1), y))
    q2 = r[0] / y[0]
    r = sub(r, mul(dd(q2), y))
    q3 = r[0] / y[0]
    s, e = _quick_two_sum(q1, q2)
    return add((s, e), dd(q3))


def sqrt(x):
    """Componentwise square root; zeros pass through."""
    hi = np.sqrt(x[0])
    safe = np.where(hi > 0.0, hi, 1.0)
    # one Newton step in dd: y + (x - y^2) / (2 y)
    y = dd(safe)
    corr = div(sub(x, mul(y, y)), add(y, y))
    out_hi, out_lo = add(y, corr)
    zero = x[0] <= 0.0
    out_hi = np.where(zero, 0.0, out_hi)
    out_lo = np.where(zero, 0.0, out_lo)
    return out_hi, out_lo
