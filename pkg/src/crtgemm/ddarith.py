"""Double-double building blocks (error-free transformations).

All routines operate elementwise on float64 scalars or ndarrays and use a
fixed sequence of IEEE operations, so results are identical for any
execution schedule.  A double-double value is an unevaluated sum hi + lo
with |lo| <= ulp(hi)/2 after normalization.
"""

import numpy as np

# Dekker splitting constant, 2^27 + 1.
_SPLITTER = 134217729.0


def two_sum(a, b):
    """Knuth branch-free EFT: returns (s, e) with s = fl(a+b), s + e = a + b."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def quick_two_sum(a, b):
    """Fast EFT valid when |a| >= |b|: returns (s, e) with s + e = a + b."""
    s = a + b
    e = b - (s - a)
    return s, e


def split(a):
    """Dekker split of a double into high and low 26-bit halves."""
    c = _SPLITTER * a
    hi = c - (c - a)
    lo = a - hi
    return hi, lo


def two_prod(a, b):
    """EFT product: returns (p, e) with p = fl(a*b), p + e = a*b exactly."""
    p = a * b
    ahi, alo = split(a)
    bhi, blo = split(b)
    e = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, e


def dd_add(ahi, alo, bhi, blo):
    """Accurate double-double addition, normalized output."""
    s1, s2 = two_sum(ahi, bhi)
    t1, t2 = two_sum(alo, blo)
    s2 = s2 + t1
    s1, s2 = quick_two_sum(s1, s2)
    s2 = s2 + t2
    return quick_two_sum(s1, s2)


def dd_add_d(ahi, alo, b):
    """Double-double plus plain double, normalized output."""
    s1, s2 = two_sum(ahi, b)
    s2 = s2 + alo
    return quick_two_sum(s1, s2)


def dd_mul_d(ahi, alo, b):
    """Double-double times plain double, normalized output."""
    p1, p2 = two_prod(ahi, b)
    p2 = p2 + alo * b
    return quick_two_sum(p1, p2)


def dd_neg(hi, lo):
    return -hi, -lo


def dd_to_double(hi, lo):
    """Collapse to the nearest double (single rounding of hi + lo)."""
    return hi + lo
