"""Error-free transformations and compensated accumulation.

All helpers are vectorised; they operate elementwise or along the last axis
so that each row of a batch is processed independently of the others.
"""

import numpy as np


def two_sum(a, b):
    """Knuth's TwoSum: ``a + b == s + e`` exactly, with ``s = fl(a + b)``."""
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def _fast_two_sum(a, b):
    # requires |a| >= |b|
    s = a + b
    return s, b - (s - a)


_SPLITTER = 134217729.0  # 2**27 + 1


def two_prod(a, b):
    """Dekker's product: ``a * b == p + e`` exactly (no overflow below ~1e290)."""
    p = a * b
    c = _SPLITTER * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLITTER * b
    bh = c - (c - b)
    bl = b - bh
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def dd_mul(hi, lo, b):
    """Double-double ``(hi, lo)`` times a double."""
    p, e = two_prod(hi, b)
    return _fast_two_sum(p, e + lo * b)


def dd_div(hi, lo, b):
    """Double-double ``(hi, lo)`` divided by a double."""
    q1 = hi / b
    p, e = two_prod(q1, b)
    s, t = two_sum(hi, -p)
    q2 = (s + ((t - e) + lo)) / b
    return _fast_two_sum(q1, q2)


def dd_add(hi, lo, b_hi, b_lo):
    """Sum of two double-double numbers."""
    s, e = two_sum(hi, b_hi)
    return _fast_two_sum(s, e + (lo + b_lo))


def compensated_cumsum(a, axis=-1):
    """Prefix sums with the rounding error of every addition fed back.

    The plain running sum is formed first; the exact error of each step is
    recovered with TwoSum and its own prefix sum is added at the end. The
    result is as accurate as if it were computed in twice the working
    precision, up to a final rounding.
    """
    a = np.asarray(a, dtype=float)
    a = np.moveaxis(a, axis, -1)
    s = np.cumsum(a, axis=-1)
    prev = np.zeros_like(s)
    prev[..., 1:] = s[..., :-1]
    _, err = two_sum(prev, a)
    out = s + np.cumsum(err, axis=-1)
    return np.moveaxis(out, -1, axis)


class NeumaierAccumulator:
    """Running elementwise sum of arrays with Neumaier compensation.

    >>> acc = NeumaierAccumulator(shape=())
    >>> for v in (1e16, 1.0, -1e16):
    ...     acc.add(v)
    >>> float(acc.value)
    1.0
    """

    def __init__(self, shape):
        self._sum = np.zeros(shape)
        self._comp = np.zeros(shape)

    def add(self, values):
        values = np.asarray(values, dtype=float)
        total = self._sum + values
        big = np.abs(self._sum) >= np.abs(values)
        self._comp += np.where(big, (self._sum - total) + values,
                               (values - total) + self._sum)
        self._sum = total

    @property
    def value(self):
        return self._sum + self._comp


def neumaier_sum(values, axis=-1):
    """Compensated sum along ``axis``."""
    values = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
    acc = NeumaierAccumulator(values.shape[:-1])
    for i in range(values.shape[-1]):
        acc.add(values[..., i])
    return acc.value
