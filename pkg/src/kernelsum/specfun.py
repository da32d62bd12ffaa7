"""Special functions behind the kernel formulas.

Gamma expressions are evaluated in log space and exponentiated last; the
hypergeometric series are summed with Neumaier compensation and refuse to
return a value when cancellation has destroyed it.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy import special

from .accumulate import NeumaierAccumulator, dd_add, dd_div, dd_mul
from .exceptions import ConvergenceError, DomainError

_EPS = np.finfo(float).eps

# largest tolerated ratio between the biggest series term and the result
CANCELLATION_LIMIT = 1e15

# relative error estimate above which hyp1f1_neg switches to extended precision
_HYP1F1_REL_TARGET = 1e-12
_SERIES_X_MAX = 700.0


@dataclass(frozen=True)
class SeriesTolerance:
    """Truncation control for the power series evaluators."""

    rel_tol: float = 1e-14
    max_terms: int = 10000

    def __post_init__(self):
        if not 0.0 < self.rel_tol < 1.0:
            raise ValueError(f"rel_tol must lie in (0, 1), got {self.rel_tol}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be >= 1, got {self.max_terms}")


DEFAULT_TOLERANCE = SeriesTolerance()


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _restore(arr, scalar):
    return float(arr) if scalar else arr


def _is_nonpositive_integer(v):
    return v <= 0 and float(v).is_integer()


def log_gamma(x):
    """Natural logarithm of the gamma function for positive arguments."""
    arr, scalar = _as_array(x)
    if np.any(~(arr > 0)):
        raise DomainError("log_gamma requires x > 0")
    return _restore(special.gammaln(arr), scalar)


# Stirling correction coefficients B_2k / (2k (2k - 1)), k = 1..5
_STIRLING = (1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188)
_STIRLING_MIN = 30.0


def _stirling_correction(x):
    inv2 = 1.0 / (x * x)
    acc = np.zeros_like(x)
    for c in reversed(_STIRLING):
        acc = acc * inv2 + c
    return acc / x


def log_gamma_diff(a, b):
    """``log Gamma(a) - log Gamma(b)`` without cancellation for large a, b.

    Subtracting two large ``gammaln`` values leaves an absolute error of a
    few ulps of the operands (about 1e-12 near 500). For a, b >= 30 the
    Stirling expansion is differenced term by term instead.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    shape = np.broadcast_shapes(a.shape, b.shape)
    a = np.broadcast_to(a, shape).ravel()
    b = np.broadcast_to(b, shape).ravel()
    out = special.gammaln(a) - special.gammaln(b)
    big = (a >= _STIRLING_MIN) & (b >= _STIRLING_MIN)
    if np.any(big):
        ab, bb = a[big], b[big]
        h = ab - bb
        out[big] = ((bb - 0.5) * np.log1p(h / bb) + h * (np.log(ab) - 1.0)
                    + _stirling_correction(ab) - _stirling_correction(bb))
    return out.reshape(shape)


def gamma_ratio(a, b):
    """``Gamma(a) / Gamma(b)``, exponentiated from a log-space difference.

    >>> round(gamma_ratio(2, 1.5) ** 2 * math.pi, 12)
    4.0
    """
    a_arr, a_scalar = _as_array(a)
    b_arr, b_scalar = _as_array(b)
    if np.any(~(a_arr > 0)) or np.any(~(b_arr > 0)):
        raise DomainError("gamma_ratio requires positive arguments")
    out = np.exp(log_gamma_diff(a_arr, b_arr))
    return _restore(out, a_scalar and b_scalar)


def _series(numer, denom, x, tol, first_term=None):
    """Sum ``sum_n prod (numer)_n / prod (denom)_n * x**n / n!`` elementwise.

    Returns ``(value, largest_abs_term, converged_mask)``. Terms are updated
    multiplicatively; ``first_term`` scales the n = 0 term (defaults to 1).
    """
    x = np.asarray(x, dtype=float)
    term = np.ones_like(x) if first_term is None else np.array(first_term, dtype=float)
    acc = NeumaierAccumulator(x.shape)
    acc.add(term)
    biggest = np.abs(term)
    small_run = np.zeros(x.shape, dtype=int)
    active = np.ones(x.shape, dtype=bool)
    for n in range(tol.max_terms):
        ratio = x / (n + 1.0)
        for a in numer:
            ratio = ratio * (a + n)
        for b in denom:
            ratio = ratio / (b + n)
        term = np.where(active, term * ratio, 0.0)
        acc.add(term)
        biggest = np.maximum(biggest, np.abs(term))
        total = acc.value
        tiny = np.abs(term) <= tol.rel_tol * np.abs(total)
        small_run = np.where(tiny, small_run + 1, 0)
        active &= small_run < 3
        if not active.any():
            break
    return acc.value, biggest, ~active


# beyond this the double-double term products may overflow in the splitting
_DD_X_MAX = 600.0
# unit roundoff of double-double arithmetic, 2**-104
_DD_EPS = 4.93e-32


def _series_dd(numer, denom, x, max_terms):
    """``_series`` in double-double arithmetic (about 32 digits).

    Returns ``(value, largest_abs_term, terms_used, converged_mask)``.
    """
    x = np.asarray(x, dtype=float)
    s_hi, s_lo = np.ones_like(x), np.zeros_like(x)
    t_hi, t_lo = np.ones_like(x), np.zeros_like(x)
    biggest = np.ones_like(x)
    small_run = np.zeros(x.shape, dtype=int)
    active = np.ones(x.shape, dtype=bool)
    n = 0
    for n in range(max_terms):
        t_hi, t_lo = dd_mul(t_hi, t_lo, x)
        for a in numer:
            t_hi, t_lo = dd_mul(t_hi, t_lo, a + n)
        for b in denom:
            t_hi, t_lo = dd_div(t_hi, t_lo, b + n)
        t_hi, t_lo = dd_div(t_hi, t_lo, n + 1.0)
        t_hi = np.where(active, t_hi, 0.0)
        t_lo = np.where(active, t_lo, 0.0)
        s_hi, s_lo = dd_add(s_hi, s_lo, t_hi, t_lo)
        biggest = np.maximum(biggest, np.abs(t_hi))
        tiny = np.abs(t_hi) <= 1e-18 * np.abs(s_hi)
        small_run = np.where(tiny, small_run + 1, 0)
        active &= small_run < 3
        if not active.any():
            break
    return s_hi + s_lo, biggest, n + 1, ~active


def hyp1f1_neg(a, b, x, tol=DEFAULT_TOLERANCE, abs_tol=None):
    """Confluent hypergeometric function at a negative argument, 1F1(a; b; -x).

    Evaluated through Kummer's transformation
    ``1F1(a; b; -x) = exp(-x) 1F1(b - a; b; x)`` with the exponential folded
    into the first term. Where the remaining alternating prefix still cancels
    badly (large ``a - b`` together with large ``x``), the affected entries
    are recomputed in extended precision.

    Parameters
    ----------
    a, b : float
        Series parameters; ``b`` must not be a non-positive integer.
    x : float or ndarray
        Non-negative argument (the function is evaluated at ``-x``).
    tol : SeriesTolerance
    abs_tol : float, optional
        Accept double precision results whose estimated absolute error is
        below this value instead of demanding full relative accuracy.

    Raises
    ------
    ConvergenceError
        If the series does not settle within ``tol.max_terms`` terms; the
        partial value is attached.
    """
    if _is_nonpositive_integer(b):
        raise DomainError("b must not be a non-positive integer")
    arr, scalar = _as_array(x)
    if np.any(~(arr >= 0)):
        raise DomainError("hyp1f1_neg requires x >= 0")
    if a == b:
        return _restore(np.exp(-arr), scalar)
    # beyond this exp(-x) underflows and the series needs ~x terms
    far = arr > _SERIES_X_MAX
    xs = np.where(far, 0.0, arr)
    value, biggest, converged = _series([b - a], [b], xs, tol, first_term=np.exp(-xs))
    if not converged.all():
        raise ConvergenceError(
            f"1F1({a}; {b}; -x) did not converge within {tol.max_terms} terms",
            partial=_restore(value, scalar),
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        rel_err = _EPS * biggest / np.abs(value)
    ok = rel_err <= _HYP1F1_REL_TARGET
    if abs_tol is not None:
        ok |= _EPS * biggest <= abs_tol
    bad = (far | ~ok).reshape(-1)
    if bad.any():
        value = np.array(value, dtype=float).reshape(-1)
        flat_x = arr.reshape(-1)
        flat_big = np.asarray(biggest, dtype=float).reshape(-1)
        # second attempt: the same Kummer series in double-double arithmetic;
        # exp(-x) scales every term and is applied once at the end
        retry = np.flatnonzero(bad & (flat_x <= _DD_X_MAX))
        if retry.size:
            xr = flat_x[retry]
            # terms beyond the double range turn into nan and fall through
            with np.errstate(over="ignore", invalid="ignore"):
                s_dd, big_dd, n_dd, conv = _series_dd([b - a], [b], xr, tol.max_terms)
            with np.errstate(divide="ignore", invalid="ignore"):
                err = n_dd * _DD_EPS * big_dd / np.abs(s_dd)
            good = conv & (err <= 1e-3 * _HYP1F1_REL_TARGET)
            if abs_tol is not None:
                good |= conv & (n_dd * _DD_EPS * big_dd * np.exp(-xr) <= abs_tol)
            value[retry[good]] = np.exp(-xr[good]) * s_dd[good]
            bad[retry[good]] = False
        for i in np.flatnonzero(bad):
            digits = 20 + int(math.log10(max(flat_big[i], 1.0)))
            try:
                with mpmath.workdps(digits):
                    # results below 2**-1100 underflow in double anyway; this
                    # lets exact zeros such as 1F1(3/2; 1/2; -1/2) terminate
                    exact = mpmath.hyp1f1(a, b, -float(flat_x[i]), maxprec=20000,
                                          maxterms=10**6, zeroprec=1100)
            except (ValueError, mpmath.libmp.NoConvergence) as exc:
                raise ConvergenceError(
                    f"1F1({a}; {b}; -{flat_x[i]}) failed in extended precision",
                    partial=float(value[i]),
                ) from exc
            value[i] = float(exact)
        value = value.reshape(arr.shape)
    return _restore(value, scalar)


def hyp1f2_raw(a, b, c, x, tol=DEFAULT_TOLERANCE):
    """Series value of 1F2(a; b, c; x) together with its largest term.

    No cancellation check is made; ``hyp1f2`` is the guarded entry point.
    """
    if _is_nonpositive_integer(b) or _is_nonpositive_integer(c):
        raise DomainError("b and c must not be non-positive integers")
    arr, scalar = _as_array(x)
    if np.any(~np.isfinite(arr)):
        raise DomainError("hyp1f2 requires a finite argument")
    value, biggest, converged = _series([a], [b, c], arr, tol)
    if not converged.all():
        raise ConvergenceError(
            f"1F2({a}; {b}, {c}; x) did not converge within {tol.max_terms} terms",
            partial=_restore(value, scalar),
        )
    return _restore(value, scalar), _restore(biggest, scalar)


def hyp1f2(a, b, c, x, tol=DEFAULT_TOLERANCE):
    """Generalized hypergeometric function 1F2(a; b, c; x) from its series.

    The series is summed with compensation. If the largest term exceeds
    ``CANCELLATION_LIMIT`` times the result the value is meaningless and a
    ``ConvergenceError`` is raised instead.
    """
    value, biggest = hyp1f2_raw(a, b, c, x, tol)
    if np.any(biggest > CANCELLATION_LIMIT * np.abs(value)):
        raise ConvergenceError(
            f"1F2({a}; {b}, {c}; x) lost all digits to cancellation",
            partial=value,
        )
    return value


_H_HALF = 2.0 - 2.0 * math.log(2.0)


def harmonic(x):
    """Harmonic number ``H_x = int_0^1 (1 - t**x) / (1 - t) dt`` for x >= 0."""
    x = float(x)
    if x < 0 or not math.isfinite(x):
        raise DomainError("harmonic requires a finite x >= 0")
    if x.is_integer():
        return math.fsum(1.0 / k for k in range(1, int(x) + 1))
    if (2 * x).is_integer():
        m = int(x - 0.5)
        return math.fsum([_H_HALF] + [1.0 / (k + 0.5) for k in range(1, m + 1)])
    return float(special.digamma(x + 1.0) + np.euler_gamma)


def matern_halfint_F(p, beta, x):
    """Matern basis function with smoothness ``p + 1/2`` in closed form.

    ``exp(-sqrt(2p+1) x / beta) * p!/(2p)! * sum_n (p+n)!/(n!(p-n)!) u**(p-n)``
    with ``u = 2 sqrt(2p+1) x / beta``; equals 1 at x = 0.
    """
    p = int(p)
    if p < 0:
        raise DomainError("p must be a non-negative integer")
    if not beta > 0:
        raise DomainError("beta must be positive")
    arr, scalar = _as_array(x)
    if np.any(~(arr >= 0)):
        raise DomainError("matern_halfint_F requires x >= 0")
    rate = math.sqrt(2 * p + 1) / beta
    u = 2.0 * rate * arr
    # Horner over descending powers of u: coefficient of u**(p-n) is c_n,
    # formed as an exact rational so that c_p = 1
    poly = np.zeros_like(arr)
    for n in range(p + 1):
        c_n = Fraction(math.factorial(p) * math.factorial(p + n),
                       math.factorial(2 * p) * math.factorial(n) * math.factorial(p - n))
        poly = poly * u + float(c_n)
    return _restore(np.exp(-rate * arr) * poly, scalar)
