"""Kernel catalog: radial profiles F, their one-dimensional counterparts f
and Fourier coefficient sets for the periodized counterparts.

A radial kernel ``K(x, y) = F(||x - y||)`` on R^d is the average over the
unit sphere of the one-dimensional kernel ``f(|<xi, x - y>|)``. The pair is
linked by

    F(s) = 2 Gamma(d/2) / (sqrt(pi) Gamma((d-1)/2)) * int_0^1 f(ts) (1-t^2)^((d-3)/2) dt,

which ``slice_transform_numeric`` evaluates by quadrature.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import mpmath
import numpy as np
from scipy import integrate

from . import specfun
from .exceptions import ConfigurationError, ConvergenceError, DomainError

FAMILIES = ("gaussian", "laplacian", "matern", "negdist", "riesz", "thinplate")

_PARAM_NAMES = {
    "gaussian": ("sigma",),
    "laplacian": ("alpha",),
    "matern": ("p", "beta"),
    "negdist": (),
    "riesz": ("r",),
    "thinplate": (),
}

# largest tolerated ratio between the two Matern pieces and their difference
PIECE_CANCELLATION_LIMIT = 1e8
# stricter limit used when extended precision is available as a fallback
_EXTENDED_LIMIT = 1e4


@dataclass(frozen=True)
class KernelSpec:
    """Radial kernel family with its parameters and the ambient dimension.

    Use the classmethod constructors, e.g. ``KernelSpec.gaussian(1.0, d=50)``.
    """

    family: str
    d: int
    sigma: Optional[float] = None
    alpha: Optional[float] = None
    p: Optional[int] = None
    beta: Optional[float] = None
    r: Optional[float] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown kernel family {self.family!r}")
        if int(self.d) != self.d or self.d < 1:
            raise DomainError(f"d must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        needed = _PARAM_NAMES[self.family]
        for name in ("sigma", "alpha", "p", "beta", "r"):
            value = getattr(self, name)
            if name in needed and value is None:
                raise DomainError(f"{self.family} kernel needs parameter {name}")
            if name not in needed and value is not None:
                raise DomainError(f"{self.family} kernel takes no parameter {name}")
        for name in ("sigma", "alpha", "beta"):
            value = getattr(self, name)
            if value is not None:
                if not (math.isfinite(value) and value > 0):
                    raise DomainError(f"{name} must be positive, got {value}")
                object.__setattr__(self, name, float(value))
        if self.p is not None:
            if int(self.p) != self.p or self.p < 0:
                raise DomainError(f"p must be a non-negative integer, got {self.p}")
            object.__setattr__(self, "p", int(self.p))
        if self.r is not None:
            if not 0 < self.r < 2:
                raise DomainError(f"r must lie in (0, 2), got {self.r}")
            object.__setattr__(self, "r", float(self.r))

    @classmethod
    def gaussian(cls, sigma, d):
        return cls("gaussian", d, sigma=sigma)

    @classmethod
    def laplacian(cls, alpha, d):
        return cls("laplacian", d, alpha=alpha)

    @classmethod
    def matern(cls, p, beta, d):
        """Matern kernel with smoothness ``nu = p + 1/2`` and length scale ``beta``."""
        return cls("matern", d, p=p, beta=beta)

    @classmethod
    def negdist(cls, d):
        return cls("negdist", d)

    @classmethod
    def riesz(cls, r, d):
        return cls("riesz", d, r=r)

    @classmethod
    def thinplate(cls, d):
        return cls("thinplate", d)

    @property
    def params(self):
        """Family parameters as an ordered dict."""
        return {name: getattr(self, name) for name in _PARAM_NAMES[self.family]}

    @property
    def nu(self):
        if self.family == "matern":
            return self.p + 0.5
        if self.family == "laplacian":
            return 0.5
        return None

    def with_dimension(self, d):
        return KernelSpec(self.family, d, **self.params)

    def describe(self):
        """Compact text form such as ``gaussian(sigma=1)``; parsed by ``from_description``."""
        inner = ";".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.family}({inner})"

    @classmethod
    def from_description(cls, text, d):
        family, _, rest = text.partition("(")
        params = {}
        for item in filter(None, rest.rstrip(")").split(";")):
            key, _, value = item.partition("=")
            params[key] = int(value) if key == "p" else float(value)
        return cls(family, d, **params)


@dataclass(frozen=True)
class PowerSeries:
    """Polynomial ``sum_n a_n x**n`` standing for a globally convergent series."""

    coefficients: tuple
    radius: str = "global"

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if not all(math.isfinite(c) for c in coeffs):
            raise DomainError("power series coefficients must be finite")
        object.__setattr__(self, "coefficients", coeffs)

    def __len__(self):
        return len(self.coefficients)

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), self.coefficients)


def _check_s(s):
    arr = np.asarray(s, dtype=float)
    if np.any(~(arr >= 0)):
        raise DomainError("kernel profiles are evaluated at s >= 0")
    return arr, arr.ndim == 0


def _restore(arr, scalar):
    return float(arr) if scalar else arr


def negdist_constant(d):
    """``c_d = sqrt(pi) Gamma((d+1)/2) / Gamma(d/2)``, the slope of the 1D negative distance."""
    return math.sqrt(math.pi) * specfun.gamma_ratio((d + 1) / 2.0, d / 2.0)


def riesz_constant(r, d):
    return math.sqrt(math.pi) * math.exp(
        float(specfun.log_gamma_diff((d + r) / 2.0, d / 2.0)) - specfun.log_gamma((r + 1) / 2.0))


def thin_plate_C(d):
    """Constant ``C = -(d/2)(H_{d/2} - 2 + ln 4)`` of the sliced thin plate spline."""
    if int(d) != d or d < 1:
        raise DomainError("d must be a positive integer")
    return -(d / 2.0) * (specfun.harmonic(d / 2.0) - 2.0 + math.log(4.0))


def eval_F(spec: KernelSpec, s):
    """Radial profile ``F(s)`` of the d-dimensional kernel."""
    arr, scalar = _check_s(s)
    fam = spec.family
    if fam == "gaussian":
        out = np.exp(-arr**2 / (2.0 * spec.sigma**2))
    elif fam == "laplacian":
        out = np.exp(-spec.alpha * arr)
    elif fam == "matern":
        out = specfun.matern_halfint_F(spec.p, spec.beta, arr)
    elif fam == "negdist":
        out = -arr
    elif fam == "riesz":
        out = -arr**spec.r
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(arr > 0, arr**2 * np.log(np.where(arr > 0, arr, 1.0)), 0.0)
    return _restore(np.asarray(out, dtype=float), scalar)


def eval_dF(spec: KernelSpec, s):
    """Derivative ``F'(s)``, analytic for every family (s > 0 where F has a kink at 0)."""
    arr, scalar = _check_s(s)
    fam = spec.family
    if fam == "gaussian":
        out = -arr / spec.sigma**2 * np.exp(-arr**2 / (2.0 * spec.sigma**2))
    elif fam == "laplacian":
        out = -spec.alpha * np.exp(-spec.alpha * arr)
    elif fam == "matern":
        p = spec.p
        rate = math.sqrt(2 * p + 1) / spec.beta
        u = 2.0 * rate * arr
        log_pre = math.lgamma(p + 1) - math.lgamma(2 * p + 1)
        poly = np.zeros_like(arr)
        dpoly = np.zeros_like(arr)
        for n in range(p + 1):
            c_n = math.exp(log_pre + math.lgamma(p + n + 1) - math.lgamma(n + 1)
                           - math.lgamma(p - n + 1))
            dpoly = dpoly * u + poly
            poly = poly * u + c_n
        out = np.exp(-rate * arr) * (2.0 * rate * dpoly - rate * poly)
    elif fam == "negdist":
        out = -np.ones_like(arr)
    elif fam == "riesz":
        with np.errstate(divide="ignore"):
            out = -spec.r * arr ** (spec.r - 1.0)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(arr > 0, 2.0 * arr * np.log(np.where(arr > 0, arr, 1.0)) + arr, 0.0)
    return _restore(np.asarray(out, dtype=float), scalar)


def _matern_log_coef(nu, beta, d):
    """Sign and log magnitude of the factor in front of ``x^(2 nu)``."""
    p = int(nu - 0.5)
    # Gamma(1 - nu) = Gamma(1/2 - p) = (-1)^p pi / Gamma(p + 1/2)
    sign = -1.0 if p % 2 else 1.0
    log_coef = (math.log(math.pi) - math.lgamma(p + 0.5) + math.lgamma(nu + d / 2.0)
                + nu * math.log(2.0 * nu) - math.lgamma(d / 2.0) - math.lgamma(2.0 * nu + 1.0)
                - 2.0 * nu * math.log(beta))
    return sign, log_coef


def _matern_f_mp(nu, beta, d, x, digits):
    # every constant in working precision; a double-precision prefactor
    # would reintroduce the cancellation error
    with mpmath.workdps(digits):
        nu = mpmath.mpf(nu)
        half_d = mpmath.mpf(d) / 2
        beta = mpmath.mpf(beta)
        x = mpmath.mpf(x)
        z = nu * x**2 / (2 * beta**2)
        first = mpmath.hyp1f2(half_d, mpmath.mpf(1) / 2, 1 - nu, z)
        second = mpmath.hyp1f2(nu + half_d, nu + mpmath.mpf(1) / 2, nu + 1, z)
        coef = (mpmath.gamma(1 - nu) * mpmath.gamma(nu + half_d) * (2 * nu) ** nu
                / (mpmath.gamma(half_d) * mpmath.gamma(2 * nu + 1) * beta ** (2 * nu)))
        return float(first - coef * x ** (2 * nu) * second)


def _matern_f(nu, beta, d, x, tol, extended=False):
    """1D counterpart of the Matern kernel with smoothness ``nu = p + 1/2``.

    Difference of two 1F2 series. Where cancellation leaves fewer than about
    eight correct digits the entries are either recomputed in extended
    precision (``extended=True``) or a ``ConvergenceError`` is raised.
    """
    z = nu * x**2 / (2.0 * beta**2)
    first, big1 = specfun.hyp1f2_raw(d / 2.0, 0.5, 1.0 - nu, z, tol)
    second, big2 = specfun.hyp1f2_raw(nu + d / 2.0, nu + 0.5, nu + 1.0, z, tol)
    sign, log_coef = _matern_log_coef(nu, beta, d)
    with np.errstate(divide="ignore"):
        factor = sign * np.exp(log_coef + 2.0 * nu * np.log(x))
    factor = np.where(x > 0, factor, 0.0)
    piece = factor * second
    out = first - piece
    # largest magnitude entering the difference, term by term
    scale = np.maximum(big1, np.abs(factor) * big2)
    limit = _EXTENDED_LIMIT if extended else PIECE_CANCELLATION_LIMIT
    bad = ~(scale <= limit * np.maximum(np.abs(out), 1.0))
    if bad.any():
        if not extended:
            raise ConvergenceError(
                "Matern counterpart lost its digits to cancellation; argument too large",
                partial=out,
            )
        out = np.array(out, dtype=float).reshape(-1)
        flat_x = np.asarray(x).reshape(-1)
        flat_scale = np.asarray(scale).reshape(-1)
        for i in np.flatnonzero(np.asarray(bad).reshape(-1)):
            digits = 25 + int(math.log10(max(flat_scale[i], 1.0)))
            out[i] = _matern_f_mp(nu, beta, d, flat_x[i], digits)
        out = out.reshape(np.shape(x))
    return out


def eval_f(spec: KernelSpec, s, tol=specfun.DEFAULT_TOLERANCE, extended=False, abs_tol=None):
    """One-dimensional counterpart ``f(s)`` with ``F = S_d f``.

    Parameters
    ----------
    spec : KernelSpec
    s : float or ndarray
        Non-negative arguments.
    tol : SeriesTolerance
    extended : bool
        For the Laplacian and Matern families, recompute entries whose 1F2
        difference cancels too strongly in extended precision instead of
        raising ``ConvergenceError``.
    abs_tol : float, optional
        Gaussian only: accept values with this absolute accuracy instead of
        full relative accuracy, which avoids extended precision where f is
        tiny. Useful for reference sums.
    """
    arr, scalar = _check_s(s)
    fam, d = spec.family, spec.d
    if d == 1 and fam in ("laplacian", "matern"):
        # slicing is the identity in one dimension
        return eval_F(spec, s)
    if fam == "gaussian":
        out = specfun.hyp1f1_neg(d / 2.0, 0.5, arr**2 / (2.0 * spec.sigma**2), tol, abs_tol)
    elif fam == "laplacian":
        out = _matern_f(0.5, 1.0 / spec.alpha, d, arr, tol, extended)
    elif fam == "matern":
        out = _matern_f(spec.p + 0.5, spec.beta, d, arr, tol, extended)
    elif fam == "negdist":
        out = -negdist_constant(d) * arr
    elif fam == "riesz":
        out = -riesz_constant(spec.r, d) * arr**spec.r
    else:
        C = thin_plate_C(d)
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.log(np.where(arr > 0, arr, 1.0))
        out = d * arr**2 * logs - C * arr**2
    return _restore(np.asarray(out, dtype=float), scalar)


def laplace_smooth_f(alpha, d, s, tol=specfun.DEFAULT_TOLERANCE, extended=False):
    """Counterpart of the smooth kernel ``exp(-alpha r) + alpha r``."""
    arr, scalar = _check_s(s)
    out = eval_f(KernelSpec.laplacian(alpha, d), arr, tol, extended) + alpha * negdist_constant(d) * arr
    return _restore(np.asarray(out, dtype=float), scalar)


def series_transform(a: PowerSeries, d: int) -> PowerSeries:
    """Map the Taylor coefficients of F to those of f.

    ``b_n = sqrt(pi) Gamma((n+d)/2) / (Gamma(d/2) Gamma((n+1)/2)) * a_n``.
    """
    if int(d) != d or d < 1:
        raise DomainError("d must be a positive integer")
    n = np.arange(len(a))
    log_ratio = (0.5 * math.log(math.pi) + specfun.log_gamma_diff((n + d) / 2.0, d / 2.0)
                 - specfun.log_gamma((n + 1) / 2.0))
    return PowerSeries(tuple(np.exp(log_ratio) * np.asarray(a.coefficients)))


def slice_transform_numeric(f: Callable, d: int, s: float, abs_tol: float = 1e-9) -> float:
    """Quadrature value of ``S_d f`` at ``s``.

    With ``t = sin(theta)`` the weight ``(1 - t^2)^((d-3)/2) dt`` becomes
    ``cos(theta)^(d-2) dtheta``, which removes the endpoint singularity for
    d = 2.
    """
    if int(d) != d or d < 2:
        raise DomainError("slice_transform_numeric needs d >= 2")
    if not s >= 0:
        raise DomainError("s must be non-negative")
    log_norm = (math.log(2.0) - 0.5 * math.log(math.pi)
                + float(specfun.log_gamma_diff(d / 2.0, (d - 1) / 2.0)))
    norm = math.exp(log_norm)

    def integrand(theta):
        return float(f(s * math.sin(theta))) * math.cos(theta) ** (d - 2)

    value, err = integrate.quad(integrand, 0.0, math.pi / 2.0, epsabs=abs_tol / (10 * norm),
                                epsrel=1e-12, limit=400)
    if norm * err > abs_tol:
        raise ConvergenceError(f"quadrature error estimate {norm * err:.2e} exceeds {abs_tol}",
                               partial=norm * value)
    return norm * value


def d3_counterpart(F: Callable, s, dF: Optional[Callable] = None):
    """``F(s) + s F'(s)``, the counterpart of F for d = 3.

    Without ``dF`` the derivative is taken by a fourth-order central
    difference.
    """
    s = np.asarray(s, dtype=float)
    if dF is not None:
        deriv = np.asarray(dF(s), dtype=float)
    else:
        h = 1e-3 * np.maximum(np.abs(s), 1.0)
        deriv = (-F(s + 2 * h) + 8 * F(s + h) - 8 * F(s - h) + F(s - 2 * h)) / (12 * h)
    out = np.asarray(F(s), dtype=float) + s * deriv
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Fourier coefficients


@dataclass(frozen=True, eq=False)
class FourierCoeffSet:
    """Symmetric set of integer frequencies with real, even coefficients.

    The coefficients represent ``phi(u) = sum_k c_k exp(2 pi i k u)`` on the
    rescaled axis ``u = tau * (x - shift)``, i.e. the counterpart evaluated at
    ``|u| / tau``.
    """

    freqs: np.ndarray
    coeffs: np.ndarray
    tau: float = 1.0
    shift: float = 0.0
    built_for: Optional[KernelSpec] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        freqs = np.array(self.freqs, dtype=np.int64).reshape(-1)
        coeffs = np.array(self.coeffs, dtype=float).reshape(-1)
        if freqs.shape != coeffs.shape:
            raise DomainError("freqs and coeffs differ in length")
        order = np.argsort(freqs, kind="stable")
        freqs, coeffs = freqs[order], coeffs[order]
        if np.any(np.diff(freqs) == 0):
            raise DomainError("duplicate frequencies")
        if not np.array_equal(freqs, -freqs[::-1]):
            raise DomainError("frequency set is not symmetric")
        if not np.array_equal(coeffs, coeffs[::-1]):
            raise DomainError("coefficients at k and -k differ")
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise DomainError("tau must be positive")
        freqs.setflags(write=False)
        coeffs.setflags(write=False)
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "shift", float(self.shift))

    def __len__(self):
        return len(self.freqs)

    @property
    def K(self):
        return int(self.freqs[-1]) if len(self.freqs) else 0

    @property
    def is_band(self):
        """True when the frequencies are exactly ``-K, ..., K``."""
        return np.array_equal(self.freqs, np.arange(-self.K, self.K + 1))

    def nonnegative(self):
        """Frequencies ``k >= 0`` with their coefficients."""
        mask = self.freqs >= 0
        return self.freqs[mask], self.coeffs[mask]

    def evaluate(self, u):
        """Truncated series ``sum_k c_k exp(2 pi i k u)`` (real since c is even)."""
        u = np.asarray(u, dtype=float)
        ks, cs = self.nonnegative()
        out = np.zeros_like(u)
        for k, c in zip(ks, cs):
            out += (c if k == 0 else 2.0 * c) * np.cos(2.0 * np.pi * k * u)
        return out

    def _header(self):
        spec = self.built_for
        return {
            "family": spec.family if spec else "",
            "params": spec.describe() if spec else "",
            "d": str(spec.d) if spec else "",
            "tau": format(self.tau, ".17g"),
            "shift": format(self.shift, ".17g"),
            "K": str(self.K),
        }

    def to_csv(self, path):
        """Write ``# key=value`` header lines followed by ``k,c_k`` rows."""
        with open(path, "w", newline="") as fh:
            for key, value in self._header().items():
                fh.write(f"# {key}={value}\n")
            writer = csv.writer(fh)
            writer.writerow(["k", "c_k"])
            for k, c in zip(self.freqs, self.coeffs):
                writer.writerow([int(k), format(float(c), ".17g")])

    @classmethod
    def from_csv(cls, path):
        header = {}
        rows = []
        with open(path, newline="") as fh:
            for line in fh:
                if line.startswith("#"):
                    key, _, value = line[1:].strip().partition("=")
                    header[key] = value
                elif line.strip() and not line.startswith("k,"):
                    k, c = line.strip().split(",")
                    rows.append((int(k), float(c)))
        return cls._from_parts(header, [r[0] for r in rows], [r[1] for r in rows])

    def to_npz(self, path):
        np.savez(path, freqs=self.freqs, coeffs=self.coeffs,
                 header=np.array(list(self._header().items())))

    @classmethod
    def from_npz(cls, path):
        with np.load(path) as data:
            header = dict(data["header"].tolist())
            return cls._from_parts(header, data["freqs"], data["coeffs"])

    @classmethod
    def _from_parts(cls, header, freqs, coeffs):
        spec = None
        if header.get("params"):
            spec = KernelSpec.from_description(header["params"], int(header["d"]))
        return cls(freqs, coeffs, tau=float(header["tau"]), shift=float(header["shift"]),
                   built_for=spec)


def gaussian_fourier_coeff(sigma, d, k):
    """Fourier transform of the Gaussian counterpart at integer frequency ``k``.

    ``c_k = d pi sigma exp(-2 pi^2 sigma^2 k^2) (2 pi^2 sigma^2 k^2)^((d-1)/2)
    / (sqrt(2) Gamma((d+2)/2))``, assembled in log space.
    """
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    k = np.asarray(k, dtype=float)
    q = 2.0 * math.pi**2 * sigma**2 * k**2
    base = (math.log(d * math.pi * sigma) - 0.5 * math.log(2.0)
            - specfun.log_gamma((d + 2) / 2.0))
    if d == 1:
        log_c = base - q
    else:
        with np.errstate(divide="ignore"):
            log_c = base - q + 0.5 * (d - 1) * np.log(q)
    out = np.exp(log_c)
    return float(out) if out.ndim == 0 else out


def gaussian_peak_frequency(sigma, d):
    """Stationary point ``sqrt(d - 1) / (2 pi sigma)`` of the coefficient profile."""
    return math.sqrt(d - 1) / (2.0 * math.pi * sigma)


def select_coeff_set(sigma, d, eps=1e-10, k_max=None, *, tau=1.0, shift=0.0,
                     built_for=None):
    """Thresholded Gaussian coefficient set ``{k : |k| <= K_max, c_k > eps * max c}``.

    Parameters
    ----------
    sigma : float
        Bandwidth on the rescaled axis (``tau * sigma`` for data rescaled by tau).
    d : int
    eps : float
        Threshold relative to the peak coefficient. Zero keeps every
        non-zero coefficient up to ``k_max``.
    k_max : int, optional
        Largest admissible frequency. By default the outward scan from the
        peak stops at the first coefficient below the threshold.
    """
    if eps < 0:
        raise DomainError("eps must be non-negative")
    k_star = gaussian_peak_frequency(sigma, d)
    cand = np.array([math.floor(k_star), math.ceil(k_star)])
    peak = float(np.max(gaussian_fourier_coeff(sigma, d, cand)))
    threshold = eps * peak
    if k_max is None:
        if peak == 0:
            raise ConfigurationError("peak coefficient underflows")
        # c_k is unimodal in |k|; scan outward from the peak in blocks
        start = int(math.ceil(k_star))
        step = max(64, int(4.0 / sigma))
        k_max = None
        while k_max is None:
            block = np.arange(start, start + step)
            below = np.flatnonzero(gaussian_fourier_coeff(sigma, d, block) <= threshold)
            if below.size:
                k_max = int(block[below[0]]) - 1
            start += step
        k_max = max(k_max, int(math.ceil(k_star)))
    ks = np.arange(0, int(k_max) + 1)
    cs = gaussian_fourier_coeff(sigma, d, ks)
    keep = (cs > threshold) & (cs > 0)
    if not keep.any():
        raise ConfigurationError(
            f"empty coefficient set (eps={eps}, k_max={k_max}, peak at k={k_star:.1f})")
    ks, cs = ks[keep], cs[keep]
    neg = ks > 0
    freqs = np.concatenate([-ks[neg][::-1], ks])
    coeffs = np.concatenate([cs[neg][::-1], cs])
    return FourierCoeffSet(freqs, coeffs, tau=tau, shift=shift, built_for=built_for,
                           meta={"eps": eps, "k_max": int(k_max)})


def numeric_fourier_coeffs(profile, tau, K, grid_size=None, *, shift=0.0):
    """Fourier coefficients of the periodized profile from equispaced samples.

    Parameters
    ----------
    profile : KernelSpec or callable
        For a spec the sampled function is ``phi(u) = f(|u| / tau)`` with the
        Laplacian replaced by its smooth part ``exp(-alpha r) + alpha r``.
        A callable is used as ``phi`` on ``[-1/2, 1/2)`` directly.
    tau : float
        Rescaling factor the coefficients are built for.
    K : int
        Coefficients are returned for ``|k| <= K``.
    grid_size : int, optional
        Power of two, at least ``8 K``; defaults to the smallest such.

    Returns
    -------
    FourierCoeffSet
        Band ``-K..K``; zeros are kept so the set stays contiguous.
    """
    K = int(K)
    if K < 0:
        raise DomainError("K must be non-negative")
    if grid_size is None:
        grid_size = max(64, 1 << max(0, (8 * K - 1)).bit_length())
    if grid_size < 8 * K or grid_size & (grid_size - 1):
        raise ConfigurationError("grid_size must be a power of two >= 8K")
    u = -0.5 + np.arange(grid_size) / grid_size
    spec = None
    if isinstance(profile, KernelSpec):
        spec = profile
        r = np.abs(u) / tau
        if spec.family == "laplacian":
            samples = laplace_smooth_f(spec.alpha, spec.d, r, extended=True)
        elif spec.family in ("matern", "gaussian"):
            samples = eval_f(spec, r, extended=True)
        else:
            raise ConfigurationError(
                f"{spec.family} counterpart is not smooth enough for a Fourier expansion")
    else:
        samples = np.asarray(profile(u), dtype=float) * np.ones_like(u)
    spectrum = np.fft.fft(samples) / grid_size
    ks = np.arange(0, K + 1)
    # grid starts at -1/2, contributing (-1)^k
    c_pos = spectrum[ks].real * np.where(ks % 2, -1.0, 1.0)
    c_neg = spectrum[-ks % grid_size].real * np.where(ks % 2, -1.0, 1.0)
    c = 0.5 * (c_pos + c_neg)
    freqs = np.arange(-K, K + 1)
    coeffs = np.concatenate([c[1:][::-1], c])
    return FourierCoeffSet(freqs, coeffs, tau=tau, shift=shift, built_for=spec,
                           meta={"grid_size": grid_size})


@lru_cache(maxsize=256)
def _gaussian_tail_z(d, tail_tol):
    """Smallest ``z = x^2 / (2 sigma^2)`` beyond which ``|f| <= tail_tol``."""
    z = np.geomspace(1e-2, 700.0, 1000)
    vals = np.abs(specfun.hyp1f1_neg(d / 2.0, 0.5, z, abs_tol=tail_tol / 100.0))
    above = np.flatnonzero(vals > tail_tol / 4.0)
    z_tail = float(z[min(above[-1] + 1, z.size - 1)]) if above.size else float(z[0])
    if d % 2 == 0:
        # even d: algebraic tail Gamma(1/2) / Gamma((1-d)/2) z^(-d/2), relevant
        # only when it reaches past the scanned range
        log_lead = 0.5 * math.log(math.pi) - math.lgamma((1 - d) / 2.0)
        z_alg = math.exp(2.0 / d * (log_lead - math.log(tail_tol)))
        if z_alg > z[-1]:
            z_tail = max(z_tail, z_alg)
    return z_tail


def gaussian_tail_radius(sigma, d, tail_tol=1e-9):
    """Distance beyond which the Gaussian counterpart stays below ``tail_tol``."""
    return sigma * math.sqrt(2.0 * _gaussian_tail_z(int(d), float(tail_tol)))
