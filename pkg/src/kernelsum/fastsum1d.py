"""One-dimensional fast summation.

Three engines compute ``t_m = sum_n w_n f(|x_n - y_m|)`` for a 1D counterpart f:

* truncated Fourier summation on rescaled data (Gaussian, Matern),
* an exact prefix-sum algorithm for ``f(s) = -c_d s`` (negative distance),
* for the Laplacian, the sum of both: Fourier for the smooth part
  ``exp(-alpha r) + alpha r`` and prefix sums for ``-alpha r``.

All entry points accept a single problem (1D arrays) or a batch of problems
sharing the weights (2D arrays with one row per problem). Rows never
interact, so each row's result is independent of how rows are batched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .accumulate import compensated_cumsum
from .exceptions import ConfigurationError, ContractError, DomainError, UnsupportedKernelError
from .kernels import FourierCoeffSet, KernelSpec
from .nufft import NFFTPlan

# rows x nodes handled at once by the direct Fourier engine (fits in L2)
_CHUNK_ELEMENTS = 1 << 15
_NODE_CHUNK = 4096
# recompute the exponentials directly after this many recurrence steps
_RESET_EVERY = 64


@dataclass(frozen=True)
class Rescaling:
    """Affine map ``u = tau * (v - offset)`` onto ``[-T, T]``.

    ``offset`` is the midpoint of the data range, so the uncapped map agrees
    with ``tau * (v - c_min) - T``.
    """

    tau: float
    offset: float
    T: float

    def __post_init__(self):
        if not 0 < self.T < 0.25:
            raise DomainError(f"T must lie in (0, 0.25), got {self.T}")
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise DomainError("tau must be positive and finite")

    @classmethod
    def from_bounds(cls, c_min, c_max, T=0.2, max_tau=None):
        if not (math.isfinite(c_min) and math.isfinite(c_max)) or c_max < c_min:
            raise DomainError("invalid data bounds")
        width = c_max - c_min
        tau = 2.0 * T / width if width > 0 else 1.0
        if max_tau is not None:
            tau = min(tau, max_tau)
        return cls(tau=tau, offset=0.5 * (c_min + c_max), T=T)

    def apply(self, v):
        return self.tau * (np.asarray(v, dtype=float) - self.offset)

    def scale_spec(self, spec: KernelSpec) -> KernelSpec:
        """Kernel on the rescaled axis: ``sigma -> tau sigma``, ``alpha -> alpha / tau``."""
        if spec.family == "gaussian":
            return KernelSpec.gaussian(spec.sigma * self.tau, spec.d)
        if spec.family == "laplacian":
            return KernelSpec.laplacian(spec.alpha / self.tau, spec.d)
        if spec.family == "matern":
            return KernelSpec.matern(spec.p, spec.beta * self.tau, spec.d)
        raise UnsupportedKernelError(f"{spec.family} has no scale parameter")


def rescale(x, y, T=0.2, max_tau=None):
    """Rescale 1D data so that every point lands in ``[-T, T]``.

    Returns ``(x_tilde, y_tilde, rescaling)``; differences scale by tau, so
    kernel parameters must be rescaled with ``rescaling.scale_spec``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    both = np.concatenate([x.ravel(), y.ravel()])
    if not np.all(np.isfinite(both)):
        raise DomainError("non-finite input")
    if both.size == 0:
        r = Rescaling(tau=1.0 if max_tau is None else min(1.0, max_tau), offset=0.0, T=T)
    else:
        r = Rescaling.from_bounds(float(both.min()), float(both.max()), T, max_tau)
    return r.apply(x), r.apply(y), r


def _as_batch(a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        return a[None, :], True
    if a.ndim == 2:
        return a, False
    raise ContractError("expected a 1D array or a 2D batch")


def _phases(nodes, ks, sign):
    """Yield ``exp(sign 2 pi i k nodes)`` for each k, reusing one buffer.

    Consecutive frequencies advance by one complex multiplication; the
    exponentials are recomputed every ``_RESET_EVERY`` steps and at gaps.
    """
    step = np.exp(sign * 2j * math.pi * nodes)
    z, prev = None, None
    for j, k in enumerate(ks):
        if z is None or j % _RESET_EVERY == 0 or k - prev != 1:
            z = np.exp(sign * 2j * math.pi * k * nodes)
        else:
            z *= step
        prev = k
        yield j, z


def _direct_fourier(xt, yt, w, ks, cs):
    """Batched direct Fourier summation over non-negative frequencies ``ks``.

    Uses ``t = c_0 w_0 + 2 Re sum_{k>0} c_k w_hat_k exp(2 pi i k y)`` for
    real weights and even coefficients. Work is split into tiles of at most
    ``_CHUNK_ELEMENTS`` rows x nodes so the cost per node does not depend on
    N or M.
    """
    B, N = xt.shape
    M = yt.shape[1]
    ks = np.asarray(ks)
    scale = np.where(ks == 0, 1.0, 2.0) * np.asarray(cs, dtype=float)
    wc = w.astype(complex)
    out = np.empty((B, M))
    width = max(1, min(max(N, M), _NODE_CHUNK))
    rows = max(1, _CHUNK_ELEMENTS // width)
    for r0 in range(0, B, rows):
        r1 = min(r0 + rows, B)
        w_hat = np.zeros((r1 - r0, ks.size), dtype=complex)
        for c0 in range(0, N, width):
            wb = wc[c0:c0 + width]
            for j, z in _phases(xt[r0:r1, c0:c0 + width], ks, -1.0):
                # one dot per row: a matrix-vector product rounds differently
                # depending on how many rows share the call
                for i in range(r1 - r0):
                    w_hat[i, j] += z[i] @ wb
        v = w_hat * scale
        for c0 in range(0, M, width):
            acc = np.zeros((r1 - r0, min(width, M - c0)))
            for j, z in _phases(yt[r0:r1, c0:c0 + width], ks, 1.0):
                acc += v[:, j].real[:, None] * z.real
                acc -= v[:, j].imag[:, None] * z.imag
            out[r0:r1, c0:c0 + width] = acc
    return out


def _check_nodes(a):
    if np.any(~((a >= -0.5) & (a < 0.5))):
        raise DomainError("rescaled nodes must lie in [-1/2, 1/2)")


def fourier_fastsum(x, y, w, coeffs: FourierCoeffSet, engine="ndft", *, tau=None,
                    accuracy=1e-8):
    """Truncated Fourier summation ``t_m = sum_n w_n sum_k c_k exp(2 pi i k (x_n - y_m))``.

    Parameters
    ----------
    x, y : ndarray
        Rescaled nodes, shape ``(N,)``/``(M,)`` or batches ``(B, N)``/``(B, M)``.
    w : ndarray
        Real weights, shape ``(N,)``, shared by all rows of a batch.
    coeffs : FourierCoeffSet
    engine : {"ndft", "nfft"}
        Direct summation over the frequency set, or gridding (needs a band).
    tau : float, optional
        Rescaling factor of the data; must equal ``coeffs.tau`` when given.
    accuracy : float
        NFFT target accuracy.
    """
    if tau is not None and not math.isclose(tau, coeffs.tau, rel_tol=1e-12):
        raise ContractError(f"coefficients were built for tau={coeffs.tau}, data use tau={tau}")
    xt, single = _as_batch(x)
    yt, single_y = _as_batch(y)
    if single != single_y or xt.shape[0] != yt.shape[0]:
        raise ContractError("x and y batches do not match")
    w = np.asarray(w, dtype=float)
    if w.shape != (xt.shape[1],):
        raise ContractError("weights do not match the number of x nodes")
    _check_nodes(xt)
    _check_nodes(yt)
    if engine == "ndft":
        ks, cs = coeffs.nonnegative()
        out = _direct_fourier(xt, yt, w, ks, cs)
    elif engine == "nfft":
        if not coeffs.is_band:
            raise ContractError("the NFFT engine needs a contiguous band of frequencies")
        out = np.empty((xt.shape[0], yt.shape[1]))
        for b in range(xt.shape[0]):
            px = NFFTPlan(xt[b], coeffs.K, accuracy=accuracy)
            py = NFFTPlan(yt[b], coeffs.K, accuracy=accuracy)
            spectrum = px.adjoint(w) * coeffs.coeffs
            # enforce exact conjugate symmetry lost to rounding in the FFT
            spectrum = 0.5 * (spectrum + np.conj(spectrum[::-1]))
            out[b] = py.forward(spectrum)
    else:
        raise ConfigurationError(f"unknown engine {engine!r}")
    return out[0] if single else out


def negdist_fastsum_sorted(z, v, c_d=1.0):
    """Exact ``t_m = -c_d sum_n v_n |z_n - z_m|`` for sorted ``z`` in O(L).

    With ``a = cumsum(c_d v)``, ``b = cumsum(a_i (z_{i+1} - z_i))`` and
    1-based indices, ``t_m = b_{L-1} - 2 b_{m-1} - a_L (z_L - z_m)``.
    Works row-wise on 2D input.
    """
    z = np.asarray(z, dtype=float)
    v = np.asarray(v, dtype=float)
    if z.shape != v.shape:
        raise ContractError("z and v differ in shape")
    if z.shape[-1] == 0:
        return np.zeros_like(z)
    gaps = np.diff(z, axis=-1)
    if np.any(gaps < 0):
        raise ContractError("z must be sorted in non-decreasing order")
    a = compensated_cumsum(c_d * v, axis=-1)
    b = compensated_cumsum(a[..., :-1] * gaps, axis=-1)
    zeros = np.zeros(z.shape[:-1] + (1,))
    b_prev = np.concatenate([zeros, b], axis=-1)  # b_{m-1}, with b_0 = 0
    b_last = b_prev[..., -1:]
    return b_last - 2.0 * b_prev - a[..., -1:] * (z[..., -1:] - z)


def negdist_fastsum(x, y, w, d=1):
    """``t_m = -c_d sum_n w_n |x_n - y_m|`` by merging and sorting.

    ``c_d = sqrt(pi) Gamma((d+1)/2) / Gamma(d/2)`` makes this the sliced
    counterpart of the d-dimensional negative distance kernel; d = 1 gives
    the plain sum of negative distances.
    """
    xt, single = _as_batch(x)
    yt, single_y = _as_batch(y)
    if single != single_y or xt.shape[0] != yt.shape[0]:
        raise ContractError("x and y batches do not match")
    w = np.asarray(w, dtype=float)
    if w.shape != (xt.shape[1],):
        raise ContractError("weights do not match the number of x nodes")
    B, M = yt.shape
    z = np.concatenate([yt, xt], axis=1)
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite input")
    v = np.concatenate([np.zeros(M), w])
    order = np.argsort(z, axis=1, kind="stable")
    z_sorted = np.take_along_axis(z, order, axis=1)
    v_sorted = v[order]
    t_sorted = negdist_fastsum_sorted(z_sorted, v_sorted, kernels.negdist_constant(d))
    t = np.empty_like(t_sorted)
    np.put_along_axis(t, order, t_sorted, axis=1)
    out = t[:, :M]
    return out[0] if single else out


def laplace_fastsum(x, y, w, alpha, d, coeffs_smooth: FourierCoeffSet, engine="nfft", *,
                    tau=None, accuracy=1e-8):
    """Sliced Laplacian sum on rescaled nodes via the smooth/rough split.

    ``exp(-alpha r) = (exp(-alpha r) + alpha r) - alpha r``: the first part
    goes through ``fourier_fastsum`` with ``coeffs_smooth`` (built for the
    smooth counterpart at ``coeffs_smooth.tau``), the second through the
    exact sorting algorithm.
    """
    if tau is not None and not math.isclose(tau, coeffs_smooth.tau, rel_tol=1e-12):
        raise ContractError("coefficients were built for a different tau")
    smooth = fourier_fastsum(x, y, w, coeffs_smooth, engine, accuracy=accuracy)
    rough = negdist_fastsum(x, y, w, d)
    return smooth + (alpha / coeffs_smooth.tau) * rough


DEFAULT_MATERN_K = 512
DEFAULT_LAPLACE_K = 1024
DEFAULT_TAIL_TOL = 1e-9


class FastSum1D:
    """Ready-to-use 1D fast summation for one kernel and one data range.

    The rescaling and the Fourier coefficients are set up once from the
    bounds ``[lo, hi]`` that every later input must respect; calls then
    take raw (unscaled) 1D coordinates.

    Parameters
    ----------
    spec : KernelSpec
        Gaussian, Laplacian, Matern, negative distance or Riesz with r = 1.
    lo, hi : float
        Range containing all x and y values.
    T : float
        Half-width of the rescaled data interval.
    eps, k_max : float, int
        Gaussian coefficient selection, see ``kernels.select_coeff_set``.
    n_coeffs : int, optional
        Band limit K for the numerically expanded kernels.
    engine : {"ndft", "nfft"}, optional
        Defaults to "ndft" for the Gaussian and "nfft" otherwise.
    tail_tol : float
        Gaussian only: the rescaling is capped so the counterpart has decayed
        below this value at distance 1/2, which keeps the periodization error
        negligible.
    """

    def __init__(self, spec: KernelSpec, lo, hi, *, T=0.2, eps=1e-10, k_max=None,
                 n_coeffs=None, engine=None, accuracy=1e-8, tail_tol=DEFAULT_TAIL_TOL):
        self.spec = spec
        self.lo, self.hi = float(lo), float(hi)
        self.accuracy = accuracy
        self.coeffs = None
        fam = spec.family
        if fam == "negdist" or (fam == "riesz" and spec.r == 1.0):
            self.kind = "sort"
            self.rescaling = None
            self.engine = "sort"
            return
        if fam == "gaussian":
            cap = 1.0 / (2.0 * kernels.gaussian_tail_radius(spec.sigma, spec.d, tail_tol))
            self.rescaling = Rescaling.from_bounds(lo, hi, T, max_tau=cap)
            tau = self.rescaling.tau
            self.coeffs = kernels.select_coeff_set(spec.sigma * tau, spec.d, eps, k_max,
                                                   tau=tau, built_for=spec)
            self.kind = "fourier"
            self.engine = engine or "ndft"
        elif fam in ("matern", "laplacian"):
            self.rescaling = Rescaling.from_bounds(lo, hi, T)
            K = n_coeffs or (DEFAULT_MATERN_K if fam == "matern" else DEFAULT_LAPLACE_K)
            self.coeffs = kernels.numeric_fourier_coeffs(spec, self.rescaling.tau, K)
            self.kind = "fourier" if fam == "matern" else "laplace"
            self.engine = engine or "nfft"
        else:
            raise UnsupportedKernelError(f"no fast 1D summation for the {fam} kernel")
        if self.engine not in ("ndft", "nfft"):
            raise ConfigurationError(f"unknown engine {self.engine!r}")

    @property
    def n_coeffs(self):
        return 0 if self.coeffs is None else len(self.coeffs)

    def __call__(self, x, y, w):
        if self.kind == "sort":
            return negdist_fastsum(x, y, w, self.spec.d)
        slack = 1e-12 * max(self.hi - self.lo, abs(self.lo), abs(self.hi))
        for v in (np.asarray(x), np.asarray(y)):
            if v.size and (v.min() < self.lo - slack or v.max() > self.hi + slack):
                raise DomainError("input lies outside the range the plan was built for")
        xt = self.rescaling.apply(x)
        yt = self.rescaling.apply(y)
        if self.kind == "fourier":
            return fourier_fastsum(xt, yt, w, self.coeffs, self.engine, accuracy=self.accuracy)
        return laplace_fastsum(xt, yt, w, self.spec.alpha, self.spec.d, self.coeffs,
                               self.engine, accuracy=self.accuracy)


def fastsum_1d(spec: KernelSpec, x, y, w, **options):
    """Convenience wrapper: build a ``FastSum1D`` for the data range and apply it."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    both = np.concatenate([x.ravel(), y.ravel()])
    plan = FastSum1D(spec, float(both.min()), float(both.max()), **options)
    return plan(x, y, w)
