"""Reference methods: exact O(NM) summation and random Fourier features."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _rng
from .accumulate import NeumaierAccumulator
from .exceptions import ContractError, DomainError, UnsupportedKernelError
from .kernels import KernelSpec, eval_F

# pairs per block of the exact sum
_BLOCK_PAIRS = 1 << 22
# feature columns per block of the RFF sums
_RFF_BLOCK = 256


def _prepare(x, y, w):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.asarray(w, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if y.ndim == 1:
        y = y[:, None]
    if x.ndim != 2 or y.ndim != 2 or x.shape[1] != y.shape[1]:
        raise ContractError("x and y must be (N, d) and (M, d) arrays of equal d")
    if w.shape != (x.shape[0],):
        raise ContractError("w must have one weight per x point")
    return x, y, w


def pairwise_distances(x, y):
    """Euclidean distances between the rows of x and y, shape ``(M, N)``.

    Low dimensions use direct differences. Higher dimensions use the Gram
    expansion on centered data and recompute tiny distances directly, where
    the expansion would lose all relative accuracy.
    """
    d = x.shape[1]
    if d <= 3:
        diff = y[:, None, :] - x[None, :, :]
        return np.sqrt(np.einsum("mnk,mnk->mn", diff, diff))
    xx = np.einsum("ij,ij->i", x, x)
    yy = np.einsum("ij,ij->i", y, y)
    d2 = yy[:, None] + xx[None, :] - 2.0 * (y @ x.T)
    np.maximum(d2, 0.0, out=d2)
    suspect = d2 <= 1e-6 * (yy[:, None] + xx[None, :])
    if suspect.any():
        m_idx, n_idx = np.nonzero(suspect)
        diff = y[m_idx] - x[n_idx]
        d2[m_idx, n_idx] = np.einsum("ij,ij->i", diff, diff)
    return np.sqrt(d2)


def exact_sum(spec: KernelSpec, x, y, w, block_pairs=_BLOCK_PAIRS):
    """Direct evaluation of ``s_m = sum_n w_n F(||x_n - y_m||)``.

    Work proceeds in blocks of about ``block_pairs`` kernel entries; each
    block is reduced by a matrix-vector product and blocks along n are
    combined with compensated summation.
    """
    x, y, w = _prepare(x, y, w)
    if spec.d != x.shape[1]:
        raise ContractError(f"kernel dimension {spec.d} does not match data dimension {x.shape[1]}")
    N, M = x.shape[0], y.shape[0]
    out = np.empty(M)
    if N == 0:
        out[:] = 0.0
        return out
    # center for the Gram expansion; distances are translation invariant
    center = (x.sum(axis=0) + y.sum(axis=0)) / (N + M)
    x = x - center
    y = y - center
    bn = max(1, min(N, int(math.sqrt(block_pairs))))
    bm = max(1, min(M, block_pairs // bn))
    for m0 in range(0, M, bm):
        yb = y[m0:m0 + bm]
        acc = NeumaierAccumulator(yb.shape[0])
        for n0 in range(0, N, bn):
            dist = pairwise_distances(x[n0:n0 + bn], yb)
            acc.add(eval_F(spec, dist) @ w[n0:n0 + bn])
        out[m0:m0 + bm] = acc.value
    return out


def per_summand_error(s_true, s_approx, w):
    """``||s_true - s_approx||_1 / (M sum |w_n|)``."""
    s_true = np.asarray(s_true, dtype=float)
    s_approx = np.asarray(s_approx, dtype=float)
    if s_true.shape != s_approx.shape:
        raise ContractError("result vectors differ in shape")
    denom = s_true.size * np.sum(np.abs(w))
    if denom == 0:
        return 0.0
    return float(np.sum(np.abs(s_true - s_approx)) / denom)


@dataclass(frozen=True, eq=False)
class SpectralSample:
    """Frequencies ``v_p`` (rows) drawn from the kernel's spectral measure.

    ``phases`` is present exactly for the phase-shifted estimator (variant 1).
    """

    frequencies: np.ndarray
    phases: Optional[np.ndarray]
    seed: int
    variant: int

    def __post_init__(self):
        if self.variant not in (1, 2):
            raise DomainError("variant must be 1 or 2")
        if (self.phases is not None) != (self.variant == 1):
            raise DomainError("phases must be given exactly for variant 1")
        if self.phases is not None and self.phases.shape != (self.frequencies.shape[0],):
            raise DomainError("one phase per frequency")

    @property
    def D(self):
        return self.frequencies.shape[0]


def sample_spectral(spec: KernelSpec, D, seed=0, variant=2):
    """Draw D frequencies with ``E cos(2 pi <z, v>) = F(||z||)``.

    Gaussian: ``v = g / (2 pi sigma)``. Laplacian: multivariate Cauchy
    ``v = alpha g / (2 pi |z0|)``. Matern with ``nu = p + 1/2``: multivariate
    Student-t with ``2 nu`` degrees of freedom, ``v = g sqrt(2 nu / W) / (2 pi beta)``
    with ``W ~ chi^2(2 nu)``. Here g is a standard normal vector and z0 a
    standard normal scalar.
    """
    if D < 1:
        raise DomainError("D must be positive")
    fam, d = spec.family, spec.d
    if fam not in ("gaussian", "laplacian", "matern"):
        raise UnsupportedKernelError(
            f"random Fourier features need a positive definite kernel, not {fam}")
    gen = _rng.substream(seed, _rng.SPECTRAL)
    g = gen.standard_normal((D, d))
    if fam == "gaussian":
        v = g / (2.0 * math.pi * spec.sigma)
    elif fam == "laplacian":
        z0 = np.abs(gen.standard_normal(D))
        v = spec.alpha / (2.0 * math.pi) * g / z0[:, None]
    else:
        dof = 2 * spec.p + 1
        W = gen.chisquare(dof, D)
        v = g * np.sqrt(dof / W)[:, None] / (2.0 * math.pi * spec.beta)
    phases = None
    if variant == 1:
        phases = _rng.substream(seed, _rng.PHASES).uniform(0.0, 2.0 * math.pi, D)
    return SpectralSample(v, phases, int(seed), variant)


def rff_sum(sample: SpectralSample, x, y, w, variant=None):
    """Random Fourier feature estimate of ``s_m``.

    Variant 1: ``(2/D) sum_p cos(<y_m, 2 pi v_p> + b_p) sum_n w_n cos(<x_n, 2 pi v_p> + b_p)``.
    Variant 2: ``(1/D) sum_p [cos cos + sin sin]`` without phases.
    """
    x, y, w = _prepare(x, y, w)
    if x.shape[1] != sample.frequencies.shape[1]:
        raise ContractError("sample dimension does not match the data")
    variant = sample.variant if variant is None else variant
    if variant == 1 and sample.phases is None:
        raise ContractError("variant 1 needs a sample with phases")
    if variant not in (1, 2):
        raise DomainError("variant must be 1 or 2")
    out = np.zeros(y.shape[0])
    D = sample.D
    for p0 in range(0, D, _RFF_BLOCK):
        V = 2.0 * math.pi * sample.frequencies[p0:p0 + _RFF_BLOCK]
        zx = x @ V.T
        zy = y @ V.T
        if variant == 1:
            b = sample.phases[p0:p0 + _RFF_BLOCK]
            out += 2.0 * (np.cos(zy + b) @ (w @ np.cos(zx + b)))
        else:
            out += np.cos(zy) @ (w @ np.cos(zx)) + np.sin(zy) @ (w @ np.sin(zx))
    return out / D
