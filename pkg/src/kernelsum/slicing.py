"""Sliced fast kernel summation.

``s_m = sum_n w_n F(||x_n - y_m||)`` is estimated by averaging 1D fast sums
of the counterpart f over P random directions:

    s_m ~ (1/P) sum_p sum_n w_n f(|<xi_p, x_n - y_m>|).

Directions come from per-direction random substreams and the final average
is reduced in direction order, so the result is bit-identical for a fixed
seed whatever the batch size or thread count.
"""

from __future__ import annotations

import math
import os
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _rng
from .accumulate import NeumaierAccumulator
from .exceptions import ContractError, DomainError
from .fastsum1d import FastSum1D
from .kernels import KernelSpec
from .specfun import gamma_ratio

# directions projected together in one matrix product; fixed so that the
# floating-point result of a projection never depends on the batch size
PROJECTION_TILE = 64


@dataclass(frozen=True, eq=False)
class DirectionSet:
    """P unit vectors in R^d drawn from the substreams of ``seed``."""

    directions: np.ndarray
    seed: int

    @property
    def P(self):
        return self.directions.shape[0]

    @property
    def d(self):
        return self.directions.shape[1]


def _direction(seed, p, d):
    gen = _rng.substream(seed, _rng.DIRECTIONS, p)
    while True:
        g = gen.standard_normal(d)
        norm = np.linalg.norm(g)
        if norm > 0:
            return g / norm


def direction_block(seed, start, stop, d):
    """Directions with indices ``start..stop-1`` as a ``(stop - start, d)`` array."""
    return np.array([_direction(seed, p, d) for p in range(start, stop)]).reshape(-1, d)


def sample_directions(P, d, seed=0):
    """Draw P directions uniformly on the sphere by normalizing Gaussian vectors."""
    if P < 1 or d < 1:
        raise DomainError("P and d must be positive")
    return DirectionSet(direction_block(seed, 0, P, d), int(seed))


def project(points, xi):
    """Inner products ``<xi, x>`` for each row x of ``points``.

    ``xi`` may be one direction ``(d,)`` or several ``(B, d)``; the result has
    shape ``(N,)`` or ``(B, N)``.
    """
    points = np.asarray(points, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if points.ndim != 2 or points.shape[1] != xi.shape[-1]:
        raise ContractError("points and direction have different dimensions")
    if xi.ndim == 1:
        return points @ xi
    return xi @ points.T


@dataclass(frozen=True)
class SliceBatchConfig:
    """Number of directions handled per work item; None means ``min(P, 64)``."""

    batch_size: int | None = None

    def resolve(self, P):
        B = min(P, 64) if self.batch_size is None else int(self.batch_size)
        if not 1 <= B <= P:
            raise DomainError(f"batch size must lie in [1, P={P}], got {B}")
        return B


@dataclass
class SumResult:
    """Output values with the metadata needed for benchmarking."""

    values: np.ndarray
    method: str
    P: int = 0
    n_coeffs: int = 0
    timings: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)


def thread_count(requested=None):
    """Worker count: ``requested`` or the CPU count, capped by KERNELSUM_THREADS."""
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("KERNELSUM_THREADS")
    if cap:
        n = min(n, max(1, int(cap)))
    return max(1, int(n))


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
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y)) and np.all(np.isfinite(w))):
        raise DomainError("non-finite input")
    return x, y, w


def sliced_kernel_sum(spec: KernelSpec, x, y, w, P, seed=0, batch=None, *, T=0.2, eps=1e-10,
                      k_max=None, n_coeffs=None, engine=None, accuracy=1e-8, threads=None):
    """Sliced fast summation ``s_m ~ sum_n w_n K(x_n, y_m)``.

    Parameters
    ----------
    spec : KernelSpec
        Gaussian, Laplacian, Matern, negative distance (or Riesz with r = 1).
    x, y : ndarray
        Shapes ``(N, d)`` and ``(M, d)``, d equal to ``spec.d``.
    w : ndarray
        Real weights, shape ``(N,)``.
    P : int
        Number of random directions.
    seed : int
        Seed of the direction substreams.
    batch : SliceBatchConfig or int, optional
        Directions per work item; bounds the memory of the 1D stage.
    T, eps, k_max, n_coeffs, engine, accuracy
        Passed to ``fastsum1d.FastSum1D``.
    threads : int, optional
        Worker threads; capped by the KERNELSUM_THREADS environment variable.

    Returns
    -------
    SumResult
        ``values`` of shape ``(M,)``; ``timings`` holds ``setup`` and ``sum``
        wall-clock seconds.
    """
    x, y, w = _prepare(x, y, w)
    if spec.d != x.shape[1]:
        raise ContractError(f"kernel dimension {spec.d} does not match data dimension {x.shape[1]}")
    if P < 1:
        raise DomainError("P must be positive")
    if isinstance(batch, int):
        batch = SliceBatchConfig(batch)
    B = (batch or SliceBatchConfig()).resolve(P)

    t0 = time.perf_counter()
    # translation invariance: center, then every projection lies in [-R, R]
    center = (x.sum(axis=0) + y.sum(axis=0)) / (x.shape[0] + y.shape[0])
    xc = x - center
    yc = y - center
    R = float(max(np.linalg.norm(xc, axis=1).max(initial=0.0),
                  np.linalg.norm(yc, axis=1).max(initial=0.0)))
    R *= 1.0 + 1e-12
    engine1d = FastSum1D(spec, -R, R, T=T, eps=eps, k_max=k_max, n_coeffs=n_coeffs,
                         engine=engine, accuracy=accuracy)
    t_setup = time.perf_counter() - t0

    t0 = time.perf_counter()
    tiles = [(s, min(s + PROJECTION_TILE, P)) for s in range(0, P, PROJECTION_TILE)]

    def run_tile(bounds):
        start, stop = bounds
        xi = direction_block(seed, start, stop, spec.d)
        px = xi @ xc.T
        py = xi @ yc.T
        out = np.empty((stop - start, y.shape[0]))
        for b0 in range(0, stop - start, B):
            out[b0:b0 + B] = engine1d(px[b0:b0 + B], py[b0:b0 + B], w)
        return out

    acc = NeumaierAccumulator(y.shape[0])

    def consume(tile_values):
        for row in tile_values:
            acc.add(row)

    n_workers = thread_count(threads)
    if n_workers == 1 or len(tiles) == 1:
        for bounds in tiles:
            consume(run_tile(bounds))
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            pending = deque()
            for bounds in tiles:
                pending.append(pool.submit(run_tile, bounds))
                if len(pending) >= 2 * n_workers:
                    consume(pending.popleft().result())
            while pending:
                consume(pending.popleft().result())
    values = acc.value / P
    t_sum = time.perf_counter() - t0

    return SumResult(values=values, method="slice", P=P, n_coeffs=engine1d.n_coeffs,
                     timings={"setup": t_setup, "sum": t_sum},
                     info={"engine": engine1d.engine, "batch_size": B, "threads": n_workers,
                           "tau": engine1d.rescaling.tau if engine1d.rescaling else 1.0})


class ErrorBound(NamedTuple):
    value: float
    heuristic: bool


def slicing_error_bound(spec: KernelSpec, P, diam=0.0):
    """Expected slicing error ``E|estimate - K(x, y)|`` for a single pair.

    Gaussian: ``sqrt(2 pi) / sqrt(P)``. Negative distance:
    ``sqrt(8) pi Gamma((d+1)/2) / Gamma(d/2) * diam / sqrt(P)``. Other
    kernels get the Gaussian form with constant 1, flagged as heuristic.
    """
    if P < 1:
        raise DomainError("P must be positive")
    if diam < 0:
        raise DomainError("diam must be non-negative")
    if spec.family == "negdist" or (spec.family == "riesz" and spec.r == 1.0):
        d = spec.d
        value = math.sqrt(8.0) * math.pi * gamma_ratio((d + 1) / 2.0, d / 2.0) * diam / math.sqrt(P)
        return ErrorBound(value, False)
    value = math.sqrt(2.0 * math.pi) / math.sqrt(P)
    return ErrorBound(value, spec.family != "gaussian")


__all__ = [
    "DirectionSet", "SliceBatchConfig", "SumResult", "ErrorBound", "PROJECTION_TILE",
    "direction_block", "sample_directions", "project", "sliced_kernel_sum",
    "slicing_error_bound", "thread_count",
]
