"""Experiment harness: data generation, method runs, error metric, CSV output.

Random data come from Philox-4x64 counter-based streams (numpy's
``Philox`` bit generator), so a seed produces the same data on every
platform. Timings cover the method only; data generation and the exact
reference sum are excluded.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

import numpy as np

from . import _rng
from .baselines import exact_sum, per_summand_error, rff_sum, sample_spectral
from .exceptions import DomainError, KernelSumError, OracleBudgetError
from .kernels import KernelSpec
from .slicing import SliceBatchConfig, sliced_kernel_sum

log = logging.getLogger(__name__)

METHODS = ("exact", "slice", "rff1", "rff2")
CSV_COLUMNS = ("method", "kernel", "params", "N", "M", "d", "P_or_D", "seed", "rep",
               "err_per_summand", "err_std", "t_setup_s", "t_sum_s")
DEFAULT_ORACLE_BUDGET = 1e8


def gen_data(N, M, d, seed=0, scale=0.1):
    """Points ``x`` (N, d) and ``y`` (M, d) from N(0, scale^2 I), weights uniform on [0, 1]."""
    if N < 1 or M < 1 or d < 1:
        raise DomainError("N, M and d must be positive")
    x = _rng.substream(seed, _rng.DATA_X).standard_normal((N, d)) * scale
    y = _rng.substream(seed, _rng.DATA_Y).standard_normal((M, d)) * scale
    w = _rng.substream(seed, _rng.DATA_W).uniform(0.0, 1.0, N)
    return x, y, w


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: kernel, sizes, method and its parameters."""

    kernel: KernelSpec
    N: int = 1000
    M: int = 1000
    method: str = "slice"
    P: int = 1000
    D: Optional[int] = None
    seed: int = 0
    reps: int = 1
    eps: float = 1e-10
    k_max: Optional[int] = None
    n_coeffs: Optional[int] = None
    T: float = 0.2
    batch: Optional[int] = None
    threads: Optional[int] = None
    oracle_budget: float = DEFAULT_ORACLE_BUDGET
    compute_error: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}")
        if self.reps < 1:
            raise DomainError("reps must be at least 1")
        if min(self.N, self.M, self.P) < 1:
            raise DomainError("N, M and P must be positive")
        if self.D is not None and self.D < 1:
            raise DomainError("D must be positive")

    @property
    def d(self):
        return self.kernel.d

    @property
    def P_or_D(self):
        if self.method == "slice":
            return self.P
        if self.method in ("rff1", "rff2"):
            return self.D or self.P
        return 0


@dataclass
class BenchRecord:
    method: str
    kernel: str
    params: str
    N: int
    M: int
    d: int
    P_or_D: int
    seed: int
    rep: int
    err_per_summand: float
    err_std: float
    t_setup_s: float
    t_sum_s: float
    errors: list = field(default_factory=list, repr=False)

    def row(self):
        out = []
        for name in CSV_COLUMNS:
            value = getattr(self, name)
            out.append(format(value, ".17g") if isinstance(value, float) else str(value))
        return out


def _execute(config: ExperimentConfig, x, y, w, rep_seed):
    """Run the method once; returns ``(values, t_setup, t_sum)``."""
    spec = config.kernel
    if config.method == "exact":
        t0 = time.perf_counter()
        values = exact_sum(spec, x, y, w)
        return values, 0.0, time.perf_counter() - t0
    if config.method == "slice":
        batch = SliceBatchConfig(config.batch) if config.batch else None
        res = sliced_kernel_sum(spec, x, y, w, config.P, seed=rep_seed, batch=batch, T=config.T,
                                eps=config.eps, k_max=config.k_max, n_coeffs=config.n_coeffs,
                                threads=config.threads)
        return res.values, res.timings["setup"], res.timings["sum"]
    variant = 1 if config.method == "rff1" else 2
    t0 = time.perf_counter()
    sample = sample_spectral(spec, config.P_or_D, seed=rep_seed, variant=variant)
    t_setup = time.perf_counter() - t0
    t0 = time.perf_counter()
    values = rff_sum(sample, x, y, w, variant=variant)
    return values, t_setup, time.perf_counter() - t0


def run(config: ExperimentConfig, data=None, reference=None) -> BenchRecord:
    """Execute an experiment and summarize it in one record.

    The data are drawn once from ``config.seed``; repetitions re-draw only
    the directions or features. ``data`` and ``reference`` can be supplied
    to reuse an existing instance and its exact sums.

    Raises
    ------
    OracleBudgetError
        If errors are requested and ``N * M`` exceeds the oracle budget.
    """
    if config.compute_error and reference is None and config.N * config.M > config.oracle_budget:
        raise OracleBudgetError(
            f"exact reference needs N*M = {config.N * config.M:.3g} kernel evaluations, "
            f"budget is {config.oracle_budget:.3g}; raise the budget or disable errors")
    x, y, w = data if data is not None else gen_data(config.N, config.M, config.d, config.seed)
    if config.compute_error and reference is None:
        reference = exact_sum(config.kernel, x, y, w)
    errs, setups, sums = [], [], []
    for rep in range(config.reps):
        values, t_setup, t_sum = _execute(config, x, y, w, _rng.derive_seed(config.seed, rep))
        setups.append(t_setup)
        sums.append(t_sum)
        if config.compute_error:
            errs.append(per_summand_error(reference, values, w))
    err = float(np.mean(errs)) if errs else math.nan
    err_std = float(np.std(errs)) if errs else math.nan
    return BenchRecord(
        method=config.method, kernel=config.kernel.family, params=config.kernel.describe(),
        N=config.N, M=config.M, d=config.d, P_or_D=config.P_or_D, seed=config.seed,
        rep=config.reps, err_per_summand=err, err_std=err_std,
        t_setup_s=float(np.mean(setups)), t_sum_s=float(np.mean(sums)), errors=errs,
    )


def _failed_record(config, exc):
    return BenchRecord(
        method=config.method, kernel=config.kernel.family,
        params=f"{config.kernel.describe()} [failed: {type(exc).__name__}]",
        N=config.N, M=config.M, d=config.d, P_or_D=config.P_or_D, seed=config.seed,
        rep=config.reps, err_per_summand=math.nan, err_std=math.nan,
        t_setup_s=math.nan, t_sum_s=math.nan,
    )


SWEEP_PARAMS = ("N", "P", "d", "D")


def sweep_configs(base: ExperimentConfig, param, values):
    """Configurations along a grid; an N sweep sets ``M = N`` as well."""
    if param not in SWEEP_PARAMS:
        raise DomainError(f"sweep parameter must be one of {SWEEP_PARAMS}")
    for v in values:
        v = int(v)
        if param == "N":
            yield replace(base, N=v, M=v)
        elif param == "P":
            yield replace(base, P=v)
        elif param == "D":
            yield replace(base, D=v)
        else:
            yield replace(base, kernel=base.kernel.with_dimension(v))


def sweep(base: ExperimentConfig, param, values, out=None):
    """Run one experiment per grid value; failures become marked rows.

    Rows are appended to ``out`` (a path) as they complete when given.
    """
    records = []
    if out is not None:
        write_csv(out, [])
    for cfg in sweep_configs(base, param, values):
        try:
            rec = run(cfg)
        except (KernelSumError, MemoryError) as exc:
            log.warning("sweep point %s=%s failed: %s", param, getattr(cfg, param, cfg.d), exc)
            rec = _failed_record(cfg, exc)
        records.append(rec)
        if out is not None:
            write_csv(out, [rec], append=True)
    return records


def compare(base: ExperimentConfig, methods=("slice", "rff1", "rff2")):
    """Run several methods on the same data and reference sums."""
    x, y, w = gen_data(base.N, base.M, base.d, base.seed)
    reference = None
    if base.compute_error:
        if base.N * base.M > base.oracle_budget:
            raise OracleBudgetError("exact reference exceeds the oracle budget")
        reference = exact_sum(base.kernel, x, y, w)
    return [run(replace(base, method=m), data=(x, y, w), reference=reference) for m in methods]


def format_csv(records: Iterable[BenchRecord], header=True):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if header:
        writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.row())
    return buf.getvalue()


def write_csv(path, records, append=False):
    """Write records with a header, or append rows to an existing file."""
    with open(path, "a" if append else "w", newline="") as fh:
        fh.write(format_csv(records, header=not append))


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def gnuplot_script(csv_path, x_column, y_column="err_per_summand", logscale=True):
    """gnuplot commands plotting one CSV column against another, one curve per method."""
    cols = {name: i + 1 for i, name in enumerate(CSV_COLUMNS)}
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set xlabel '{x_column}'",
        f"set ylabel '{y_column}'",
    ]
    if logscale:
        lines.append("set logscale xy")
    lines.append(
        f"plot for [m in 'exact slice rff1 rff2'] '{csv_path}' "
        f"using (strcol(1) eq m ? ${cols[x_column]} : 1/0):{cols[y_column]} "
        "with linespoints title m")
    return "\n".join(lines) + "\n"


def loglog_slope(xs, ys):
    """Least-squares slope of ``log y`` against ``log x``."""
    xs = np.log(np.asarray(xs, dtype=float))
    ys = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(xs, ys, 1)[0])
