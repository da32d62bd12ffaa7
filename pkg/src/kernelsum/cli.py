"""Command-line interface: ``kernelsum gen-data|run|sweep|compare``."""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import bench
from .exceptions import KernelSumError
from .kernels import KernelSpec


def _kernel_from_args(args):
    fam = args.kernel
    if fam == "gaussian":
        return KernelSpec.gaussian(args.sigma, args.d)
    if fam == "laplacian":
        return KernelSpec.laplacian(args.alpha, args.d)
    if fam == "matern":
        return KernelSpec.matern(args.p, args.beta, args.d)
    return KernelSpec.negdist(args.d)


def _config_from_args(args, method=None):
    return bench.ExperimentConfig(
        kernel=_kernel_from_args(args),
        N=args.n, M=args.m if args.m is not None else args.n,
        method=method or args.method, P=args.proj, D=args.features,
        seed=args.seed, reps=args.reps, eps=args.eps, k_max=args.kmax,
        n_coeffs=args.ncoeffs, T=args.threshold, batch=args.batch,
        threads=args.threads, oracle_budget=args.oracle_budget,
        compute_error=not args.no_error,
    )


def _emit(records, out):
    if out:
        bench.write_csv(out, records)
    else:
        sys.stdout.write(bench.format_csv(records))


def _int_list(text):
    return [int(float(v)) for v in text.split(",") if v.strip()]


def _add_data_flags(p):
    p.add_argument("--n", type=int, default=1000, help="number of source points N")
    p.add_argument("--m", type=int, default=None, help="number of target points M (default N)")
    p.add_argument("--d", type=int, default=50, help="dimension")
    p.add_argument("--seed", type=int, default=0)


def _add_experiment_flags(p):
    _add_data_flags(p)
    p.add_argument("--kernel", choices=("gaussian", "laplacian", "matern", "negdist"),
                   default="gaussian")
    p.add_argument("--sigma", type=float, default=1.0, help="Gaussian bandwidth")
    p.add_argument("--alpha", type=float, default=1.0, help="Laplacian rate")
    p.add_argument("--beta", type=float, default=1.0, help="Matern length scale")
    p.add_argument("--p", type=int, default=1, help="Matern order, nu = p + 1/2")
    p.add_argument("--proj", type=int, default=1000, help="number of directions P")
    p.add_argument("--features", type=int, default=None, help="number of RFF features D (default P)")
    p.add_argument("--method", choices=bench.METHODS, default="slice")
    p.add_argument("--reps", type=int, default=1, help="repetitions re-drawing directions or features")
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.add_argument("--eps", type=float, default=1e-10, help="relative coefficient cutoff")
    p.add_argument("--kmax", type=int, default=None, help="cap on the Fourier band")
    p.add_argument("--ncoeffs", type=int, default=None,
                   help="band limit K for numerically computed coefficients")
    p.add_argument("--threshold", type=float, default=0.2, help="rescaling bound T < 1/4")
    p.add_argument("--batch", type=int, default=None, help="directions per work item")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--oracle-budget", type=float, default=bench.DEFAULT_ORACLE_BUDGET,
                   help="largest N*M for which the exact reference is computed")
    p.add_argument("--no-error", action="store_true", help="skip the exact reference")


def build_parser():
    parser = argparse.ArgumentParser(prog="kernelsum",
                                     description="Sliced fast kernel summation benchmarks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="write a synthetic instance to an .npz file")
    _add_data_flags(p)
    p.add_argument("--out", required=True, help="output .npz path")

    p = sub.add_parser("run", help="run one experiment and emit one CSV row")
    _add_experiment_flags(p)

    p = sub.add_parser("sweep", help="run one experiment per grid value")
    _add_experiment_flags(p)
    p.add_argument("--param", choices=bench.SWEEP_PARAMS, required=True)
    p.add_argument("--values", type=_int_list, required=True, help="comma-separated grid")
    p.add_argument("--gnuplot", default=None, help="also write a gnuplot script here")

    p = sub.add_parser("compare", help="slicing against both RFF variants on one instance")
    _add_experiment_flags(p)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "gen-data":
            x, y, w = bench.gen_data(args.n, args.m if args.m is not None else args.n, args.d, args.seed)
            np.savez(args.out, x=x, y=y, w=w)
            return 0
        if args.command == "run":
            _emit([bench.run(_config_from_args(args))], args.out)
        elif args.command == "compare":
            _emit(bench.compare(_config_from_args(args)), args.out)
        else:
            cfg = _config_from_args(args)
            if args.out:
                bench.sweep(cfg, args.param, args.values, out=args.out)
            else:
                _emit(bench.sweep(cfg, args.param, args.values), None)
            if args.gnuplot:
                x_col = {"N": "N", "d": "d"}.get(args.param, "P_or_D")
                with open(args.gnuplot, "w") as fh:
                    fh.write(bench.gnuplot_script(args.out or "results.csv", x_col))
    except KernelSumError as exc:
        print(f"kernelsum: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
