"""
One-dimensional counterparts
============================

Every radial kernel F(||x - y||) used here is the average over directions
of a 1D kernel f(|<xi, x - y>|). The counterpart f changes with the
dimension d: for the Gaussian it oscillates more as d grows, yet averaging
over the sphere gives back exp(-s^2 / 2) exactly.
"""

import numpy as np

from kernelsum import KernelSpec, eval_F, eval_f, slice_transform_numeric

s = np.linspace(0.0, 3.0, 7)
for d in (2, 10, 50):
    spec = KernelSpec.gaussian(1.0, d)
    print(f"d = {d:3d}  f(s) =", np.array2string(eval_f(spec, s), precision=3, suppress_small=True))

# quadrature over the sphere recovers F from f
for spec in (KernelSpec.gaussian(1.0, 10), KernelSpec.matern(1, 1.0, 10), KernelSpec.laplacian(0.5, 10)):
    q = slice_transform_numeric(lambda t: eval_f(spec, t, extended=True), spec.d, 1.5)
    print(f"{spec.describe():24s} F(1.5) = {eval_F(spec, 1.5):.12f}  quadrature {q:.12f}")
