"""
Slicing against random Fourier features
=======================================

Both methods are Monte-Carlo estimators with cost linear in N. Slicing
averages 1D kernels over directions; RFF averages cosines over frequencies
drawn from the spectral density. The variant with paired cos/sin features
(rff2) has a much smaller variance than the one with random phases (rff1).
"""

import math

from kernelsum import KernelSpec, UnsupportedKernelError, sample_spectral
from kernelsum import bench

base = bench.ExperimentConfig(kernel=KernelSpec.gaussian(math.sqrt(5.0), 100),
                              N=1000, M=1000, P=500, reps=5)
print(bench.format_csv(bench.compare(base)), end="")

# RFF needs a positive definite kernel; slicing does not.
try:
    sample_spectral(KernelSpec.negdist(100), 500)
except UnsupportedKernelError as exc:
    print("negative distance:", exc)
