"""
Monte-Carlo rate of the slicing error
=====================================

The slicing error decays like 1/sqrt(P). A P sweep through the benchmark
harness writes a CSV and a gnuplot script; the fitted log-log slope should
be close to -0.5.
"""

import os
import tempfile

from kernelsum import KernelSpec
from kernelsum import bench

base = bench.ExperimentConfig(kernel=KernelSpec.gaussian(1.0, 50), N=1000, M=1000, reps=5)
grid = [32, 128, 512, 2048]

out_dir = tempfile.mkdtemp(prefix="kernelsum-")
csv_path = os.path.join(out_dir, "p_sweep.csv")
records = bench.sweep(base, "P", grid, out=csv_path)

for rec in records:
    print(f"P = {rec.P_or_D:5d}  error {rec.err_per_summand:.2e} +- {rec.err_std:.1e}")
slope = bench.loglog_slope(grid, [r.err_per_summand for r in records])
print(f"log-log slope {slope:+.3f}")

with open(os.path.join(out_dir, "p_sweep.gp"), "w") as fh:
    fh.write(bench.gnuplot_script(csv_path, "P_or_D"))
print("CSV and gnuplot script in", out_dir)
