"""Fast summation of radial kernels by slicing.

Computes ``s_m = sum_n w_n K(x_n, y_m)`` for radial kernels in
``O(P (N + M))`` time by averaging one-dimensional fast sums over P random
directions. The 1D sums use truncated Fourier series (with an NFFT), an
exact sorting algorithm for the negative distance, or a combination of both
for the Laplacian.
"""

from .baselines import SpectralSample, exact_sum, per_summand_error, rff_sum, sample_spectral
from .exceptions import (
    ConfigurationError,
    ContractError,
    ConvergenceError,
    DomainError,
    KernelSumError,
    OracleBudgetError,
    UnsupportedKernelError,
)
from .fastsum1d import (
    FastSum1D,
    Rescaling,
    fastsum_1d,
    fourier_fastsum,
    laplace_fastsum,
    negdist_fastsum,
    rescale,
)
from .kernels import (
    FourierCoeffSet,
    KernelSpec,
    eval_F,
    eval_f,
    numeric_fourier_coeffs,
    select_coeff_set,
    slice_transform_numeric,
)
from .nufft import NFFTPlan, ndft_adjoint, ndft_forward, nfft_adjoint, nfft_forward
from .slicing import (
    DirectionSet,
    SliceBatchConfig,
    SumResult,
    sample_directions,
    sliced_kernel_sum,
    slicing_error_bound,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "ContractError", "ConvergenceError", "DirectionSet", "DomainError",
    "FastSum1D", "FourierCoeffSet", "KernelSpec", "KernelSumError", "NFFTPlan",
    "OracleBudgetError", "Rescaling", "SliceBatchConfig", "SpectralSample", "SumResult",
    "UnsupportedKernelError", "eval_F", "eval_f", "exact_sum", "fastsum_1d", "fourier_fastsum",
    "laplace_fastsum", "ndft_adjoint", "ndft_forward", "negdist_fastsum", "nfft_adjoint",
    "nfft_forward", "numeric_fourier_coeffs", "per_summand_error", "rescale", "rff_sum",
    "sample_directions", "sample_spectral", "select_coeff_set", "slice_transform_numeric",
    "sliced_kernel_sum", "slicing_error_bound",
]
