"""Non-equispaced discrete Fourier transforms in one dimension.

Conventions, for nodes ``x_j`` in ``[-1/2, 1/2)`` and integer frequencies k:

* adjoint  ``w_hat[k] = sum_j w[j] exp(-2 pi i k x_j)``
* forward  ``t[j] = sum_k v[k] exp(2 pi i k y_j)``

The NDFT routines evaluate these sums directly. The NFFT approximates them
for a contiguous band ``-K..K`` by gridding with a truncated Gaussian window
on a twice oversampled FFT grid.
"""

import math

import numpy as np

from .exceptions import ConfigurationError, ContractError, DomainError

# frequencies handled per block of the direct transforms
_BLOCK = 256


def _check_nodes(nodes):
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim != 1:
        raise DomainError("nodes must be one-dimensional")
    if np.any(~((nodes >= -0.5) & (nodes < 0.5))):
        raise DomainError("nodes must lie in [-1/2, 1/2)")
    return nodes


def _check_freqs(freqs):
    freqs = np.asarray(freqs)
    if freqs.ndim != 1 or not np.issubdtype(freqs.dtype, np.integer):
        freqs = np.asarray(freqs, dtype=float)
        if np.any(freqs != np.round(freqs)):
            raise DomainError("frequencies must be integers")
        freqs = freqs.astype(np.int64)
    return freqs.reshape(-1)


def ndft_adjoint(nodes, weights, freqs):
    """Exact adjoint transform ``sum_j w_j exp(-2 pi i k x_j)`` for every k."""
    nodes = _check_nodes(nodes)
    freqs = _check_freqs(freqs)
    weights = np.asarray(weights)
    if weights.shape != nodes.shape:
        raise ContractError("weights and nodes differ in length")
    out = np.empty(freqs.shape, dtype=complex)
    for start in range(0, freqs.size, _BLOCK):
        k = freqs[start:start + _BLOCK].astype(float)
        phase = np.exp(-2j * np.pi * np.outer(k, nodes))
        out[start:start + _BLOCK] = phase @ weights
    return out


def _conjugate_partner(freqs, spectrum):
    """Spectrum value at -k for every k, or None if some -k is missing."""
    order = np.argsort(freqs)
    pos = np.searchsorted(freqs[order], -freqs)
    pos = np.minimum(pos, freqs.size - 1)
    if not np.array_equal(freqs[order][pos], -freqs):
        return None
    return spectrum[order][pos]


def _check_conjugate_symmetric(freqs, spectrum, rtol=1e-12):
    partner = _conjugate_partner(freqs, spectrum)
    if partner is None:
        raise ContractError("real output requested but the frequency set is not symmetric")
    scale = np.max(np.abs(spectrum), initial=0.0)
    if np.any(np.abs(partner - np.conj(spectrum)) > rtol * scale):
        raise ContractError("real output requested but the spectrum is not conjugate symmetric")


def _real_part(values, spectrum):
    scale = np.sum(np.abs(spectrum))
    if np.any(np.abs(values.imag) > 1e-10 * max(scale, np.finfo(float).tiny)):
        raise ContractError("imaginary residue exceeds 1e-10 relative")
    return values.real.copy()


def ndft_forward(nodes, spectrum, freqs, real=True):
    """Exact forward transform ``sum_k v_k exp(2 pi i k y_j)`` at every node.

    With ``real=True`` the spectrum must be conjugate symmetric and the real
    part is returned after checking that the imaginary residue is negligible.
    """
    nodes = _check_nodes(nodes)
    freqs = _check_freqs(freqs)
    spectrum = np.asarray(spectrum, dtype=complex)
    if spectrum.shape != freqs.shape:
        raise ContractError("spectrum and frequency list differ in length")
    if real:
        _check_conjugate_symmetric(freqs, spectrum)
    out = np.zeros(nodes.shape, dtype=complex)
    for start in range(0, freqs.size, _BLOCK):
        k = freqs[start:start + _BLOCK].astype(float)
        phase = np.exp(2j * np.pi * np.outer(nodes, k))
        out += phase @ spectrum[start:start + _BLOCK]
    return _real_part(out, spectrum) if real else out


def gaussian_window_error(m, oversampling=2.0):
    """Error bound ``4 exp(-m pi (1 - 1/(2 sigma - 1)))`` of the Gaussian window."""
    return 4.0 * math.exp(-m * math.pi * (1.0 - 1.0 / (2.0 * oversampling - 1.0)))


def window_cutoff(accuracy, oversampling=2.0, m_max=30):
    """Smallest cutoff m whose window error bound meets ``accuracy``."""
    for m in range(1, m_max + 1):
        if gaussian_window_error(m, oversampling) <= accuracy:
            return m
    raise ConfigurationError(f"accuracy {accuracy} needs a window cutoff beyond m={m_max}")


class NFFTPlan:
    """Precomputed gridding tables for a fixed node set and band ``-K..K``.

    Parameters
    ----------
    nodes : array_like
        Points in ``[-1/2, 1/2)``.
    K : int
        Band limit.
    accuracy : float
        Target for ``max |NFFT - NDFT| / ||input||_1``.
    m : int, optional
        Window cutoff; chosen from ``accuracy`` when omitted. An explicit m
        whose error bound exceeds ``accuracy`` is rejected.
    oversampling : float
        Ratio of FFT grid length to band length.

    The plan is read-only after construction and can be shared by threads.
    """

    def __init__(self, nodes, K, accuracy=1e-8, m=None, oversampling=2.0):
        self.nodes = _check_nodes(nodes)
        self.K = int(K)
        if self.K < 0:
            raise DomainError("K must be non-negative")
        if not oversampling > 1:
            raise ConfigurationError("oversampling must exceed 1")
        if m is None:
            m = window_cutoff(accuracy, oversampling)
        elif gaussian_window_error(m, oversampling) > accuracy:
            raise ConfigurationError(
                f"window cutoff m={m} reaches only {gaussian_window_error(m, oversampling):.1e},"
                f" not {accuracy:.1e}")
        self.m = int(m)
        self.accuracy = accuracy
        n_band = 2 * self.K + 2
        n_grid = int(2 ** math.ceil(math.log2(oversampling * n_band)))
        n_grid = max(n_grid, 2 * (2 * self.m + 2))
        self.n_grid = n_grid
        sigma_eff = n_grid / n_band
        self.b = 2.0 * sigma_eff * self.m / ((2.0 * sigma_eff - 1.0) * math.pi)

        u = n_grid * self.nodes
        base = np.floor(u).astype(np.int64)
        offsets = np.arange(-self.m, self.m + 2)
        cols = base[:, None] + offsets[None, :]
        self._index = np.mod(cols, n_grid)
        self._window = np.exp(-((u[:, None] - cols) ** 2) / self.b)

        k = np.arange(-self.K, self.K + 1)
        phi_hat = math.sqrt(math.pi * self.b) / n_grid * np.exp(-self.b * (math.pi * k / n_grid) ** 2)
        self._deconv = 1.0 / (n_grid * phi_hat)
        self._kpos = np.mod(k, n_grid)

    @property
    def freqs(self):
        return np.arange(-self.K, self.K + 1)

    def adjoint(self, weights):
        weights = np.asarray(weights, dtype=float)
        if weights.shape != self.nodes.shape:
            raise ContractError("weights and nodes differ in length")
        if self.K == 0:
            return np.array([math.fsum(weights)], dtype=complex)
        grid = np.bincount(self._index.ravel(), weights=(weights[:, None] * self._window).ravel(),
                           minlength=self.n_grid)
        spectrum = np.fft.fft(grid)
        return spectrum[self._kpos] * self._deconv

    def forward(self, spectrum, real=True):
        spectrum = np.asarray(spectrum, dtype=complex)
        if spectrum.shape != (2 * self.K + 1,):
            raise ContractError("spectrum does not match the band")
        if real:
            _check_conjugate_symmetric(self.freqs, spectrum)
        if self.K == 0:
            out = np.full(self.nodes.shape, spectrum[0])
            return _real_part(out, spectrum) if real else out
        g_hat = np.zeros(self.n_grid, dtype=complex)
        g_hat[self._kpos] = spectrum * self._deconv
        grid = np.fft.ifft(g_hat) * self.n_grid
        if real:
            values = np.sum(grid.real[self._index] * self._window, axis=1)
            return values
        return np.sum(grid[self._index] * self._window, axis=1)


def _band_limit(freqs):
    freqs = _check_freqs(freqs)
    K = int(freqs.max()) if freqs.size else 0
    if not np.array_equal(np.sort(freqs), np.arange(-K, K + 1)):
        raise ContractError("NFFT needs the contiguous band -K..K")
    return freqs, K


def nfft_adjoint(nodes, weights, freqs, accuracy=1e-8, m=None):
    """Approximate ``ndft_adjoint`` for a contiguous band of frequencies."""
    freqs, K = _band_limit(freqs)
    plan = NFFTPlan(nodes, K, accuracy=accuracy, m=m)
    out = plan.adjoint(weights)
    # return in the caller's frequency order
    return out[freqs + K]


def nfft_forward(nodes, spectrum, freqs, accuracy=1e-8, m=None, real=True):
    """Approximate ``ndft_forward`` for a contiguous band of frequencies."""
    freqs, K = _band_limit(freqs)
    spectrum = np.asarray(spectrum, dtype=complex)
    if spectrum.shape != freqs.shape:
        raise ContractError("spectrum and frequency list differ in length")
    ordered = np.empty_like(spectrum)
    ordered[freqs + K] = spectrum
    plan = NFFTPlan(nodes, K, accuracy=accuracy, m=m)
    return plan.forward(ordered, real=real)
