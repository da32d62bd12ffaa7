import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kernelsum import fastsum1d as fs
from kernelsum import kernels as kc
from kernelsum.exceptions import ContractError, DomainError, UnsupportedKernelError
from kernelsum.kernels import FourierCoeffSet, KernelSpec


def brute_1d(f, x, y, w):
    return f(np.abs(y[:, None] - x[None, :])) @ w


def per_summand(exact, approx, w):
    return np.abs(exact - approx).sum() / (exact.size * np.abs(w).sum())


class TestRescale:
    def test_degenerate_width(self):
        xt, yt, r = fs.rescale([3.0, 3.0], [3.0], T=0.2)
        assert r.tau == 1.0
        assert np.all(xt == 0) and np.all(yt == 0)

    def test_span(self):
        xt, yt, r = fs.rescale([0.0, 10.0], [4.0], T=0.2)
        assert r.tau == pytest.approx(0.04)
        both = np.concatenate([xt, yt])
        assert both.min() == pytest.approx(-0.2) and both.max() == pytest.approx(0.2)

    def test_invalid_threshold(self):
        with pytest.raises(DomainError):
            fs.rescale([0.0, 1.0], [0.5], T=0.3)

    def test_gaussian_sum_is_invariant(self):
        gen = np.random.default_rng(3)
        x, y, w = gen.uniform(2, 9, 50), gen.uniform(2, 9, 40), gen.standard_normal(50)
        spec = KernelSpec.gaussian(0.8, 1)
        xt, yt, r = fs.rescale(x, y)
        scaled = r.scale_spec(spec)
        before = brute_1d(lambda s: kc.eval_f(spec, s), x, y, w)
        after = brute_1d(lambda s: kc.eval_f(scaled, s), xt, yt, w)
        np.testing.assert_allclose(after, before, rtol=0, atol=1e-12 * np.abs(w).sum())


class TestFourier:
    def test_zero_weights(self):
        c = kc.select_coeff_set(0.05, 10)
        assert np.all(fs.fourier_fastsum([0.1, -0.1], [0.0, 0.2], np.zeros(2), c) == 0)

    def test_constant_coefficient(self):
        c = FourierCoeffSet([0], [1.0])
        w = np.array([0.5, 2.0, -1.0])
        np.testing.assert_allclose(fs.fourier_fastsum([0.1, 0.0, -0.2], [0.15, -0.2], w, c), 1.5)

    def test_tau_contract(self):
        c = kc.select_coeff_set(0.05, 10, tau=0.5)
        with pytest.raises(ContractError):
            fs.fourier_fastsum([0.0], [0.0], [1.0], c, tau=0.25)

    def test_nfft_needs_band(self):
        c = kc.select_coeff_set(0.05, 10)
        with pytest.raises(ContractError):
            fs.fourier_fastsum([0.0], [0.0], [1.0], c, engine="nfft")

    def test_gaussian_against_brute_force(self):
        gen = np.random.default_rng(4)
        x, y, w = gen.uniform(-0.2, 0.2, 1000), gen.uniform(-0.2, 0.2, 1000), gen.uniform(0, 1, 1000)
        sigma, d = 0.05, 50
        c = kc.select_coeff_set(sigma, d)
        got = fs.fourier_fastsum(x, y, w, c)
        exact = brute_1d(lambda s: kc.eval_f(KernelSpec.gaussian(sigma, d), s, abs_tol=1e-15),
                         x, y, w)
        assert per_summand(exact, got, w) <= 1e-6
        # truncation bound: N max|phi - series| max|w|
        u = np.linspace(-0.5, 0.5, 10001)
        trunc = np.abs(kc.eval_f(KernelSpec.gaussian(sigma, d), np.abs(u)) - c.evaluate(u)).max()
        assert np.abs(got - exact).max() <= 1000 * trunc * w.max() + 1e-12

    def test_batches_match_rows(self):
        gen = np.random.default_rng(5)
        x, y, w = gen.uniform(-0.2, 0.2, (3, 30)), gen.uniform(-0.2, 0.2, (3, 20)), gen.random(30)
        c = kc.select_coeff_set(0.05, 20)
        batch = fs.fourier_fastsum(x, y, w, c)
        for b in range(3):
            np.testing.assert_array_equal(batch[b], fs.fourier_fastsum(x[b], y[b], w, c))

    def test_engines_agree(self):
        gen = np.random.default_rng(6)
        x, y, w = gen.uniform(-0.2, 0.2, 200), gen.uniform(-0.2, 0.2, 150), gen.standard_normal(200)
        c = kc.numeric_fourier_coeffs(KernelSpec.matern(1, 1.0, 10), 0.1, 64)
        a = fs.fourier_fastsum(x, y, w, c, engine="ndft")
        b = fs.fourier_fastsum(x, y, w, c, engine="nfft")
        assert np.abs(a - b).max() <= 1e-8 * np.abs(w).sum() * np.abs(c.coeffs).sum()


class TestSorting:
    def test_equal_points(self):
        assert np.all(fs.negdist_fastsum_sorted(np.full(5, 2.0), np.arange(5.0)) == 0)

    def test_hand_instance(self):
        t = fs.negdist_fastsum_sorted(np.array([0.0, 0.5, 1.0]), np.array([1.0, 0.0, 1.0]))
        assert t[1] == pytest.approx(-1.0, abs=1e-15)

    def test_unsorted_rejected(self):
        with pytest.raises(ContractError):
            fs.negdist_fastsum_sorted(np.array([1.0, 0.0]), np.ones(2))

    def test_examples(self):
        assert fs.negdist_fastsum([0.0, 1.0], [0.5], [1.0, 1.0], d=1)[0] == pytest.approx(-1.0)
        assert fs.negdist_fastsum([0.3], [0.3], [4.0], d=5)[0] == 0.0

    @given(st.integers(0, 2**32 - 1), st.floats(-1e3, 1e3))
    @settings(max_examples=20, deadline=None)
    def test_translation_invariance(self, seed, shift):
        gen = np.random.default_rng(seed)
        z = np.sort(gen.uniform(-1, 1, 40))
        v = gen.standard_normal(40)
        t0 = fs.negdist_fastsum_sorted(z, v)
        t1 = fs.negdist_fastsum_sorted(z + shift, v)
        scale = np.abs(v).sum() * (2 + abs(shift))
        assert np.abs(t0 - t1).max() <= 1e-12 * scale

    @pytest.mark.parametrize("d", [1, 3, 10])
    def test_against_brute_force(self, d):
        gen = np.random.default_rng(d)
        x, y, w = gen.normal(0, 1, 200), gen.normal(0, 1, 200), gen.standard_normal(200)
        got = fs.negdist_fastsum(x, y, w, d)
        exact = brute_1d(lambda s: -kc.negdist_constant(d) * s, x, y, w)
        diam = np.ptp(np.concatenate([x, y]))
        assert np.abs(got - exact).max() <= 1e-10 * np.abs(w).sum() * diam


class TestLaplace:
    def test_decomposition_identity(self):
        s = np.linspace(0, 3, 301)
        for d in (1, 3, 10):
            spec = KernelSpec.laplacian(0.7, d)
            smooth = kc.laplace_smooth_f(0.7, d, s)
            rough = -0.7 * kc.negdist_constant(d) * s
            np.testing.assert_allclose(smooth + rough, kc.eval_f(spec, s), rtol=0, atol=1e-12)

    def test_d1_is_exponential(self):
        s = np.linspace(0, 3, 31)
        np.testing.assert_allclose(kc.eval_f(KernelSpec.laplacian(1.3, 1), s), np.exp(-1.3 * s),
                                   rtol=1e-13)

    def test_small_alpha_tight_cluster(self):
        gen = np.random.default_rng(8)
        x, y, w = gen.normal(0, 0.01, 100), gen.normal(0, 0.01, 100), gen.random(100)
        got = fs.fastsum_1d(KernelSpec.laplacian(1e-6, 10), x, y, w)
        np.testing.assert_allclose(got, w.sum(), rtol=1e-4)

    def test_against_brute_force(self):
        gen = np.random.default_rng(9)
        x, y, w = gen.normal(0, 1, 1000), gen.normal(0, 1, 1000), gen.random(1000)
        spec = KernelSpec.laplacian(0.5, 10)
        got = fs.fastsum_1d(spec, x, y, w)
        exact = brute_1d(lambda s: kc.eval_f(spec, s), x, y, w)
        assert per_summand(exact, got, w) <= 1e-5


class TestPlan:
    def test_matern_against_brute_force(self):
        gen = np.random.default_rng(10)
        x, y, w = gen.normal(0, 1, 500), gen.normal(0, 1, 500), gen.random(500)
        spec = KernelSpec.matern(1, 1.0, 10)
        got = fs.fastsum_1d(spec, x, y, w)
        exact = brute_1d(lambda s: kc.eval_f(spec, s, extended=True), x, y, w)
        assert per_summand(exact, got, w) <= 1e-6

    def test_outside_range_rejected(self):
        plan = fs.FastSum1D(KernelSpec.gaussian(1.0, 5), -1.0, 1.0)
        with pytest.raises(DomainError):
            plan(np.array([0.0, 2.0]), np.array([0.0]), np.ones(2))

    def test_unsupported(self):
        with pytest.raises(UnsupportedKernelError):
            fs.FastSum1D(KernelSpec.thinplate(3), -1.0, 1.0)
        with pytest.raises(UnsupportedKernelError):
            fs.FastSum1D(KernelSpec.riesz(0.5, 3), -1.0, 1.0)

    def test_riesz_one_uses_sorting(self):
        plan = fs.FastSum1D(KernelSpec.riesz(1.0, 4), -1.0, 1.0)
        assert plan.engine == "sort"
