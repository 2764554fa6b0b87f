"""Product-integration weights, history application, Caputo L1."""

import numpy as np
import pytest
from scipy.special import gamma

from fjmgt import (
    ConfigError,
    HistoryBuffer,
    KernelSpec,
    LengthMismatch,
    QuadratureWeights,
    WeightOverflow,
    caputo_l1,
    compose_weights,
    conv_apply,
    conv_sequence,
    kernel_moment,
    pi_weights,
    power_weights,
    resolvent,
)


class TestPiWeights:
    def test_abel_lag0_exact_moment(self):
        w = pi_weights(KernelSpec.abel(0.75), 0.1, 5)
        # oracle: integral of the kernel over [0, dt] = dt^(1-a)/Gamma(2-a)
        assert w.w0 == pytest.approx(0.6204101813767776, rel=1e-12)
        assert w.w0 == pytest.approx(kernel_moment(KernelSpec.abel(0.75), 0, 0.1), rel=1e-14)

    def test_delta_is_identity_stencil(self):
        w = pi_weights(KernelSpec.delta(), 0.3, 4)
        assert w.lag_weights[0] == 1.0
        assert np.all(w.lag_weights[1:] == 0.0)

    def test_constant_one_resolvent_weights(self):
        res = resolvent(KernelSpec.delta())
        w = pi_weights(res, 0.1, 4)
        assert np.allclose(w.lag_weights, 0.1)

    def test_weights_positive_nonincreasing_for_decreasing_kernels(self):
        for spec in (KernelSpec.abel(0.6), KernelSpec.abel(0.9)):
            w = pi_weights(spec, 1e-3, 200).lag_weights
            assert np.all(w > 0.0)
            assert np.all(np.diff(w) <= 0.0)

    def test_cap(self):
        with pytest.raises(WeightOverflow):
            pi_weights(KernelSpec.abel(0.75), 1e-9, 10**7 + 1)
        with pytest.raises(ConfigError):
            pi_weights(KernelSpec.abel(0.75), -1.0, 10)


class TestConvApply:
    def test_single_term(self):
        w = QuadratureWeights(dt=1.0, lag_weights=np.array([0.5, 0.1]), kernel_id="x")
        assert conv_apply(w, np.empty((0,)), 3.0) == pytest.approx(1.5)

    def test_constant_integrand_reproduces_moment(self):
        # exact-moment property: conv of 1 equals the cumulative kernel mass
        spec = KernelSpec.abel(0.75)
        w = pi_weights(spec, 1e-2, 100)
        ones = np.ones(100)
        conv = conv_sequence(w, ones)
        t_nodes = 1e-2 * np.arange(1, 101)
        assert np.allclose(conv, kernel_moment(spec, 0, t_nodes), rtol=1e-13)

    def test_delta_weights_are_identity(self):
        w = pi_weights(KernelSpec.delta(), 1e-2, 10)
        rng = np.random.default_rng(3)
        hist = rng.standard_normal((7, 4))
        cur = rng.standard_normal(4)
        assert np.allclose(conv_apply(w, hist, cur), cur)

    def test_length_mismatch(self):
        w = QuadratureWeights(dt=1.0, lag_weights=np.array([0.5]), kernel_id="x")
        with pytest.raises(LengthMismatch):
            conv_apply(w, np.ones(3), 1.0)

    def test_linearity(self):
        w = pi_weights(KernelSpec.abel(0.6), 1e-2, 50)
        rng = np.random.default_rng(11)
        h1, h2 = rng.standard_normal((2, 30))
        c1, c2 = rng.standard_normal(2)
        a, b = 1.7, -0.3
        lhs = conv_apply(w, a * h1 + b * h2, a * c1 + b * c2)
        rhs = a * conv_apply(w, h1, c1) + b * conv_apply(w, h2, c2)
        assert lhs == pytest.approx(rhs, rel=1e-13)


class TestComposition:
    def test_composed_weights_equal_nested_application(self):
        # lower-triangular Toeplitz algebra: W_a W_b = W_(a conv b)
        dt, n = 1e-2, 60
        wa = pi_weights(KernelSpec.abel(0.75), dt, n)
        wb = power_weights(1.0, dt, n)
        rng = np.random.default_rng(8)
        v = rng.standard_normal(n)
        nested = conv_sequence(wa, conv_sequence(wb, v))
        direct = conv_sequence(compose_weights(wa, wb), v)
        assert np.allclose(nested, direct, atol=1e-14)

    def test_memory_simplification_surrogate(self):
        # discrete kernel*(1*(resolvent*v)) tracks t*v within 5 dt
        dt, n = 1e-3, 1000
        rng = np.random.default_rng(21)
        for alpha in (0.6, 0.9):
            spec = KernelSpec.abel(alpha)
            wk = pi_weights(spec, dt, n)
            w1 = power_weights(1.0, dt, n)
            wr = pi_weights(resolvent(spec), dt, n)
            wt = power_weights(2.0, dt, n)
            v = rng.uniform(-1.0, 1.0, n)
            lhs = conv_sequence(compose_weights(compose_weights(wk, w1), wr), v)
            rhs = conv_sequence(wt, v)
            assert np.max(np.abs(lhs - rhs)) <= 5 * dt

    def test_compose_requires_same_grid(self):
        with pytest.raises(ConfigError):
            compose_weights(power_weights(1.0, 0.1, 3), power_weights(1.0, 0.2, 3))


class TestCaputoL1:
    def test_linear_function_exact(self):
        # L1 is exact on f = t: values equal t^(1-a)/Gamma(2-a)
        t = np.linspace(0.0, 1.0, 1001)
        d = caputo_l1(0.75, t, 1e-3)
        assert d[-1] == pytest.approx(1.1032626513208372, rel=1e-12)
        exact = t ** 0.25 / gamma(1.25)
        assert np.allclose(d[1:], exact[1:], rtol=1e-12)

    def test_constant_gives_zero(self):
        assert np.all(caputo_l1(0.5, np.full(100, 7.0), 1e-2) == 0.0)

    def test_quadratic_value(self):
        t = np.linspace(0.0, 1.0, 1001)
        d = caputo_l1(0.5, t**2, 1e-3)
        assert d[-1] == pytest.approx(1.5045055561273502, rel=2e-2)

    def test_self_convergence_order(self):
        # observed order on f = t^2 should be near the classical 2 - alpha
        alpha = 0.5
        errs = []
        for n in (250, 500, 1000):
            t = np.linspace(0.0, 1.0, n + 1)
            d = caputo_l1(alpha, t**2, 1.0 / n)
            exact = 2.0 * t ** (2 - alpha) / gamma(3 - alpha)
            errs.append(np.max(np.abs(d[n // 10:] - exact[n // 10:])))
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(orders >= 2 - alpha - 0.2)

    def test_order_validation(self):
        with pytest.raises(ConfigError):
            caputo_l1(1.2, np.zeros(4), 0.1)


class TestHistoryBuffer:
    def test_append_and_view(self):
        buf = HistoryBuffer(5, 3)
        assert len(buf) == 0
        buf.append([1.0, 2.0, 3.0])
        buf.append([4.0, 5.0, 6.0])
        v = buf.view()
        assert v.shape == (2, 3)
        assert not v.flags.writeable
        assert np.allclose(v[1], [4.0, 5.0, 6.0])
