"""Layer forward oracles and finite-difference gradient checks."""

import numpy as np
import pytest

from gradcheck import check_layer_gradients
from radarmit.nn import BatchNorm2d, Conv2d, Identity, ReLU


def naive_conv(x, weight, bias):
    """Direct quadruple-loop same-padded cross-correlation (oracle)."""
    b, c_in, h, w = x.shape
    c_out, _, s1, s2 = weight.shape
    p1, p2 = s1 // 2, s2 // 2
    xp = np.pad(x, ((0, 0), (0, 0), (p1, p1), (p2, p2)))
    y = np.zeros((b, c_out, h, w))
    for bi in range(b):
        for o in range(c_out):
            for i in range(h):
                for j in range(w):
                    acc = 0.0
                    for c in range(c_in):
                        for u in range(s1):
                            for v in range(s2):
                                acc += weight[o, c, u, v] * xp[bi, c, i + u, j + v]
                    y[bi, o, i, j] = acc + bias[o]
    return y


class TestConvForward:
    def test_identity_kernel(self):
        rng = np.random.default_rng(0)
        layer = Conv2d(3, 3, (1, 1), rng)
        layer.weight.data = np.eye(3).reshape(3, 3, 1, 1)
        layer.bias.data[:] = 0.0
        x = rng.normal(size=(2, 3, 4, 5))
        assert np.allclose(layer.forward(x), x, atol=1e-15)

    def test_matches_naive_oracle(self):
        rng = np.random.default_rng(1)
        layer = Conv2d(2, 4, (3, 3), rng)
        x = rng.normal(size=(1, 2, 5, 5))
        got = layer.forward(x)
        want = naive_conv(x, layer.weight.data, layer.bias.data)
        assert np.abs(got - want).max() < 1e-12

    def test_matches_naive_oracle_1d(self):
        rng = np.random.default_rng(2)
        layer = Conv2d(2, 3, (1, 5), rng)
        x = rng.normal(size=(2, 2, 1, 9))
        got = layer.forward(x)
        want = naive_conv(x, layer.weight.data, layer.bias.data)
        assert np.abs(got - want).max() < 1e-12

    def test_parameter_count_example(self):
        layer = Conv2d(2, 16, (3, 3))
        assert layer.n_params == 304

    def test_channel_mismatch_rejected(self):
        layer = Conv2d(2, 4, (3, 3))
        with pytest.raises(ValueError, match="expected"):
            layer.forward(np.zeros((1, 3, 4, 4)))

    def test_even_kernel_rejected(self):
        with pytest.raises(ValueError, match="odd"):
            Conv2d(1, 1, (2, 2))

    def test_shape_preserved(self):
        rng = np.random.default_rng(3)
        for s in [(1, 1), (3, 3), (1, 41), (5, 7)]:
            layer = Conv2d(2, 3, s, rng)
            x = rng.normal(size=(1, 2, 6, 48))
            assert layer.forward(x).shape == (1, 3, 6, 48)


class TestConvBackward:
    def test_zero_upstream_zero_grads(self):
        rng = np.random.default_rng(4)
        layer = Conv2d(2, 2, (3, 3), rng)
        x = rng.normal(size=(1, 2, 4, 4))
        layer.forward(x, training=True)
        gx = layer.backward(np.zeros((1, 2, 4, 4)))
        assert not gx.any() and not layer.weight.grad.any() and not layer.bias.grad.any()

    def test_upstream_linearity(self):
        rng = np.random.default_rng(5)
        layer = Conv2d(2, 3, (3, 3), rng)
        x = rng.normal(size=(1, 2, 4, 4))
        g1 = rng.normal(size=(1, 3, 4, 4))
        g2 = rng.normal(size=(1, 3, 4, 4))
        layer.forward(x, training=True)
        layer.weight.zero_grad(); layer.bias.zero_grad()
        gx1 = layer.backward(g1)
        w1 = layer.weight.grad.copy()
        layer.weight.zero_grad(); layer.bias.zero_grad()
        gx2 = layer.backward(g2)
        w2 = layer.weight.grad.copy()
        layer.weight.zero_grad(); layer.bias.zero_grad()
        gx12 = layer.backward(g1 + g2)
        w12 = layer.weight.grad.copy()
        assert np.abs(gx12 - (gx1 + gx2)).max() < 1e-12
        assert np.abs(w12 - (w1 + w2)).max() < 1e-12

    @pytest.mark.parametrize("seed", range(10))
    def test_finite_difference_2d(self, seed):
        rng = np.random.default_rng(seed)
        c_in = int(rng.integers(1, 4))
        c_out = int(rng.integers(1, 4))
        s = int(rng.choice([1, 3, 5]))
        layer = Conv2d(c_in, c_out, (s, s), rng)
        x = rng.normal(size=(int(rng.integers(1, 3)), c_in,
                             int(rng.integers(2, 6)), int(rng.integers(2, 6))))
        check_layer_gradients(layer, x, rng)

    @pytest.mark.parametrize("seed", range(10))
    def test_finite_difference_1d(self, seed):
        rng = np.random.default_rng(100 + seed)
        c_in = int(rng.integers(1, 3))
        c_out = int(rng.integers(1, 3))
        s2 = int(rng.choice([1, 3, 7]))
        layer = Conv2d(c_in, c_out, (1, s2), rng)
        x = rng.normal(size=(int(rng.integers(1, 3)), c_in, 1, int(rng.integers(4, 12))))
        check_layer_gradients(layer, x, rng)


class TestBatchNorm:
    def test_normalizes_in_train_mode(self):
        rng = np.random.default_rng(6)
        bn = BatchNorm2d(3)
        x = rng.normal(loc=5.0, scale=3.0, size=(4, 3, 8, 8))
        y = bn.forward(x, training=True)
        assert np.abs(y.mean(axis=(0, 2, 3))).max() < 1e-6
        assert np.abs(y.var(axis=(0, 2, 3)) - 1.0).max() < 1e-5

    def test_constant_channel_outputs_beta(self):
        bn = BatchNorm2d(2)
        bn.beta.data[:] = [1.5, -0.5]
        x = np.full((2, 2, 4, 4), 7.0)
        y = bn.forward(x, training=True)
        assert np.allclose(y[:, 0], 1.5) and np.allclose(y[:, 1], -0.5)

    def test_eval_before_train_rejected(self):
        bn = BatchNorm2d(2)
        with pytest.raises(RuntimeError, match="eval"):
            bn.forward(np.zeros((1, 2, 2, 2)), training=False)

    def test_eval_uses_running_stats(self):
        rng = np.random.default_rng(7)
        bn = BatchNorm2d(2, momentum=1.0)  # running stats = last batch stats
        x = rng.normal(size=(4, 2, 6, 6))
        bn.forward(x, training=True)
        y_eval = bn.forward(x, training=False)
        mean = x.mean(axis=(0, 2, 3))
        var = x.var(axis=(0, 2, 3))
        want = (x - mean[None, :, None, None]) / np.sqrt(var + bn.eps)[None, :, None, None]
        assert np.abs(y_eval - want).max() < 1e-12

    @pytest.mark.parametrize("seed", range(10))
    def test_finite_difference(self, seed):
        rng = np.random.default_rng(200 + seed)
        ch = int(rng.integers(1, 4))
        bn = BatchNorm2d(ch)
        bn.gamma.data = rng.normal(1.0, 0.2, size=ch)
        bn.beta.data = rng.normal(0.0, 0.2, size=ch)
        x = rng.normal(size=(int(rng.integers(2, 4)), ch,
                             int(rng.integers(2, 5)), int(rng.integers(2, 5))))
        check_layer_gradients(bn, x, rng)


class TestReLU:
    def test_values(self):
        relu = ReLU()
        assert relu.forward(np.array([[[[-1.0, 2.0, 0.0]]]])).tolist() == [[[[0.0, 2.0, 0.0]]]]

    def test_subgradient_at_zero_is_zero(self):
        relu = ReLU()
        x = np.zeros((1, 1, 1, 3))
        relu.forward(x, training=True)
        g = relu.backward(np.ones_like(x))
        assert not g.any()

    @pytest.mark.parametrize("seed", range(5))
    def test_finite_difference(self, seed):
        rng = np.random.default_rng(300 + seed)
        # keep values away from the kink so central differences are valid
        x = rng.normal(size=(2, 2, 3, 3))
        x[np.abs(x) < 1e-2] = 0.5
        check_layer_gradients(ReLU(), x, rng)

    def test_identity_layer(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=(1, 2, 3, 3))
        layer = Identity()
        assert layer.forward(x) is x
        g = rng.normal(size=x.shape)
        assert layer.backward(g) is g


class TestFiniteGuards:
    def test_conv_rejects_nan(self):
        layer = Conv2d(1, 1, (1, 1))
        layer.weight.data[:] = np.nan
        with pytest.raises(FloatingPointError):
            layer.forward(np.ones((1, 1, 2, 2)))
