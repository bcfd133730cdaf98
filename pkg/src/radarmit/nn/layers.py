"""Layers with explicit forward/backward passes over (B, C, H, W) arrays.

Convolution is cross-correlation (the usual deep-learning convention) with
"same" zero padding, so spatial dimensions are preserved through every
layer. 1-D kernels are the (1, s2) special case. All arithmetic is double
precision; gradients accumulate into each parameter's .grad.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .tensor import Tensor, check_finite


class Layer:
    def params(self) -> list[Tensor]:
        return []

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class Conv2d(Layer):
    """Same-padded cross-correlation with per-output-channel bias.

    kernels: (out_ch, in_ch, s1, s2), odd kernel dims only (so "same"
    padding is symmetric). Parameter count = out_ch*in_ch*s1*s2 + out_ch.
    """

    def __init__(self, in_ch: int, out_ch: int, kernel_size: tuple[int, int],
                 rng: np.random.Generator | None = None):
        s1, s2 = kernel_size
        if s1 % 2 == 0 or s2 % 2 == 0 or s1 < 1 or s2 < 1:
            raise ValueError(f"kernel dims must be odd and positive, got {kernel_size}")
        self.in_ch = in_ch
        self.out_ch = out_ch
        self.kernel_size = (s1, s2)
        fan_in = in_ch * s1 * s2
        if rng is None:
            rng = np.random.default_rng()
        # Kaiming fan-in init for ReLU stacks; biases start at zero.
        std = np.sqrt(2.0 / fan_in)
        self.weight = Tensor(rng.normal(0.0, std, size=(out_ch, in_ch, s1, s2)))
        self.bias = Tensor(np.zeros(out_ch))
        self._x_padded = None

    def params(self) -> list[Tensor]:
        return [self.weight, self.bias]

    @property
    def n_params(self) -> int:
        return self.weight.size + self.bias.size

    def _pad(self, x: np.ndarray) -> np.ndarray:
        p1 = self.kernel_size[0] // 2
        p2 = self.kernel_size[1] // 2
        return np.pad(x, ((0, 0), (0, 0), (p1, p1), (p2, p2)))

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        if x.ndim != 4 or x.shape[1] != self.in_ch:
            raise ValueError(f"expected (B, {self.in_ch}, H, W) input, got shape {x.shape}")
        xp = self._pad(x)
        if training:
            self._x_padded = xp
        windows = sliding_window_view(xp, self.kernel_size, axis=(2, 3))
        y = np.einsum("bchwuv,ocuv->bohw", windows, self.weight.data, optimize=True)
        y += self.bias.data[None, :, None, None]
        return check_finite("conv output", y)

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        if self._x_padded is None:
            raise RuntimeError("backward called without a training-mode forward")
        s1, s2 = self.kernel_size
        windows = sliding_window_view(self._x_padded, (s1, s2), axis=(2, 3))
        self.weight.grad += np.einsum("bohw,bchwuv->ocuv", grad_out, windows, optimize=True)
        self.bias.grad += grad_out.sum(axis=(0, 2, 3))
        # Input gradient: same-padded correlation of grad_out with the
        # spatially flipped kernels, channels transposed.
        gp = np.pad(grad_out, ((0, 0), (0, 0), (s1 // 2, s1 // 2), (s2 // 2, s2 // 2)))
        gwin = sliding_window_view(gp, (s1, s2), axis=(2, 3))
        flipped = self.weight.data[:, :, ::-1, ::-1]
        return np.einsum("bohwuv,ocuv->bchw", gwin, flipped, optimize=True)


class BatchNorm2d(Layer):
    """Per-channel batch normalization over the batch and spatial axes."""

    def __init__(self, channels: int, eps: float = 1e-5, momentum: float = 0.1):
        self.channels = channels
        self.eps = eps
        self.momentum = momentum
        self.gamma = Tensor(np.ones(channels))
        self.beta = Tensor(np.zeros(channels))
        self.running_mean = np.zeros(channels)
        self.running_var = np.ones(channels)
        self.batches_tracked = 0
        self._cache = None

    def params(self) -> list[Tensor]:
        return [self.gamma, self.beta]

    @property
    def n_params(self) -> int:
        return 2 * self.channels

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        if x.ndim != 4 or x.shape[1] != self.channels:
            raise ValueError(f"expected (B, {self.channels}, H, W) input, got shape {x.shape}")
        axes = (0, 2, 3)
        if training:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            self.running_mean = (1 - self.momentum) * self.running_mean + self.momentum * mean
            self.running_var = (1 - self.momentum) * self.running_var + self.momentum * var
            self.batches_tracked += 1
        else:
            if self.batches_tracked == 0:
                raise RuntimeError("eval-mode batchnorm before any training step")
            mean = self.running_mean
            var = self.running_var
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean[None, :, None, None]) * inv_std[None, :, None, None]
        if training:
            self._cache = (xhat, inv_std, x.shape[0] * x.shape[2] * x.shape[3])
        y = self.gamma.data[None, :, None, None] * xhat + self.beta.data[None, :, None, None]
        return check_finite("batchnorm output", y)

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        if self._cache is None:
            raise RuntimeError("backward called without a training-mode forward")
        xhat, inv_std, count = self._cache
        axes = (0, 2, 3)
        self.gamma.grad += (grad_out * xhat).sum(axis=axes)
        self.beta.grad += grad_out.sum(axis=axes)
        g = self.gamma.data[None, :, None, None]
        mean_g = grad_out.mean(axis=axes)[None, :, None, None]
        mean_gx = (grad_out * xhat).mean(axis=axes)[None, :, None, None]
        return g * inv_std[None, :, None, None] * (grad_out - mean_g - xhat * mean_gx)


class ReLU(Layer):
    """max(x, 0); subgradient at 0 taken as 0."""

    def __init__(self):
        self._mask = None

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        if training:
            self._mask = x > 0
        return np.maximum(x, 0.0)

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        if self._mask is None:
            raise RuntimeError("backward called without a training-mode forward")
        return grad_out * self._mask


class Identity(Layer):
    """Linear activation (pass-through)."""

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        return x

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        return grad_out
