"""Minimal from-scratch NN kernel: conv/batchnorm/ReLU layers with exact
reverse-mode gradients, Adam, spectrum losses and input scalers."""

from .tensor import Tensor, check_finite
from .layers import Layer, Conv2d, BatchNorm2d, ReLU, Identity
from .losses import mse_loss, sinr_loss, weighted_mse_loss
from .optim import Adam
from .scaling import CSS, ZMUVS, ScalerState, apply_scaler, fit_scaler, invert_scaler

__all__ = [
    "Tensor", "check_finite",
    "Layer", "Conv2d", "BatchNorm2d", "ReLU", "Identity",
    "mse_loss", "sinr_loss", "weighted_mse_loss",
    "Adam",
    "CSS", "ZMUVS", "ScalerState", "apply_scaler", "fit_scaler", "invert_scaler",
]
