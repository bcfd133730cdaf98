"""CNN denoiser topology, parameter counting and checkpoint serialization.

The network is all-convolutional: conv+ReLU, then L-2 blocks of
batchnorm+conv+ReLU, then a final conv with linear activation and no
batchnorm. Range-profile denoisers (RPD) use 1-D kernels (1, s2) on
(1, N) inputs; range-Doppler denoisers (RDD) use square kernels on (N, M)
maps. Channel count is 2 for real/imag input, 1 for log-magnitude.
"""

from __future__ import annotations

import io
import json
import struct
from dataclasses import dataclass

import numpy as np

from .._io import atomic_write
from ..nn import BatchNorm2d, Conv2d, ReLU, Tensor

RDD = "rdd"
RPD = "rpd"
RIS = "ris"
LMS = "lms"

_CKPT_MAGIC = b"RDCK"
_CKPT_VERSION = 1


@dataclass(frozen=True)
class ModelSpec:
    variant: str                 # rdd | rpd
    input_repr: str              # ris | lms
    n_layers: int
    n_kernels: int
    kernel_size: tuple[int, int]

    def __post_init__(self):
        if self.variant not in (RDD, RPD):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.input_repr not in (RIS, LMS):
            raise ValueError(f"unknown input representation {self.input_repr!r}")
        if self.n_layers < 2:
            raise ValueError("need at least 2 layers")
        if self.n_kernels < 1:
            raise ValueError("need at least 1 kernel per layer")
        s1, s2 = self.kernel_size
        if s1 < 1 or s2 < 1 or s1 % 2 == 0 or s2 % 2 == 0:
            raise ValueError("kernel dims must be odd and positive")
        if self.variant == RPD and s1 != 1:
            raise ValueError("range-profile denoisers use 1-D kernels (s1 must be 1)")

    @property
    def channels(self) -> int:
        return 2 if self.input_repr == RIS else 1

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "input_repr": self.input_repr,
            "n_layers": self.n_layers,
            "n_kernels": self.n_kernels,
            "kernel_size": list(self.kernel_size),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelSpec":
        return cls(d["variant"], d["input_repr"], d["n_layers"], d["n_kernels"],
                   tuple(d["kernel_size"]))


# Named architectures: (variant, repr, layers, kernels, kernel size).
PRESETS = {
    "model-a": ModelSpec(RDD, RIS, 4, 2, (3, 3)),
    "model-b": ModelSpec(RDD, RIS, 8, 8, (3, 3)),
    "model-c": ModelSpec(RDD, RIS, 4, 16, (3, 3)),
    "model-d": ModelSpec(RDD, RIS, 6, 16, (3, 3)),
    "model-e": ModelSpec(RDD, RIS, 8, 16, (3, 3)),
    "model-f": ModelSpec(RDD, RIS, 6, 32, (3, 3)),
    "model-d-lms": ModelSpec(RDD, LMS, 6, 16, (3, 3)),
    "rpd-ref": ModelSpec(RPD, RIS, 8, 8, (1, 41)),
}


def param_count(spec: ModelSpec) -> int:
    """Closed-form learnable parameter count for a spec."""
    c = spec.channels
    k = spec.n_kernels
    s = spec.kernel_size[0] * spec.kernel_size[1]
    first = k * (c * s) + k
    middle = (spec.n_layers - 2) * (2 * k + k * (k * s) + k)
    last = c * (k * s) + c
    return first + middle + last


class DenoiserModel:
    """Layer stack plus the input standardization kind used in training.

    Spectra are standardized per sample (each map or range profile by its
    own statistics): sample power spans many tens of dB across scenarios,
    and a single global scale would leave the network a moving target.
    """

    def __init__(self, spec: ModelSpec, layers: list, scaler_kind: str | None = None):
        self.spec = spec
        self.layers = layers
        self.scaler_kind = scaler_kind

    def params(self) -> list[Tensor]:
        out: list[Tensor] = []
        for layer in self.layers:
            out.extend(layer.params())
        return out

    @property
    def n_params(self) -> int:
        return sum(p.size for p in self.params())

    def forward(self, x: np.ndarray, training: bool = False) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x, training=training)
        return x

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            grad_out = layer.backward(grad_out)
        return grad_out


def build_model(spec: ModelSpec, rng_seed: int = 0) -> DenoiserModel:
    """Instantiate the topology with seeded Kaiming initialization.

    Middle blocks normalize the convolution pre-activations (conv, BN,
    ReLU); normalizing after the nonlinearity instead lets whole blocks die
    on this data. The parameter count is identical either way.
    """
    rng = np.random.default_rng(rng_seed)
    c, k = spec.channels, spec.n_kernels
    layers: list = [Conv2d(c, k, spec.kernel_size, rng), ReLU()]
    for _ in range(spec.n_layers - 2):
        layers.append(Conv2d(k, k, spec.kernel_size, rng))
        layers.append(BatchNorm2d(k))
        layers.append(ReLU())
    layers.append(Conv2d(k, c, spec.kernel_size, rng))  # linear output, no BN
    return DenoiserModel(spec, layers)


def _weight_blocks(model: DenoiserModel) -> list[np.ndarray]:
    """Serialized array order: per layer, weights then stats."""
    blocks: list[np.ndarray] = []
    for layer in model.layers:
        if isinstance(layer, Conv2d):
            blocks.extend([layer.weight.data, layer.bias.data])
        elif isinstance(layer, BatchNorm2d):
            blocks.extend([layer.gamma.data, layer.beta.data,
                           layer.running_mean, layer.running_var])
    return blocks


def checkpoint_bytes(model: DenoiserModel) -> bytes:
    header = {
        "spec": model.spec.to_dict(),
        "scaler_kind": model.scaler_kind,
        "bn_batches": [l.batches_tracked for l in model.layers if isinstance(l, BatchNorm2d)],
    }
    hbytes = json.dumps(header, sort_keys=True).encode("utf-8")
    buf = io.BytesIO()
    buf.write(_CKPT_MAGIC)
    buf.write(struct.pack("<II", _CKPT_VERSION, len(hbytes)))
    buf.write(hbytes)
    for block in _weight_blocks(model):
        buf.write(np.ascontiguousarray(block, dtype="<f8").tobytes())
    return buf.getvalue()


def save_checkpoint(model: DenoiserModel, path) -> None:
    with atomic_write(path, "wb") as fh:
        fh.write(checkpoint_bytes(model))


def load_checkpoint(path) -> DenoiserModel:
    with open(path, "rb") as fh:
        data = fh.read()
    return checkpoint_from_bytes(data, str(path))


def checkpoint_from_bytes(data: bytes, label: str = "<bytes>") -> DenoiserModel:
    if data[:4] != _CKPT_MAGIC:
        raise ValueError(f"{label}: not a denoiser checkpoint (bad magic)")
    version, hlen = struct.unpack_from("<II", data, 4)
    if version != _CKPT_VERSION:
        raise ValueError(f"{label}: unsupported checkpoint version {version}")
    header = json.loads(data[12 : 12 + hlen].decode("utf-8"))
    spec = ModelSpec.from_dict(header["spec"])
    model = build_model(spec, rng_seed=0)
    model.scaler_kind = header["scaler_kind"]

    offset = 12 + hlen
    raw = np.frombuffer(data, dtype="<f8", offset=offset)
    pos = 0
    for layer in model.layers:
        if isinstance(layer, Conv2d):
            arrays = [layer.weight.data, layer.bias.data]
        elif isinstance(layer, BatchNorm2d):
            arrays = [layer.gamma.data, layer.beta.data,
                      layer.running_mean, layer.running_var]
        else:
            continue
        for arr in arrays:
            n = arr.size
            if pos + n > raw.size:
                raise ValueError(f"{label}: checkpoint truncated")
            arr[...] = raw[pos : pos + n].reshape(arr.shape)
            pos += n
    if pos != raw.size:
        raise ValueError(f"{label}: {raw.size - pos} trailing weight values")
    bn_batches = iter(header["bn_batches"])
    for layer in model.layers:
        if isinstance(layer, BatchNorm2d):
            layer.batches_tracked = next(bn_batches)
    return model
