"""Input standardization: zero-mean unit-variance scaling and complex
whitening via the inverse square root of the real/imag covariance.

Scalers are fitted on training inputs only and applied to inputs and
targets alike; invert_scaler is the exact inverse. Real (log-magnitude)
data uses the scalar path for both kinds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ZMUVS = "zmuvs"
CSS = "css"

# Eigenvalue floor relative to the largest eigenvalue: near-singular
# covariances (e.g. constant or purely real data) are clamped instead of
# rejected so the transform stays invertible.
_EIG_FLOOR = 1e-12


@dataclass
class ScalerState:
    kind: str
    mean: complex
    scale: float | None = None            # zmuvs / real data: scalar std
    transform: np.ndarray | None = None   # css: C^(-1/2), 2x2
    inverse: np.ndarray | None = None     # css: C^(1/2), 2x2
    is_complex: bool = True

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "mean": [self.mean.real, self.mean.imag],
            "scale": self.scale,
            "transform": None if self.transform is None else self.transform.tolist(),
            "inverse": None if self.inverse is None else self.inverse.tolist(),
            "is_complex": self.is_complex,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScalerState":
        return cls(
            kind=d["kind"],
            mean=complex(d["mean"][0], d["mean"][1]),
            scale=d["scale"],
            transform=None if d["transform"] is None else np.array(d["transform"]),
            inverse=None if d["inverse"] is None else np.array(d["inverse"]),
            is_complex=d["is_complex"],
        )


def _moments(arrays) -> tuple[int, complex, float, float, float]:
    """Accumulate count, complex mean and raw second moments of (re, im)."""
    n = 0
    s_re = s_im = s_rr = s_ii = s_ri = 0.0
    for arr in arrays:
        a = np.asarray(arr)
        re = a.real.ravel()
        im = a.imag.ravel() if np.iscomplexobj(a) else np.zeros_like(re)
        n += re.size
        s_re += float(re.sum())
        s_im += float(im.sum())
        s_rr += float((re * re).sum())
        s_ii += float((im * im).sum())
        s_ri += float((re * im).sum())
    if n == 0:
        raise ValueError("cannot fit a scaler on empty data")
    mean = complex(s_re / n, s_im / n)
    c_rr = s_rr / n - mean.real**2
    c_ii = s_ii / n - mean.imag**2
    c_ri = s_ri / n - mean.real * mean.imag
    return n, mean, c_rr, c_ii, c_ri


def fit_scaler(kind: str, samples) -> ScalerState:
    """Fit on an array or an iterable of arrays (streamed, one pass)."""
    if kind not in (ZMUVS, CSS):
        raise ValueError(f"unknown scaler kind {kind!r}")
    arrays = [samples] if isinstance(samples, np.ndarray) else list(samples)
    is_complex = any(np.iscomplexobj(a) for a in arrays)
    _, mean, c_rr, c_ii, c_ri = _moments(arrays)

    if kind == ZMUVS or not is_complex:
        # Variance of the stacked real/imag values (or plain variance for
        # real data); centering in the stacked view uses the component means.
        if is_complex:
            var = 0.5 * (c_rr + c_ii)
        else:
            var = c_rr
            mean = complex(mean.real, 0.0)
        std = float(np.sqrt(max(var, _EIG_FLOOR)))
        return ScalerState(kind=kind, mean=mean, scale=std, is_complex=is_complex)

    cov = np.array([[c_rr, c_ri], [c_ri, c_ii]])
    evals, evecs = np.linalg.eigh(cov)
    floor = _EIG_FLOOR * max(float(evals.max()), 1.0)
    evals = np.maximum(evals, floor)
    transform = evecs @ np.diag(1.0 / np.sqrt(evals)) @ evecs.T
    inverse = evecs @ np.diag(np.sqrt(evals)) @ evecs.T
    return ScalerState(kind=CSS, mean=mean, transform=transform, inverse=inverse)


def apply_scaler(state: ScalerState, data: np.ndarray) -> np.ndarray:
    if state.transform is None:
        if np.iscomplexobj(data):
            return (data - state.mean) / state.scale
        return (data - state.mean.real) / state.scale
    z = data - state.mean
    t = state.transform
    re = t[0, 0] * z.real + t[0, 1] * z.imag
    im = t[1, 0] * z.real + t[1, 1] * z.imag
    return re + 1j * im


def invert_scaler(state: ScalerState, data: np.ndarray) -> np.ndarray:
    if state.transform is None:
        if np.iscomplexobj(data) or state.is_complex:
            return data * state.scale + (state.mean if state.is_complex else state.mean.real)
        return data * state.scale + state.mean.real
    t = state.inverse
    re = t[0, 0] * data.real + t[0, 1] * data.imag
    im = t[1, 0] * data.real + t[1, 1] * data.imag
    return (re + 1j * im) + state.mean
