"""Classical interference mitigation: zeroing, IMAT gap reconstruction and
slow-time minimum filtering.

Zeroing and IMAT consume the ground-truth burst mask (interference detection
is assumed perfect); ramp filtering needs no detection at all.
"""

from __future__ import annotations

import numpy as np

from .chain import RANGE_PROFILE, SpectrumMatrix
from .config import ImatParams
from .sim import IfFrame


def zeroing(frame: IfFrame) -> IfFrame:
    """Set interference-flagged time samples to zero on every antenna."""
    out = frame.samples.copy()
    out[frame.interference_mask, :] = 0.0
    return frame.replace(samples=out)


def imat(frame: IfFrame, params: ImatParams | None = None) -> IfFrame:
    """Fill zeroed interference gaps by iterative spectral thresholding.

    Per ramp, the gapped fast-time vector is repeatedly Fourier transformed;
    coefficients above a geometrically decaying threshold (starting at the
    gapped spectrum's maximum) are kept and transformed back, and the result
    replaces the signal inside the gaps only. Sparse range spectra make this
    converge to the missing object signal. Ramps without flagged samples
    pass through untouched.
    """
    if params is None:
        params = ImatParams()
    mask = frame.interference_mask
    ramps = np.flatnonzero(mask.any(axis=0))
    if ramps.size == 0:
        return frame.replace(samples=frame.samples.copy())

    out = frame.samples.copy()
    for m in ramps:
        gap = mask[:, m]                       # (N,)
        x = frame.samples[:, m, :]             # (N, A), gap shared across antennas
        xhat = x.copy()
        xhat[gap, :] = 0.0
        t1 = np.abs(np.fft.fft(xhat, axis=0)).max(axis=0)  # per antenna
        prev = xhat.copy()
        for k in range(params.max_iter):
            spec = np.fft.fft(xhat, axis=0)
            tk = t1 * params.threshold_decay**k
            kept = np.where(np.abs(spec) > tk[None, :], spec, 0.0)
            recon = np.fft.ifft(kept, axis=0)
            xhat = np.where(gap[:, None], recon, x)
            delta = np.linalg.norm(xhat - prev)
            # k = 0 keeps nothing (strict threshold at the maximum), so the
            # change check only starts once reconstruction can happen.
            if k > 0 and delta <= params.stop_tol * np.linalg.norm(prev):
                break
            prev = xhat.copy()
        out[:, m, :] = xhat
    return frame.replace(samples=out)


def rfmin(rp: SpectrumMatrix) -> SpectrumMatrix:
    """Slow-time minimum filter on a range-profile matrix.

    Every cell's magnitude is replaced by the minimum magnitude of its range
    bin across ramps; phase is preserved so Doppler processing stays
    meaningful. Interference rarely hits the same range bin in every ramp,
    so the minimum tracks the undisturbed level.
    """
    if rp.stage != RANGE_PROFILE:
        raise ValueError(f"expected stage {RANGE_PROFILE!r}, got {rp.stage!r}")
    mag = np.abs(rp.values)
    floor = mag.min(axis=1, keepdims=True)
    scale = np.divide(floor, mag, out=np.zeros_like(mag), where=mag > 0)
    return rp.with_values(rp.values * scale)
