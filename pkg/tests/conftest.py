import numpy as np
import pytest

from radarmit.config import ScenarioRanges, ToolConfig, VictimRadarConfig


@pytest.fixture
def tiny_cfg():
    """Small frame for fast unit tests (64 x 16 x 4, proportionally scaled IF band)."""
    return VictimRadarConfig(n_fast=64, m_slow=16, n_ant=4, b_if=1.25e6)


@pytest.fixture
def tiny_ranges():
    # distance range must stay inside the 9.6 m unambiguous extent at N=64
    return ScenarioRanges(distance_m=(0.5, 9.0), n_objects=(1, 4))


@pytest.fixture
def tiny_config(tiny_cfg, tiny_ranges):
    return ToolConfig(victim=tiny_cfg, ranges=tiny_ranges, splits=(4, 2, 2))


def naive_dft(x: np.ndarray) -> np.ndarray:
    """Direct O(N^2) DFT summation; the independent oracle for FFT paths."""
    n = x.shape[0]
    k = np.arange(n)
    twiddle = np.exp(-2j * np.pi * np.outer(k, k) / n)
    return twiddle @ x
