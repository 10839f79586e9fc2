import numpy as np
import pytest

from irs_practical.channel import Geometry, PathLossConfig, sample_channels


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_channels(rng, M=2, N=8, d=498.0):
    return sample_channels(rng, Geometry(d=d), PathLossConfig(), M, N)


def unit_channels(rng, M=2, N=8):
    """Unit-variance channels; keeps numbers O(1) for algebra checks."""
    from irs_practical.channel import ChannelSet

    def cn(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)

    return ChannelSet(h_d=cn(M), h_r=cn(N), G=cn(N, M))
