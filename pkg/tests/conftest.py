import numpy as np
import pytest

from layerscope.generator import GeneratorSpec, LayerSpec, random_bundle


@pytest.fixture
def tiny_spec():
    """Small two-conv architecture: latent 6 -> 8x4 dense -> 16 -> 64 samples."""
    return GeneratorSpec(
        latent_dim=6,
        code_dim=0,
        dense_channels=8,
        dense_samples=4,
        layers=(
            LayerSpec(8, 4, kernel=9, stride=4),
            LayerSpec(4, 1, kernel=9, stride=4, activation="tanh"),
        ),
    )


@pytest.fixture
def tiny_bundle(tiny_spec):
    return random_bundle(tiny_spec, seed=2024, scale=0.3)


@pytest.fixture
def coded_spec():
    return GeneratorSpec(
        latent_dim=5,
        code_dim=2,
        dense_channels=6,
        dense_samples=4,
        layers=(
            LayerSpec(6, 3, kernel=8, stride=2),
            LayerSpec(3, 1, kernel=8, stride=2, activation="tanh"),
        ),
    )


def sine(freq, seconds=1.0, rate=16000, amp=0.5, phase=0.0):
    t = np.arange(int(round(seconds * rate))) / rate
    return amp * np.sin(2.0 * np.pi * freq * t + phase)
