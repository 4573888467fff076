"""layerscope: probe, sonify and measure the layers of a 1-D waveform generator."""

__version__ = "0.1.0"

from .exceptions import (
    BadMagicError,
    ConvergenceError,
    DimensionError,
    LayerscopeError,
    NonFiniteValueError,
    SpecMismatchError,
    TruncatedFileError,
    UndefinedCorrelationError,
    ValidationError,
    WeightFormatError,
)
from .generator import (
    ForwardTrace,
    GeneratorSpec,
    LatentVector,
    LayerSpec,
    WaveGenerator,
    WeightBundle,
    ciwgan_spec,
    deep_spec,
    forward,
    random_bundle,
    sample_latent,
    wavegan_spec,
    zero_bundle,
)
from .probe import (
    OUTPUT_RATE,
    OUTPUT_SAMPLES,
    LayerProbe,
    average_feature_maps,
    layer_nyquist,
    probe_to_waveform,
    probes_from_trace,
    stft_magnitude,
)
from .rng import Rng, derive_seed
from .sweep import (
    SweepResult,
    SweepSpec,
    SweepStep,
    SweepTarget,
    run_sweep,
    sweep_energy_profile,
    sweep_values,
)
from .tensorops import (
    TensorTS,
    dense,
    linear_resample,
    relu,
    tanh_act,
    transpose_conv1d,
    transpose_conv_pad,
)

__all__ = [
    "__version__",
    "BadMagicError",
    "ConvergenceError",
    "DimensionError",
    "ForwardTrace",
    "GeneratorSpec",
    "LatentVector",
    "LayerProbe",
    "LayerSpec",
    "LayerscopeError",
    "NonFiniteValueError",
    "OUTPUT_RATE",
    "OUTPUT_SAMPLES",
    "Rng",
    "SpecMismatchError",
    "SweepResult",
    "SweepSpec",
    "SweepStep",
    "SweepTarget",
    "TensorTS",
    "TruncatedFileError",
    "UndefinedCorrelationError",
    "ValidationError",
    "WaveGenerator",
    "WeightBundle",
    "WeightFormatError",
    "average_feature_maps",
    "ciwgan_spec",
    "deep_spec",
    "dense",
    "derive_seed",
    "forward",
    "layer_nyquist",
    "linear_resample",
    "probe_to_waveform",
    "probes_from_trace",
    "random_bundle",
    "relu",
    "run_sweep",
    "sample_latent",
    "stft_magnitude",
    "sweep_energy_profile",
    "sweep_values",
    "tanh_act",
    "transpose_conv1d",
    "transpose_conv_pad",
    "wavegan_spec",
    "zero_bundle",
]
