import numpy as np
import pytest
from sklearn.base import clone

from layerscope.exceptions import DimensionError, ValidationError
from layerscope.generator import (
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
from layerscope.rng import Rng

from test_tensor import conv_transpose_oracle


def test_canonical_spec_dimensions():
    spec = wavegan_spec()
    assert spec.latent_dim == 100
    assert spec.code_dim == 0
    assert spec.input_width == 100
    assert (spec.dense_channels, spec.dense_samples) == (1024, 16)
    assert [l.out_channels for l in spec.layers] == [512, 256, 128, 64, 1]
    assert all(l.kernel == 25 and l.stride == 4 for l in spec.layers)
    assert [spec.layer_samples(i) for i in range(5)] == [64, 256, 1024, 4096, 16384]
    assert spec.output_samples == 16384


def test_coded_spec_keeps_total_width():
    spec = ciwgan_spec(code_dim=2)
    assert spec.code_dim == 2
    assert spec.latent_dim == 98
    assert spec.input_width == 100
    with pytest.raises(ValidationError):
        ciwgan_spec(code_dim=100)


def test_deep_spec_dimensions():
    spec = deep_spec()
    assert len(spec.layers) == 10
    assert all(l.stride == 2 for l in spec.layers)
    assert [l.out_channels for l in spec.layers] == [512, 256, 128, 64, 32, 16, 8, 4, 2, 1]
    assert spec.output_samples == 16384


def test_spec_validation_catches_bad_chains():
    with pytest.raises(ValidationError):
        GeneratorSpec(latent_dim=4, code_dim=0, dense_channels=8, dense_samples=4,
                      layers=(LayerSpec(7, 1, kernel=9, stride=4, activation="tanh"),))
    with pytest.raises(ValidationError):
        GeneratorSpec(latent_dim=4, code_dim=0, dense_channels=8, dense_samples=4,
                      layers=(LayerSpec(8, 1, kernel=9, stride=4),))
    with pytest.raises(ValidationError):
        GeneratorSpec(latent_dim=4, code_dim=0, dense_channels=8, dense_samples=4,
                      layers=(LayerSpec(8, 4, kernel=9, stride=4, activation="tanh"),
                              LayerSpec(4, 1, kernel=9, stride=4, activation="tanh")))
    with pytest.raises(ValidationError):
        GeneratorSpec(latent_dim=4, code_dim=0, dense_channels=8, dense_samples=4,
                      layers=(LayerSpec(8, 2, kernel=9, stride=4, activation="tanh"),))


def test_spec_dict_round_trip(tiny_spec):
    for spec in (tiny_spec, wavegan_spec(), ciwgan_spec(3), deep_spec()):
        assert GeneratorSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(ValidationError):
        GeneratorSpec.from_dict({"latent_dim": 4})


def test_bundle_validates_shapes(tiny_spec):
    good = random_bundle(tiny_spec, seed=0)
    with pytest.raises(DimensionError):
        WeightBundle(spec=tiny_spec, dense_weight=np.zeros((3, 3)),
                     dense_bias=good.dense_bias, conv_weights=good.conv_weights,
                     conv_biases=good.conv_biases)
    with pytest.raises(DimensionError):
        WeightBundle(spec=tiny_spec, dense_weight=good.dense_weight,
                     dense_bias=good.dense_bias, conv_weights=good.conv_weights[:1],
                     conv_biases=good.conv_biases)
    bad_conv = (np.zeros((8, 4, 7)),) + good.conv_weights[1:]
    with pytest.raises(DimensionError):
        WeightBundle(spec=tiny_spec, dense_weight=good.dense_weight,
                     dense_bias=good.dense_bias, conv_weights=bad_conv,
                     conv_biases=good.conv_biases)
    nan_weight = good.dense_weight.copy()
    nan_weight[0, 0] = np.nan
    with pytest.raises(ValidationError):
        WeightBundle(spec=tiny_spec, dense_weight=nan_weight,
                     dense_bias=good.dense_bias, conv_weights=good.conv_weights,
                     conv_biases=good.conv_biases)


def test_named_tensor_order(tiny_bundle):
    names = [name for name, _ in tiny_bundle.named_tensors()]
    assert names == ["dense/weight", "dense/bias",
                     "conv0/kernel", "conv0/bias", "conv1/kernel", "conv1/bias"]


def test_random_bundle_is_seeded(tiny_spec):
    a = random_bundle(tiny_spec, seed=5)
    b = random_bundle(tiny_spec, seed=5)
    c = random_bundle(tiny_spec, seed=6)
    assert np.array_equal(a.dense_weight, b.dense_weight)
    assert not np.array_equal(a.dense_weight, c.dense_weight)
    assert np.max(np.abs(a.dense_weight)) <= 0.05


def test_zero_bundle_emits_silence(tiny_spec):
    trace = forward(zero_bundle(tiny_spec), LatentVector(z=np.ones(6)))
    assert np.all(trace.waveform == 0.0)
    for entry in trace.entries:
        assert np.all(entry.post.data == 0.0)


def test_sample_latent_override_pins_exactly(tiny_spec):
    base = sample_latent(Rng(31), tiny_spec)
    pinned = sample_latent(Rng(31), tiny_spec, overrides={3: -15.0})
    assert pinned.z[3] == -15.0
    mask = np.ones(6, dtype=bool)
    mask[3] = False
    # drawing happens before pinning, so the other entries are untouched
    assert np.array_equal(pinned.z[mask], base.z[mask])
    with pytest.raises(ValidationError):
        sample_latent(Rng(0), tiny_spec, overrides={6: 0.0})
    with pytest.raises(ValidationError):
        sample_latent(Rng(0), tiny_spec, overrides={0: np.inf})


def test_sample_latent_code_handling(tiny_spec, coded_spec):
    lat = sample_latent(Rng(1), coded_spec, code=[0.0, 1.0])
    assert np.array_equal(lat.code, [0.0, 1.0])
    assert lat.full().shape == (7,)
    assert np.array_equal(lat.full()[:2], [0.0, 1.0])
    defaulted = sample_latent(Rng(1), coded_spec)
    assert np.array_equal(defaulted.code, [0.0, 0.0])
    with pytest.raises(DimensionError):
        sample_latent(Rng(1), coded_spec, code=[1.0])
    with pytest.raises(ValidationError):
        sample_latent(Rng(1), tiny_spec, code=[1.0])


def test_latent_draws_stay_in_unit_interval(tiny_spec):
    for seed in range(40):
        z = sample_latent(Rng(seed), tiny_spec).z
        assert np.all(z >= -1.0)
        assert np.all(z < 1.0)


def test_forward_trace_structure(tiny_bundle):
    trace = forward(tiny_bundle, sample_latent(Rng(8), tiny_bundle.spec))
    assert trace.n_layers == 2
    assert trace.dense.name == "dense"
    assert [trace.layer(i).name for i in range(2)] == ["conv0", "conv1"]
    assert np.all(trace.dense.post.data >= 0.0)
    assert np.all(trace.layer(0).post.data >= 0.0)
    assert np.max(np.abs(trace.waveform)) < 1.0
    assert trace.waveform.shape == (64,)
    with pytest.raises(ValidationError):
        trace.layer(2)


def test_forward_matches_stagewise_oracle(tiny_bundle):
    """Whole pipeline against the independent convolve-based route."""
    spec = tiny_bundle.spec
    latent = sample_latent(Rng(99), spec)
    x = tiny_bundle.dense_weight @ latent.full() + tiny_bundle.dense_bias
    current = np.maximum(x.reshape(spec.dense_channels, spec.dense_samples), 0.0)
    trace = forward(tiny_bundle, latent)
    for i, layer in enumerate(spec.layers):
        pre = conv_transpose_oracle(current, tiny_bundle.conv_weights[i],
                                    tiny_bundle.conv_biases[i], layer.stride)
        assert np.max(np.abs(trace.layer(i).pre.data - pre)) < 1e-9
        current = np.maximum(pre, 0.0) if layer.activation == "relu" else np.tanh(pre)
    assert np.max(np.abs(trace.waveform - current[0])) < 1e-9


def test_forward_rejects_wrong_width(tiny_bundle):
    with pytest.raises(DimensionError):
        forward(tiny_bundle, LatentVector(z=np.ones(5)))


def test_estimator_wrapper(tiny_bundle):
    gen = WaveGenerator(bundle=tiny_bundle)
    assert gen.spec == tiny_bundle.spec
    params = gen.get_params()
    assert set(params) == {"bundle"}
    cloned = clone(gen)
    z = sample_latent(Rng(3), tiny_bundle.spec).full()
    out = gen.predict(np.stack([z, z * 0.5]))
    assert out.shape == (2, 64)
    assert np.array_equal(out[0], forward(tiny_bundle, LatentVector(z=z)).waveform)
    assert np.array_equal(cloned.predict(z[None, :])[0], out[0])
    single = gen.predict(z)
    assert single.shape == (1, 64)
    with pytest.raises(DimensionError):
        gen.predict(np.ones((2, 5)))
    with pytest.raises(ValidationError):
        WaveGenerator().predict(np.ones((1, 6)))
