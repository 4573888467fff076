"""Activation profiles and cosine-distance map selection.

A profile is, per feature map, the elementwise mean of the post-ReLU
activation over many generated outputs of one condition (e.g. "z11=-15").
Comparing a map's series at a latent extreme against its series along
the interpolation steps by cosine distance picks out the maps that the
swept variable drives.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import ValidationError
from ..generator import WeightBundle, forward, sample_latent
from ..parallel import thread_limit
from ..rng import Rng, derive_seed
from ..tensorops import TensorTS
from ..validation import check_index, check_positive_int


@dataclass(frozen=True)
class ActivationProfile:
    """Per-map mean activation series for one condition."""

    layer_index: int
    maps: np.ndarray = field(repr=False)
    n_outputs_averaged: int = 1
    condition: str = ""

    def __post_init__(self):
        maps = np.asarray(self.maps, dtype=np.float64)
        if maps.ndim != 2:
            raise ValidationError(f"profile maps must be 2-D, got shape {maps.shape}")
        if not np.all(np.isfinite(maps)):
            raise ValidationError("profile contains non-finite values")
        if np.any(maps < 0):
            raise ValidationError("profile of post-ReLU activations must be nonnegative")
        object.__setattr__(self, "maps", maps)

    @property
    def n_maps(self) -> int:
        return self.maps.shape[0]


def condition_label(overrides: dict | None) -> str:
    if not overrides:
        return "random"
    return ",".join(f"z{i}={overrides[i]:g}" for i in sorted(overrides))


def build_profiles(bundle: WeightBundle, conditions, n_per_condition: int,
                   layer_index: int, seed: int = 0, code=None,
                   threads: int | None = None) -> list[ActivationProfile]:
    """Mean post-ReLU activation per map for each override condition.

    Output ``j`` of condition ``c`` draws its latent from the seed
    derived for global index ``c * n_per_condition + j``, so results do
    not depend on worker scheduling or on which conditions run.
    """
    check_positive_int(n_per_condition, "n_per_condition")
    spec = bundle.spec
    check_index(layer_index, len(spec.layers), "layer_index")
    if spec.layers[layer_index].activation != "relu":
        raise ValidationError(
            f"layer {layer_index} uses {spec.layers[layer_index].activation}; "
            "profiles are defined for the nonnegative relu layers"
        )
    conditions = list(conditions)
    if not conditions:
        raise ValidationError("need at least one condition")
    if threads is None:
        threads = thread_limit()

    def one(global_index: int, overrides) -> np.ndarray:
        rng = Rng(derive_seed(seed, global_index))
        latent = sample_latent(rng, spec, overrides=overrides, code=code)
        return forward(bundle, latent).layer(layer_index).post.data

    out = []
    shape = (spec.layers[layer_index].out_channels, spec.layer_samples(layer_index))
    for c_idx, overrides in enumerate(conditions):
        acc = np.zeros(shape)
        base = c_idx * n_per_condition
        if threads == 1:
            for j in range(n_per_condition):
                acc += one(base + j, overrides)
        else:
            # bounded submission window; summed in index order for determinism
            window = threads * 2
            with ThreadPoolExecutor(max_workers=threads) as pool:
                pending: deque = deque()
                next_j = 0
                for _ in range(n_per_condition):
                    while next_j < n_per_condition and len(pending) < window:
                        pending.append(pool.submit(one, base + next_j, overrides))
                        next_j += 1
                    acc += pending.popleft().result()
        out.append(
            ActivationProfile(
                layer_index=layer_index,
                maps=acc / n_per_condition,
                n_outputs_averaged=n_per_condition,
                condition=condition_label(overrides),
            )
        )
    return out


def cosine_distance(a: np.ndarray, b: np.ndarray) -> float:
    """1 - cosine similarity; defined as 1 when either vector has zero norm."""
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 1.0
    return float(1.0 - float(a @ b) / (na * nb))


def mean_cosine_distances(trace_at_extreme: TensorTS, traces) -> np.ndarray:
    """Per map, the mean cosine distance to the extreme across all steps."""
    if not isinstance(trace_at_extreme, TensorTS):
        trace_at_extreme = TensorTS.from_array(trace_at_extreme)
    steps = [t if isinstance(t, TensorTS) else TensorTS.from_array(t) for t in traces]
    if not steps:
        raise ValidationError("need at least one interpolation step")
    shape = (trace_at_extreme.channels, trace_at_extreme.samples)
    for t in steps:
        if (t.channels, t.samples) != shape:
            raise ValidationError(
                f"step tensor shape {(t.channels, t.samples)} does not match extreme {shape}"
            )
    n_maps = trace_at_extreme.channels
    dists = np.empty(n_maps)
    for c in range(n_maps):
        ref = trace_at_extreme.data[c]
        dists[c] = float(
            np.mean([cosine_distance(ref, t.data[c]) for t in steps])
        )
    return dists


def nearest_maps_by_cosine(trace_at_extreme: TensorTS, traces, top_n: int) -> list[int]:
    """Indices of the ``top_n`` maps closest to their extreme-value series."""
    dists = mean_cosine_distances(trace_at_extreme, traces)
    check_positive_int(top_n, "top_n")
    if top_n > dists.shape[0]:
        raise ValidationError(f"top_n {top_n} exceeds map count {dists.shape[0]}")
    order = np.lexsort((np.arange(dists.shape[0]), dists))
    return [int(i) for i in order[:top_n]]
