import numpy as np
import pytest
import scipy.special
import scipy.stats
from sklearn.base import clone
from sklearn.linear_model import LogisticRegression

from layerscope.analysis import (
    LatentRanker,
    ProfileClusterer,
    build_profiles,
    condition_label,
    cosine_distance,
    jacobi_eigh,
    kmeans_pp,
    linear_regression,
    mean_cosine_distances,
    nearest_maps_by_cosine,
    pearson,
    point_biserial,
    rank_latents,
    spectral_cluster,
)
from layerscope.analysis.stats import betainc_reg, t_p_value_two_sided
from layerscope.exceptions import (
    ConvergenceError,
    UndefinedCorrelationError,
    ValidationError,
)
from layerscope.generator import random_bundle
from layerscope.tensorops import TensorTS


# ------------------------------------------------------------------ stats


def test_regularized_incomplete_beta_against_scipy():
    rng = np.random.default_rng(1)
    for _ in range(200):
        a = float(rng.uniform(0.05, 40.0))
        b = float(rng.uniform(0.05, 40.0))
        x = float(rng.uniform(0.0, 1.0))
        assert abs(betainc_reg(a, b, x) - scipy.special.betainc(a, b, x)) < 1e-10
    assert betainc_reg(2.0, 3.0, 0.0) == 0.0
    assert betainc_reg(2.0, 3.0, 1.0) == 1.0


def test_t_p_value_against_scipy():
    for t in (-8.0, -2.1, -0.3, 0.0, 0.7, 3.3, 12.0):
        for df in (1, 2, 5, 30, 500):
            want = 2.0 * scipy.stats.t.sf(abs(t), df)
            assert abs(t_p_value_two_sided(t, df) - want) < 1e-10
    assert t_p_value_two_sided(np.inf, 10) == 0.0


def test_pearson_against_numpy():
    rng = np.random.default_rng(2)
    for _ in range(30):
        x = rng.normal(size=50)
        y = 0.4 * x + rng.normal(size=50)
        want = np.corrcoef(x, y)[0, 1]
        assert abs(pearson(x, y) - want) < 1e-12
    assert pearson(np.arange(10.0), np.arange(10.0)) == 1.0


def test_pearson_undefined_on_constant_input():
    with pytest.raises(UndefinedCorrelationError):
        pearson(np.ones(10), np.arange(10.0))
    with pytest.raises(ValidationError):
        pearson(np.arange(2.0), np.arange(2.0))


def test_point_biserial_matches_pearson_and_handles_constants():
    rng = np.random.default_rng(3)
    x = rng.normal(size=80)
    y = (rng.uniform(size=80) < 0.5).astype(float)
    assert abs(point_biserial(x, y) - np.corrcoef(x, y)[0, 1]) < 1e-12
    assert point_biserial(np.ones(10), y[:10]) == 0.0


def test_linear_regression_against_scipy():
    rng = np.random.default_rng(4)
    for _ in range(20):
        x = rng.uniform(0.0, 1.0, size=40)
        y = 1.7 * x - 0.3 + rng.normal(scale=0.2, size=40)
        got = linear_regression(x, y)
        want = scipy.stats.linregress(x, y)
        assert abs(got.slope - want.slope) < 1e-10
        assert abs(got.intercept - want.intercept) < 1e-10
        assert abs(got.p_value - want.pvalue) < 1e-8
        r2 = want.rvalue**2
        assert abs(got.adj_r2 - (1.0 - (1.0 - r2) * 39.0 / 38.0)) < 1e-10


def test_linear_regression_perfect_fit():
    x = np.arange(20.0)
    got = linear_regression(x, 2.0 * x + 1.0)
    assert got.p_value == 0.0
    assert abs(got.adj_r2 - 1.0) < 1e-12
    with pytest.raises(ValidationError):
        linear_regression(np.ones(10), np.arange(10.0))


# ---------------------------------------------------------------- ranking


def test_planted_latent_ranked_first():
    for trial in range(10):
        rng = np.random.default_rng(100 + trial)
        X = rng.uniform(-1.0, 1.0, size=(600, 40))
        y = (X[:, 11] < 0.0).astype(float)
        result = rank_latents(X, y)
        assert result.entries[0].index == 11
        assert result.entries[0].coefficient < 0.0
        assert result.order[0] == 11


def test_ranking_direction_matches_sklearn():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(400, 12))
    logits = 1.5 * X[:, 3] - 2.0 * X[:, 7] + 0.3 * rng.normal(size=400)
    y = (logits > 0).astype(float)
    ours = rank_latents(X, y)
    ref = LogisticRegression(C=1.0 / 1e-3, max_iter=2000).fit(X, y)
    ref_top2 = set(np.argsort(-np.abs(ref.coef_[0]))[:2])
    assert {e.index for e in ours.entries[:2]} == ref_top2
    top = {e.index: e.coefficient for e in ours.entries}
    assert np.sign(top[3]) == 1.0 and np.sign(top[7]) == -1.0


def test_ranking_tie_break_prefers_lower_index():
    from layerscope.analysis.ranking import _ranked

    entries = _ranked(np.arange(4), np.array([0.5, -0.5, 0.2, 0.5]))
    assert [e.index for e in entries] == [0, 1, 3, 2]
    assert [e.score for e in entries] == [0.5, 0.5, 0.5, 0.2]


def test_duplicated_column_splits_the_coefficient():
    rng = np.random.default_rng(5)
    X = rng.uniform(-1.0, 1.0, size=(300, 6))
    X[:, 4] = X[:, 1]
    y = (X[:, 1] + 0.05 * rng.normal(size=300) > 0).astype(float)
    result = rank_latents(X, y)
    scores = [e.score for e in result.entries]
    assert scores == sorted(scores, reverse=True)
    assert {result.order[0], result.order[1]} == {1, 4}
    top = {e.index: e.score for e in result.entries[:2]}
    assert abs(top[1] - top[4]) < 1e-6 * max(top[1], top[4])


def test_ranking_input_validation():
    X = np.random.default_rng(0).uniform(size=(60, 4))
    with pytest.raises(ValidationError):
        rank_latents(X[:40], np.zeros(40))  # single class
    with pytest.raises(ValidationError):
        rank_latents(X[:30], (X[:30, 0] > 0.5).astype(float))  # fewer than 50 rows
    with pytest.raises(ValidationError):
        rank_latents(X, np.linspace(0.0, 1.0, 60))  # not binary


def test_ranker_estimator_api():
    rng = np.random.default_rng(11)
    X = rng.uniform(-1.0, 1.0, size=(200, 8))
    y = (X[:, 2] > 0).astype(float)
    ranker = LatentRanker(ridge=1e-3)
    assert clone(ranker).get_params() == ranker.get_params()
    ranker.fit(X, y)
    assert ranker.n_features_in_ == 8
    assert ranker.top_indices(1) == [2]
    assert ranker.coef_.shape == (8,)
    assert ranker.method_ in ("irls", "point-biserial")


# ------------------------------------------------------------- clustering


def test_jacobi_matches_lapack():
    rng = np.random.default_rng(6)
    for n in (2, 3, 5, 9, 12):
        for _ in range(6):
            m = rng.normal(size=(n, n))
            sym = (m + m.T) / 2.0
            vals, vecs = jacobi_eigh(sym)
            ref_vals, ref_vecs = np.linalg.eigh(sym)
            assert np.max(np.abs(vals - ref_vals)) < 1e-10
            # eigenvectors match up to sign
            for j in range(n):
                dot = abs(float(vecs[:, j] @ ref_vecs[:, j]))
                assert abs(dot - 1.0) < 1e-8
            assert np.max(np.abs(sym @ vecs - vecs * vals)) < 1e-9


def test_jacobi_rejects_asymmetric_and_reports_nonconvergence():
    with pytest.raises(ValidationError):
        jacobi_eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))
    big = np.random.default_rng(1).normal(size=(8, 8))
    sym = (big + big.T) / 2.0
    with pytest.raises(ConvergenceError):
        jacobi_eigh(sym, max_sweeps=0)


def test_kmeans_recovers_separated_blobs():
    rng = np.random.default_rng(7)
    blobs = np.vstack([
        rng.normal(loc=(0.0, 0.0), scale=0.05, size=(20, 2)),
        rng.normal(loc=(5.0, 5.0), scale=0.05, size=(20, 2)),
        rng.normal(loc=(-5.0, 5.0), scale=0.05, size=(20, 2)),
    ])
    ids, inertia = kmeans_pp(blobs, k=3, seed=0)
    assert inertia < 1.0
    for group in (ids[:20], ids[20:40], ids[40:]):
        assert len(set(group.tolist())) == 1
    assert len({ids[0], ids[20], ids[40]}) == 3


def test_kmeans_is_seeded():
    X = np.random.default_rng(8).normal(size=(30, 3))
    a = kmeans_pp(X, k=4, seed=3)
    b = kmeans_pp(X, k=4, seed=3)
    assert np.array_equal(a[0], b[0]) and a[1] == b[1]


def test_spectral_separates_planted_profile_families():
    def family(seed, positions):
        rng = np.random.default_rng(seed)
        rows = np.abs(rng.normal(scale=150.0, size=(16, 400)))
        for pos in positions:
            center = int(pos * 400)
            rows[:, center - 6 : center + 6] += 3e4 * np.hanning(12)
        return rows

    X = np.vstack([family(1, [0.05]), family(2, [0.05, 0.40, 0.70])])
    result = spectral_cluster(X, gamma=1e-10, k=2, seed=0)
    ids = result.assignments
    assert len(set(ids[:16].tolist())) == 1
    assert len(set(ids[16:].tolist())) == 1
    assert ids[0] != ids[16]
    assert result.embedding.shape == (32, 2)


def test_spectral_validation():
    X = np.random.default_rng(0).uniform(size=(6, 4))
    with pytest.raises(ValidationError):
        spectral_cluster(X, k=1)
    with pytest.raises(ValidationError):
        spectral_cluster(X, k=7)
    with pytest.raises(ValidationError):
        spectral_cluster(X, gamma=0.0)


def test_clusterer_estimator_api():
    X = np.vstack([
        np.full((5, 10), 0.0),
        np.full((5, 10), 4e4),
    ]) + np.random.default_rng(3).normal(scale=10.0, size=(10, 10))
    model = ProfileClusterer(n_clusters=2, gamma=1e-10, random_state=1)
    labels = model.fit_predict(X)
    assert labels.shape == (10,)
    assert len(set(labels[:5].tolist())) == 1
    assert labels[0] != labels[5]
    assert model.labels_ is model.result_.assignments


# --------------------------------------------------------------- profiles


def test_condition_labels():
    assert condition_label(None) == "random"
    assert condition_label({}) == "random"
    assert condition_label({11: -15.0}) == "z11=-15"
    assert condition_label({2: 0.5, 11: -15.0}) == "z2=0.5,z11=-15"


def test_build_profiles_shapes_and_determinism(tiny_bundle):
    conditions = [{}, {3: -15.0}]
    serial = build_profiles(tiny_bundle, conditions, n_per_condition=6,
                            layer_index=0, seed=5, threads=1)
    threaded = build_profiles(tiny_bundle, conditions, n_per_condition=6,
                              layer_index=0, seed=5, threads=4)
    assert len(serial) == 2
    for a, b in zip(serial, threaded):
        assert a.maps.shape == (4, 16)
        assert a.n_outputs_averaged == 6
        assert np.array_equal(a.maps, b.maps)  # bitwise, ordered accumulation
    assert serial[0].condition == "random"
    assert serial[1].condition == "z3=-15"


def test_profiles_average_is_mean_of_individual_traces(tiny_bundle):
    from layerscope.generator import forward, sample_latent
    from layerscope.rng import Rng, derive_seed

    [profile] = build_profiles(tiny_bundle, [{1: 2.0}], n_per_condition=4,
                               layer_index=0, seed=9)
    manual = np.zeros_like(profile.maps)
    for j in range(4):
        rng = Rng(derive_seed(9, j))
        latent = sample_latent(rng, tiny_bundle.spec, overrides={1: 2.0})
        manual += forward(tiny_bundle, latent).layer(0).post.data
    manual /= 4.0
    assert np.max(np.abs(profile.maps - manual)) < 1e-12


def test_profiles_reject_tanh_layer(tiny_bundle):
    # the last layer is signed output, not a nonnegative activation bank
    with pytest.raises(ValidationError):
        build_profiles(tiny_bundle, [{}], n_per_condition=2, layer_index=1)


def test_cosine_distance_basics():
    assert cosine_distance(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 1.0
    assert abs(cosine_distance(np.array([2.0, 0.0]), np.array([5.0, 0.0]))) < 1e-15
    assert abs(cosine_distance(np.array([1.0, 0.0]), np.array([-3.0, 0.0])) - 2.0) < 1e-15
    assert cosine_distance(np.zeros(3), np.array([1.0, 2.0, 3.0])) == 1.0


def test_mean_cosine_distances_per_map():
    # 3 maps x 4 samples at the latent extreme
    extreme = TensorTS.from_array(np.array([
        [1.0, 0.0, 0.0, 0.0],   # map 0: tracked exactly by the steps
        [0.0, 1.0, 0.0, 0.0],   # map 1: orthogonal at every step
        [0.0, 0.0, 1.0, 1.0],   # map 2: anti-aligned at every step
    ]))
    step = TensorTS.from_array(np.array([
        [2.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, -1.0, -1.0],
    ]))
    dists = mean_cosine_distances(extreme, [step, step])
    assert dists.shape == (3,)
    assert abs(dists[0]) < 1e-12
    assert abs(dists[1] - 1.0) < 1e-12
    assert abs(dists[2] - 2.0) < 1e-12
    assert nearest_maps_by_cosine(extreme, [step, step], top_n=2) == [0, 1]
    with pytest.raises(ValidationError):
        nearest_maps_by_cosine(extreme, [step], top_n=4)
    with pytest.raises(ValidationError):
        mean_cosine_distances(extreme, [])


def test_nearest_maps_tie_breaks_toward_lower_index():
    extreme = TensorTS.from_array(np.ones((3, 4)))
    same = TensorTS.from_array(np.ones((3, 4)) * 2.0)
    assert nearest_maps_by_cosine(extreme, [same], top_n=3) == [0, 1, 2]
