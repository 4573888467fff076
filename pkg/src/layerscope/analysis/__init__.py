"""Statistics connecting layers and latents."""

from .clustering import (
    ClusterResult,
    ProfileClusterer,
    jacobi_eigh,
    kmeans_pp,
    spectral_cluster,
)
from .profiles import (
    ActivationProfile,
    build_profiles,
    condition_label,
    cosine_distance,
    mean_cosine_distances,
    nearest_maps_by_cosine,
)
from .ranking import LatentRanker, RankedLatent, RankingResult, rank_latents
from .stats import (
    RegressionResult,
    betainc_reg,
    linear_regression,
    pearson,
    point_biserial,
    t_p_value_two_sided,
)

__all__ = [
    "ActivationProfile",
    "ClusterResult",
    "LatentRanker",
    "ProfileClusterer",
    "RankedLatent",
    "RankingResult",
    "RegressionResult",
    "betainc_reg",
    "build_profiles",
    "condition_label",
    "cosine_distance",
    "jacobi_eigh",
    "kmeans_pp",
    "linear_regression",
    "mean_cosine_distances",
    "nearest_maps_by_cosine",
    "pearson",
    "point_biserial",
    "rank_latents",
    "spectral_cluster",
    "t_p_value_two_sided",
]
