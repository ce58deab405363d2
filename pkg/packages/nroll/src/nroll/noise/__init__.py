from .gmm import MIN_MEAN_GAP, SUGGESTED_MIN_SEPARATION, GmmFit, fit_gmm2
from .pairs import intra_pair_indices, sample_intra_pairs
from .estimate import (
    HIST_BINS,
    NoiseConfig,
    NoiseEstimate,
    estimate_noise_rate,
    pair_to_sample_rate,
    rate_from_fit,
    similarity_histogram,
)

__all__ = [
    "GmmFit",
    "HIST_BINS",
    "MIN_MEAN_GAP",
    "NoiseConfig",
    "NoiseEstimate",
    "SUGGESTED_MIN_SEPARATION",
    "estimate_noise_rate",
    "fit_gmm2",
    "intra_pair_indices",
    "pair_to_sample_rate",
    "rate_from_fit",
    "sample_intra_pairs",
    "similarity_histogram",
]
