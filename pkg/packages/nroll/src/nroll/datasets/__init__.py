from .labelled import NO_TRUTH, SEED_PROVENANCE, LabelledSet
from .unlabelled import UnlabelledPart
from .synthetic import gen_synthetic, random_prototypes
from .noise import NOISE_MODES, inject_noise, noise_transition_matrix
from .split import OpenSetSplit, holdout, split_manifest, split_open_set, split_parts
from .csvio import format_csv, load_csv, write_csv

__all__ = [
    "LabelledSet",
    "NOISE_MODES",
    "NO_TRUTH",
    "OpenSetSplit",
    "SEED_PROVENANCE",
    "UnlabelledPart",
    "format_csv",
    "gen_synthetic",
    "holdout",
    "inject_noise",
    "load_csv",
    "noise_transition_matrix",
    "random_prototypes",
    "split_manifest",
    "split_open_set",
    "split_parts",
    "write_csv",
]
