from .truth import has_hidden_truth, hidden_truth
from .verification import (
    FPR_POINTS,
    PairSet,
    VerificationResult,
    make_verification_pairs,
    pair_scores,
    verification_accuracy,
    verification_from_scores,
)
from .identification import gallery_probe_split, rank1
from .pseudo import PseudoLabelScore, identity_purity, majority_truth, pseudo_label_accuracy
from .classification import classification_accuracy, closed_set_accuracy
from .report import EvalConfig, EvalReport, evaluate_agents

__all__ = [
    "EvalConfig",
    "EvalReport",
    "FPR_POINTS",
    "PairSet",
    "PseudoLabelScore",
    "VerificationResult",
    "classification_accuracy",
    "closed_set_accuracy",
    "evaluate_agents",
    "gallery_probe_split",
    "has_hidden_truth",
    "hidden_truth",
    "identity_purity",
    "majority_truth",
    "make_verification_pairs",
    "pair_scores",
    "pseudo_label_accuracy",
    "rank1",
    "verification_accuracy",
    "verification_from_scores",
]
