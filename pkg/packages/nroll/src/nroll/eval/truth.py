from __future__ import annotations

import numpy as np

from ..datasets import UnlabelledPart
from ..errors import DatasetError


def hidden_truth(part: UnlabelledPart) -> np.ndarray:
    """True class ids of an unlabelled part. Scoring only; nothing on the training path calls this."""
    truth = part._truth
    if truth is None:
        raise DatasetError(f"part {part.index} carries no ground truth")
    return truth


def has_hidden_truth(part: UnlabelledPart) -> bool:
    return part._truth is not None
