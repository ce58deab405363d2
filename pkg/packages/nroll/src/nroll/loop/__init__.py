from .config import CONFIDENCE_KINDS, LabelConfig, NrollConfig, OpenSetConfig
from .labelling import LabelOutcome, PseudoLabels, agent_confidences, label_part, pick_confident
from .update import update_labelled
from .prototypes import Assignment, PrototypeBank, open_set_assign, open_set_label_part
from .orchestrator import LOOPS_CSV_COLUMNS, LoopMetrics, LoopObserver, LoopState, NrollResult, run_nroll

__all__ = [
    "Assignment",
    "CONFIDENCE_KINDS",
    "LOOPS_CSV_COLUMNS",
    "LabelConfig",
    "LabelOutcome",
    "LoopMetrics",
    "LoopObserver",
    "LoopState",
    "NrollConfig",
    "NrollResult",
    "OpenSetConfig",
    "PrototypeBank",
    "PseudoLabels",
    "agent_confidences",
    "label_part",
    "open_set_assign",
    "open_set_label_part",
    "pick_confident",
    "run_nroll",
    "update_labelled",
]
