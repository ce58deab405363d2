PROGRAM_NAME = "nroll"

RUNS_DIR_ENV_VAR = "NROLL_RUNS_DIR"
RUNS_DIR_DEFAULT = "runs"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3

# run directory layout
RESOLVED_CONFIG = "config.resolved.json"
TRAIN_LOG = "train.jsonl"
EVENTS_LOG = "events.jsonl"
LOOPS_CSV = "loops.csv"
REPORT_JSON = "report.json"
REPORT_MD = "report.md"
RUN_LOG = "run.log"
ABORT_JSON = "abort.json"
SIMILARITY_HIST = "similarity_hist.csv"
ESTIMATE_JSON = "estimate.json"
EVAL_JSON = "eval.json"
DATA_DIR = "data"
SPLIT_MANIFEST = "split.json"
CHECKPOINT_SUFFIX = ".gnckpt"
ROC_CSV = "roc.csv"

__all__ = [
    "PROGRAM_NAME",
    "RUNS_DIR_ENV_VAR",
    "RUNS_DIR_DEFAULT",
    "EXIT_OK",
    "EXIT_ERROR",
    "EXIT_CONFIG",
    "EXIT_DIVERGED",
    "RESOLVED_CONFIG",
    "TRAIN_LOG",
    "EVENTS_LOG",
    "LOOPS_CSV",
    "REPORT_JSON",
    "REPORT_MD",
    "RUN_LOG",
    "ABORT_JSON",
    "SIMILARITY_HIST",
    "ESTIMATE_JSON",
    "EVAL_JSON",
    "DATA_DIR",
    "SPLIT_MANIFEST",
    "CHECKPOINT_SUFFIX",
    "ROC_CSV",
]
