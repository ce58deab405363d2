from .loader import apply_overrides, from_dict, parse_override, to_dict
from .schema import (
    DatasetSpec,
    ExperimentConfig,
    GroupSpec,
    ModelSpec,
    NoiseSpec,
    NrollSpec,
    OpenSetSpec,
    SplitSpec,
    TrainSpec,
    load_experiment_config,
)
from .env import DEFAULT_ENV_CFG, get_env_defaults

__all__ = [
    "DEFAULT_ENV_CFG",
    "DatasetSpec",
    "ExperimentConfig",
    "GroupSpec",
    "ModelSpec",
    "NoiseSpec",
    "NrollSpec",
    "OpenSetSpec",
    "SplitSpec",
    "TrainSpec",
    "apply_overrides",
    "from_dict",
    "get_env_defaults",
    "load_experiment_config",
    "parse_override",
    "to_dict",
]
