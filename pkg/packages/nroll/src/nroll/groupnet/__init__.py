from .config import GroupConfig
from .partition import BatchPartition, lc_count, partition_batch
from .exchange import ExchangePlan, make_exchange_plan, plan_from_permutation, select_received_mc
from .group_loss import GroupLoss, combine_group_losses, group_loss
from .trainer import IterationRecord, TrainResult, gn_train, init_agents, sample_batch

__all__ = [
    "BatchPartition",
    "ExchangePlan",
    "GroupConfig",
    "GroupLoss",
    "IterationRecord",
    "TrainResult",
    "combine_group_losses",
    "gn_train",
    "group_loss",
    "init_agents",
    "lc_count",
    "make_exchange_plan",
    "partition_batch",
    "plan_from_permutation",
    "sample_batch",
    "select_received_mc",
]
