from .encoder import EncoderCache, EncoderParams, embed, embed_batch, identity_encoder, init_encoder
from .head import ClassHead, init_head, normalize_rows
from .losses import (
    BatchLoss,
    LossGrads,
    MarginConfig,
    arc_softmax_loss,
    forward_cosines,
    margin_logits,
    margin_softmax,
    mv_softmax_loss,
)
from .model import (
    Agent,
    ModelLoss,
    ModelParams,
    forward_logits,
    init_model,
    loss_and_grads,
    per_sample_losses,
    predict,
    sgd_step,
)
from .optim import MomentumState, SgdConfig, sgd_update
from .checkpoint import CheckpointHeader, load_checkpoint, save_checkpoint

__all__ = [
    "Agent",
    "BatchLoss",
    "CheckpointHeader",
    "ClassHead",
    "EncoderCache",
    "EncoderParams",
    "LossGrads",
    "MarginConfig",
    "ModelLoss",
    "ModelParams",
    "MomentumState",
    "SgdConfig",
    "arc_softmax_loss",
    "embed",
    "embed_batch",
    "forward_cosines",
    "forward_logits",
    "identity_encoder",
    "init_encoder",
    "init_head",
    "init_model",
    "load_checkpoint",
    "loss_and_grads",
    "margin_logits",
    "margin_softmax",
    "mv_softmax_loss",
    "normalize_rows",
    "per_sample_losses",
    "predict",
    "save_checkpoint",
    "sgd_step",
    "sgd_update",
]
