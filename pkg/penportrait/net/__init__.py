"""全局素描合成网络"""
from .network import (
    DEFAULT_ENCODER_WIDTHS,
    EncoderConfig,
    DecoderConfig,
    build_encoder,
    build_decoder,
    encode,
    adain,
    decode,
)
from .losses import (
    content_loss,
    style_loss,
    self_consistency_loss,
    compositional_sparsity_loss,
    total_loss,
)
from .trainer import TrainConfig, TrainingData, Trainer, LossRecord, PRESETS, train, loss_and_grads
from .checkpoint import Checkpoint, CHECKPOINT_VERSION, save_checkpoint, load_checkpoint
from .synthesis import synthesize, synthesize_candidates, ink_fraction, ink_mass, ink_split

__all__ = [
    'DEFAULT_ENCODER_WIDTHS',
    'EncoderConfig',
    'DecoderConfig',
    'build_encoder',
    'build_decoder',
    'encode',
    'adain',
    'decode',
    'content_loss',
    'style_loss',
    'self_consistency_loss',
    'compositional_sparsity_loss',
    'total_loss',
    'TrainConfig',
    'TrainingData',
    'Trainer',
    'LossRecord',
    'PRESETS',
    'train',
    'loss_and_grads',
    'Checkpoint',
    'CHECKPOINT_VERSION',
    'save_checkpoint',
    'load_checkpoint',
    'synthesize',
    'synthesize_candidates',
    'ink_fraction',
    'ink_mass',
    'ink_split',
]
