"""训练模块：冻结编码器，用 Adam 训练解码器"""
import csv
import os
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple

import numpy as np

from ..nn.tensor import Tensor4, DEFAULT_DTYPE
from ..nn.optim import AdamState, adam_update
from ..api.exceptions import ConfigError
from .network import (
    DEFAULT_ENCODER_WIDTHS,
    EncoderConfig,
    DecoderConfig,
    adain,
    build_decoder,
    build_encoder,
    decode_with_cache,
    decoder_backward,
    decoder_params,
    encode,
    encode_with_cache,
    encoder_backward,
    grads_to_params,
    with_decoder_params,
)
from .losses import (
    LOSS_TERMS,
    compositional_sparsity_grad,
    compositional_sparsity_loss,
    content_loss,
    content_loss_grad,
    self_consistency_loss_and_grads,
    style_loss,
    style_loss_grad,
    total_loss,
)
from .checkpoint import Checkpoint
from logger import setup_logger

logger = setup_logger(__name__)

SPARSITY_MODES = ('compositional', 'global')
LOSS_LOG_HEADER = ('iter', 'L_content', 'L_style', 'L_consist', 'L_sparse', 'total')

# 消融预设：(启用的损失项, 稀疏模式)
PRESETS: Dict[str, Dict[str, Any]] = {
    'adain': {'use_content': True, 'use_style': True, 'use_consist': False, 'use_sparse': False},
    'consist': {'use_content': True, 'use_style': True, 'use_consist': True, 'use_sparse': False},
    'global-sparse': {'use_content': True, 'use_style': True, 'use_consist': True, 'use_sparse': True,
                      'sparsity_mode': 'global'},
    'compositional-sparse': {'use_content': True, 'use_style': True, 'use_consist': True, 'use_sparse': True,
                             'sparsity_mode': 'compositional'},
}


@dataclass(frozen=True)
class TrainConfig:
    """训练配置

    lambda1..lambda4 依次为内容、风格、自洽、稀疏损失的权重；use_* 为消融开关。
    """
    lambda1: float = 1.0
    lambda2: float = 1.0
    lambda3: float = 1.0
    lambda4: float = 10.0
    use_content: bool = True
    use_style: bool = True
    use_consist: bool = True
    use_sparse: bool = True
    sparsity_mode: str = 'compositional'
    iterations: int = 500
    batch_size: int = 4
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    seed: int = 0
    encoder_widths: Tuple[int, ...] = DEFAULT_ENCODER_WIDTHS
    validation_fraction: float = 0.05
    log_every: int = 50
    content_images: Tuple[str, ...] = ()
    style_images: Tuple[str, ...] = ()

    def __post_init__(self):
        for name in ('lambda1', 'lambda2', 'lambda3', 'lambda4'):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}", field=name)
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}", field='batch_size')
        if self.iterations < 0:
            raise ConfigError(f"iterations must be >= 0, got {self.iterations}", field='iterations')
        if self.lr <= 0:
            raise ConfigError(f"lr must be > 0, got {self.lr}", field='lr')
        if self.sparsity_mode not in SPARSITY_MODES:
            raise ConfigError(
                f"sparsity_mode must be one of {SPARSITY_MODES}, got '{self.sparsity_mode}'",
                field='sparsity_mode',
            )
        if not 0 <= self.validation_fraction < 1:
            raise ConfigError(
                f"validation_fraction must be in [0, 1), got {self.validation_fraction}",
                field='validation_fraction',
            )
        if len(self.encoder_widths) != 4 or min(self.encoder_widths) < 1:
            raise ConfigError(f"encoder_widths needs 4 positive ints, got {self.encoder_widths}",
                              field='encoder_widths')
        object.__setattr__(self, 'encoder_widths', tuple(int(w) for w in self.encoder_widths))
        object.__setattr__(self, 'content_images', tuple(self.content_images))
        object.__setattr__(self, 'style_images', tuple(self.style_images))

    @classmethod
    def from_preset(cls, preset: str, **overrides) -> 'TrainConfig':
        """按消融预设创建配置"""
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}', expected one of {sorted(PRESETS)}", field='preset')
        return cls(**{**PRESETS[preset], **overrides})

    def weights(self) -> Dict[str, float]:
        """生效权重，关闭的项为 0"""
        return {
            'content': self.lambda1 if self.use_content else 0.0,
            'style': self.lambda2 if self.use_style else 0.0,
            'consist': self.lambda3 if self.use_consist else 0.0,
            'sparse': self.lambda4 if self.use_sparse else 0.0,
        }

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['encoder_widths'] = list(self.encoder_widths)
        data['content_images'] = list(self.content_images)
        data['style_images'] = list(self.style_images)
        return data


@dataclass
class TrainingData:
    """训练数据：内容图 (N, h, w)、对应稀疏掩码 (N, h, w)、风格图 (S, h, w)，取值 [0, 1]"""
    contents: np.ndarray
    masks: np.ndarray
    styles: np.ndarray

    def __post_init__(self):
        self.contents = np.asarray(self.contents, dtype=DEFAULT_DTYPE)
        self.masks = np.asarray(self.masks, dtype=DEFAULT_DTYPE)
        self.styles = np.asarray(self.styles, dtype=DEFAULT_DTYPE)
        if self.contents.ndim != 3 or len(self.contents) == 0:
            raise ConfigError("training needs at least one content image", field='content_images')
        if self.styles.ndim != 3 or len(self.styles) == 0:
            raise ConfigError("training needs at least one style image", field='style_images')
        if self.masks.shape != self.contents.shape:
            raise ConfigError(
                f"every content image needs a matching sparsity mask - contents: {self.contents.shape} - "
                f"masks: {self.masks.shape}",
                field='masks',
            )
        if self.styles.shape[1:] != self.contents.shape[1:]:
            raise ConfigError(
                f"style and content images must share dims - contents: {self.contents.shape} - "
                f"styles: {self.styles.shape}",
                field='style_images',
            )


@dataclass(frozen=True)
class LossRecord:
    """单次迭代的损失明细"""
    iteration: int
    content: float
    style: float
    consist: float
    sparse: float
    total: float

    @classmethod
    def from_breakdown(cls, iteration: int, breakdown: Dict[str, float]) -> 'LossRecord':
        return cls(iteration, *(breakdown[name] for name in LOSS_TERMS), breakdown['total'])

    def to_row(self) -> List[str]:
        values = (self.content, self.style, self.consist, self.sparse, self.total)
        return [str(self.iteration)] + [f"{v:.9g}" for v in values]


def batch_masks(masks: np.ndarray, cfg: TrainConfig) -> np.ndarray:
    """global 模式下以全 1 掩码替代组合掩码"""
    if cfg.sparsity_mode == 'global':
        return np.ones_like(masks)
    return masks


def loss_and_grads(contents: np.ndarray, masks: np.ndarray, style: np.ndarray, enc: EncoderConfig,
                   dec: DecoderConfig, cfg: TrainConfig) -> Tuple[float, Dict[str, float], Dict[str, np.ndarray]]:
    """一个 batch 的总损失、逐项明细与解码器参数梯度

    Args:
        contents: (n, h, w) 内容图
        masks: (n, h, w) 稀疏掩码 M'
        style: (h, w) 风格图
    """
    weights = cfg.weights()
    x = Tensor4.from_image(contents, dtype=enc.layers[1].kernel.dtype)
    s = Tensor4.from_image(style, dtype=x.dtype)
    components = {name: 0.0 for name in LOSS_TERMS}

    content_feat, _ = encode(x, enc)
    style_feat, style_taps = encode(s, enc)
    t = adain(content_feat, style_feat)
    out, dec_cache = decode_with_cache(t, dec)

    grad_out = np.zeros(out.shape, dtype=out.dtype)
    if weights['content'] or weights['style']:
        out_feat, out_taps, enc_cache = encode_with_cache(out, enc)
        grad_feat = None
        grad_taps: Sequence[Optional[np.ndarray]] = [None] * len(out_taps)
        if weights['content']:
            components['content'] = content_loss(out_feat, t)
            grad_feat = weights['content'] * content_loss_grad(out_feat, t)
        if weights['style']:
            components['style'] = style_loss(out_taps, style_taps)
            grad_taps = [weights['style'] * g for g in style_loss_grad(out_taps, style_taps)]
        grad_out = grad_out + encoder_backward(grad_feat, grad_taps, enc_cache, enc).data
    if weights['sparse']:
        masks = batch_masks(masks, cfg)
        components['sparse'] = compositional_sparsity_loss(out, masks)
        grad_out = grad_out + weights['sparse'] * compositional_sparsity_grad(out, masks)

    _, layer_grads = decoder_backward(grad_out, out, dec_cache, dec)
    grads = grads_to_params(layer_grads)

    if weights['consist']:
        components['consist'], consist_layer_grads = self_consistency_loss_and_grads(s, enc, dec)
        for name, grad in grads_to_params(consist_layer_grads).items():
            grads[name] = grads[name] + weights['consist'] * grad

    total, breakdown = total_loss(components, cfg)
    return total, breakdown, grads


def split_validation(count: int, fraction: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """按比例留出验证集，训练集至少保留一张"""
    order = rng.permutation(count)
    n_val = min(int(count * fraction), count - 1)
    return np.sort(order[n_val:]), np.sort(order[:n_val])


class Trainer:
    """训练器

    编码器用 seed、解码器用 seed + 1 初始化，batch 采样用 seed + 2 的生成器；
    每次迭代为整个内容 batch 均匀抽取一张风格图。
    """

    def __init__(self, cfg: TrainConfig, data: TrainingData):
        self.cfg = cfg
        self.data = data
        self.encoder = build_encoder(cfg.encoder_widths, seed=cfg.seed)
        self.decoder = build_decoder(cfg.encoder_widths, seed=cfg.seed + 1)
        self.rng = np.random.default_rng(cfg.seed + 2)
        self.train_idx, self.val_idx = split_validation(len(data.contents), cfg.validation_fraction, self.rng)
        self.history: List[LossRecord] = []
        self.validation_history: List[Tuple[int, float]] = []
        logger.info(
            f"Trainer initialized - contents: {len(data.contents)} - train: {len(self.train_idx)} - "
            f"validation: {len(self.val_idx)} - styles: {len(data.styles)} - weights: {cfg.weights()} - "
            f"sparsity_mode: {cfg.sparsity_mode}"
        )

    def _sample_batch(self) -> Tuple[np.ndarray, int]:
        batch = self.train_idx[self.rng.integers(0, len(self.train_idx), size=self.cfg.batch_size)]
        style_index = int(self.rng.integers(0, len(self.data.styles)))
        return batch, style_index

    def validate(self, decoder: DecoderConfig) -> float:
        """验证集总损失（对每张风格图取平均）"""
        if not len(self.val_idx):
            return float('nan')
        contents = self.data.contents[self.val_idx]
        masks = self.data.masks[self.val_idx]
        totals = [
            loss_and_grads(contents, masks, style, self.encoder, decoder, self.cfg)[0]
            for style in self.data.styles
        ]
        return float(np.mean(totals))

    def run(self, loss_log: Optional[str] = None) -> Checkpoint:
        """执行训练，返回检查点；loss_log 给出时逐迭代写入 CSV"""
        params = decoder_params(self.decoder)
        state = AdamState.for_params(params, lr=self.cfg.lr, beta1=self.cfg.beta1, beta2=self.cfg.beta2)
        log_file: Optional[TextIO] = None
        writer = None
        if loss_log:
            directory = os.path.dirname(loss_log)
            if directory:
                os.makedirs(directory, exist_ok=True)
            log_file = open(loss_log, 'w', newline='')
            writer = csv.writer(log_file, lineterminator='\n')
            writer.writerow(LOSS_LOG_HEADER)
        try:
            for iteration in range(self.cfg.iterations):
                batch, style_index = self._sample_batch()
                total, breakdown, grads = loss_and_grads(
                    self.data.contents[batch], self.data.masks[batch], self.data.styles[style_index],
                    self.encoder, self.decoder, self.cfg,
                )
                params, state = adam_update(params, grads, state)
                self.decoder = with_decoder_params(self.decoder, params)
                record = LossRecord.from_breakdown(iteration, breakdown)
                self.history.append(record)
                if writer:
                    writer.writerow(record.to_row())
                if self.cfg.log_every and iteration % self.cfg.log_every == 0:
                    val_loss = self.validate(self.decoder)
                    if len(self.val_idx):
                        self.validation_history.append((iteration, val_loss))
                    logger.info(
                        f"Training progress - total: {total:.6g} - content: {breakdown['content']:.6g} - "
                        f"style: {breakdown['style']:.6g} - consist: {breakdown['consist']:.6g} - "
                        f"sparse: {breakdown['sparse']:.6g} - validation: {val_loss:.6g}",
                        extra={'iteration': iteration},
                    )
        finally:
            if log_file:
                log_file.close()
        return self.checkpoint()

    def checkpoint(self) -> Checkpoint:
        final = self.history[-1].total if self.history else None
        metadata = {
            'iteration': len(self.history),
            'seed': self.cfg.seed,
            'lambdas': [self.cfg.lambda1, self.cfg.lambda2, self.cfg.lambda3, self.cfg.lambda4],
            'weights': self.cfg.weights(),
            'sparsity_mode': self.cfg.sparsity_mode,
            'encoder_widths': list(self.cfg.encoder_widths),
            'final_total': final,
        }
        return Checkpoint(self.encoder, self.decoder, metadata)


def train(cfg: TrainConfig, data: TrainingData, loss_log: Optional[str] = None) -> Checkpoint:
    """训练入口：返回检查点，可选写出逐迭代损失日志"""
    return Trainer(cfg, data).run(loss_log)
