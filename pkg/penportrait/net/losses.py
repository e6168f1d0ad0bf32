"""损失函数模块：内容、风格、自洽、组合稀疏损失及其梯度

约简约定：内容/风格/自洽损失对元素取均值，稀疏损失求和（L1 范数）。
"""
from typing import TYPE_CHECKING, Dict, List, Sequence, Tuple

import numpy as np

from ..nn.tensor import Tensor4
from ..nn.layers import channel_moments, channel_moments_backward
from ..api.exceptions import ShapeError
from .network import (
    EncoderConfig,
    DecoderConfig,
    LayerGrads,
    adain,
    decode_with_cache,
    decoder_backward,
    encode,
)
from logger import setup_logger

if TYPE_CHECKING:
    from .trainer import TrainConfig

logger = setup_logger(__name__)

LOSS_TERMS = ('content', 'style', 'consist', 'sparse')


def _check_same(a: Tensor4, b: Tensor4, what: str) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{what} shape mismatch - left: {a.shape} - right: {b.shape}")


def content_loss(out_feat: Tensor4, t: Tensor4) -> float:
    """mean((f(T) - t)^2)"""
    _check_same(out_feat, t, 'content loss')
    return float(np.mean((out_feat.data - t.data) ** 2))


def content_loss_grad(out_feat: Tensor4, t: Tensor4) -> np.ndarray:
    """对 out_feat 的梯度，t 视为常量"""
    _check_same(out_feat, t, 'content loss')
    diff = out_feat.data - t.data
    return 2.0 * diff / diff.size


def _style_pairs(out_taps: Sequence[Tensor4], style_taps: Sequence[Tensor4]):
    if len(out_taps) != len(style_taps):
        raise ShapeError(f"style loss needs equal tap counts - out: {len(out_taps)} - style: {len(style_taps)}")
    for index, (out, style) in enumerate(zip(out_taps, style_taps)):
        if out.c != style.c or style.n not in (1, out.n):
            raise ShapeError(
                f"style loss tap {index} mismatch - out: {out.shape} - style: {style.shape}"
            )
        mu_o, sigma_o = channel_moments(out)
        mu_s, sigma_s = channel_moments(style)
        yield out, np.broadcast_to(mu_s, mu_o.shape), np.broadcast_to(sigma_s, sigma_o.shape), mu_o, sigma_o


def style_loss(out_taps: Sequence[Tensor4], style_taps: Sequence[Tensor4]) -> float:
    """各抽头上 mean((mu_o - mu_s)^2) + mean((sigma_o - sigma_s)^2) 之和

    风格抽头 batch 为 1 时广播到全部输出样本。
    """
    total = 0.0
    for _, mu_s, sigma_s, mu_o, sigma_o in _style_pairs(out_taps, style_taps):
        total += float(np.mean((mu_o - mu_s) ** 2) + np.mean((sigma_o - sigma_s) ** 2))
    return total


def style_loss_grad(out_taps: Sequence[Tensor4], style_taps: Sequence[Tensor4]) -> List[np.ndarray]:
    """对每个输出抽头激活的梯度"""
    grads = []
    for out, mu_s, sigma_s, mu_o, sigma_o in _style_pairs(out_taps, style_taps):
        grad_mu = 2.0 * (mu_o - mu_s) / mu_o.size
        grad_sigma = 2.0 * (sigma_o - sigma_s) / sigma_o.size
        grads.append(channel_moments_backward(grad_mu, grad_sigma, out).data)
    return grads


def self_consistency_loss(style_image: Tensor4, enc: EncoderConfig, dec: DecoderConfig) -> float:
    """mean((g(AdaIN(f(s), f(s))) - s)^2)：风格图同时作为内容与风格时应重建自身"""
    loss, _ = self_consistency_loss_and_grads(style_image, enc, dec)
    return loss


def self_consistency_loss_and_grads(style_image: Tensor4, enc: EncoderConfig,
                                    dec: DecoderConfig) -> Tuple[float, LayerGrads]:
    """额外的一次前向/反向：编码器冻结，只返回解码器参数梯度"""
    features, _ = encode(style_image, enc)
    t = adain(features, features)
    recon, cache = decode_with_cache(t, dec)
    _check_same(recon, style_image, 'self-consistency')
    diff = recon.data - style_image.data
    loss = float(np.mean(diff ** 2))
    _, layer_grads = decoder_backward(2.0 * diff / diff.size, recon, cache, dec)
    return loss, layer_grads


def _mask_array(out: Tensor4, mask: np.ndarray) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.ndim == 2:
        mask = mask[None]
    if out.c != 1 or mask.shape[-2:] != (out.h, out.w) or mask.shape[0] not in (1, out.n):
        raise ShapeError(f"sparsity mask shape {mask.shape} does not match output {out.shape}")
    if not np.isin(mask, (0, 1)).all():
        raise ShapeError("sparsity mask must be binary")
    return np.broadcast_to(mask[:, None].astype(out.dtype), out.shape)


def compositional_sparsity_loss(out: Tensor4, mask: np.ndarray) -> float:
    """sum(M' * (1 - T))：只统计 M' = 1 区域中的墨量"""
    m = _mask_array(out, mask)
    return float(np.sum(m * (1.0 - out.data)))


def compositional_sparsity_grad(out: Tensor4, mask: np.ndarray) -> np.ndarray:
    return -np.array(_mask_array(out, mask))


def total_loss(components: Dict[str, float], train_cfg: 'TrainConfig') -> Tuple[float, Dict[str, float]]:
    """lambda1*L_content + lambda2*L_style + lambda3*L_consist + lambda4*L_sparse

    关闭的项权重为 0，不参与求和。

    Returns:
        (总损失, 含 total 的逐项明细)
    """
    weights = train_cfg.weights()
    breakdown = {name: float(components.get(name, 0.0)) if weights[name] else 0.0 for name in LOSS_TERMS}
    total = float(sum(weights[name] * breakdown[name] for name in LOSS_TERMS))
    breakdown['total'] = total
    return total, breakdown
