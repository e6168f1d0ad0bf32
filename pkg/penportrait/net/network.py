"""编码器/解码器与 AdaIN 模块"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..nn.tensor import Tensor4, DEFAULT_DTYPE
from ..nn.layers import (
    LayerKind,
    LayerSpec,
    apply_layer,
    backward_layer,
    channel_moments,
    sigmoid,
    sigmoid_backward,
)
from ..api.exceptions import ShapeError, ParameterError
from logger import setup_logger

logger = setup_logger(__name__)

DEFAULT_ENCODER_WIDTHS = (16, 32, 64, 128)
TAP_NAMES = ('relu1_1', 'relu2_1', 'relu3_1', 'relu4_1')

LayerGrads = Dict[int, Tuple[np.ndarray, np.ndarray]]


@dataclass(frozen=True)
class EncoderConfig:
    """固定编码器：层序列与四个特征抽头（层下标）"""
    layers: Tuple[LayerSpec, ...]
    taps: Tuple[int, ...]
    tap_names: Tuple[str, ...] = TAP_NAMES

    def __post_init__(self):
        object.__setattr__(self, 'layers', tuple(self.layers))
        object.__setattr__(self, 'taps', tuple(int(t) for t in self.taps))
        if len(self.taps) != len(self.tap_names):
            raise ParameterError(f"encoder needs {len(self.tap_names)} taps, got {len(self.taps)}")
        if any(b <= a for a, b in zip(self.taps, self.taps[1:])):
            raise ParameterError(f"encoder tap indices must be strictly increasing, got {self.taps}")
        if self.taps[0] < 0 or self.taps[-1] != len(self.layers) - 1:
            raise ParameterError(
                f"encoder taps must lie in range and end at the last layer - taps: {self.taps} - layers: {len(self.layers)}"
            )

    @property
    def downsample_factor(self) -> int:
        return int(np.prod([layer.stride for layer in self.layers if layer.kind is LayerKind.CONV2D]))

    @property
    def in_channels(self) -> int:
        return next(layer for layer in self.layers if layer.kind is LayerKind.CONV2D).in_channels

    @property
    def out_channels(self) -> int:
        return [layer for layer in self.layers if layer.kind is LayerKind.CONV2D][-1].out_channels


@dataclass(frozen=True)
class DecoderConfig:
    """解码器层序列，输出经 sigmoid 钳位到 [0, 1]（1 = 白纸，0 = 墨）"""
    layers: Tuple[LayerSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, 'layers', tuple(self.layers))
        convs = [layer for layer in self.layers if layer.kind is LayerKind.CONV2D]
        if not convs or convs[-1].out_channels != 1:
            raise ParameterError("decoder must end in a single-channel conv2d layer")
        if self.layers[-1].kind is not LayerKind.CONV2D:
            raise ParameterError("decoder's last layer must be conv2d (sigmoid is applied after it)")

    @property
    def in_channels(self) -> int:
        return next(layer for layer in self.layers if layer.kind is LayerKind.CONV2D).in_channels

    @property
    def upsample_count(self) -> int:
        return sum(1 for layer in self.layers if layer.kind is LayerKind.UPSAMPLE)


@dataclass
class ChainCache:
    """前向时每层的输入，供反向使用"""
    inputs: List[Tensor4] = field(default_factory=list)
    output: Optional[Tensor4] = None


def _he_conv(rng: np.random.Generator, out_c: int, in_c: int, stride: int = 1, k: int = 3,
             dtype=DEFAULT_DTYPE) -> LayerSpec:
    fan_in = in_c * k * k
    kernel = (rng.standard_normal((out_c, in_c, k, k)) * np.sqrt(2.0 / fan_in)).astype(dtype)
    bias = np.zeros(out_c, dtype=dtype)
    return LayerSpec(LayerKind.CONV2D, kernel, bias, stride=stride, pad=0)


def _padded_conv(rng, out_c, in_c, stride=1, dtype=DEFAULT_DTYPE) -> List[LayerSpec]:
    return [LayerSpec(LayerKind.REFLECTION_PAD, pad=1), _he_conv(rng, out_c, in_c, stride, dtype=dtype)]


def build_encoder(widths: Sequence[int] = DEFAULT_ENCODER_WIDTHS, seed: int = 0,
                  dtype=DEFAULT_DTYPE) -> EncoderConfig:
    """四级编码器：每级 反射填充 + 3x3 卷积 + ReLU，第 2-4 级卷积步长为 2

    权重用 numpy PCG64 生成器 (np.random.default_rng(seed)) 做 He 初始化，训练中冻结。
    """
    if len(widths) != 4:
        raise ParameterError(f"encoder needs 4 stage widths, got {widths}")
    rng = np.random.default_rng(seed)
    layers: List[LayerSpec] = []
    taps: List[int] = []
    in_c = 1
    for stage, width in enumerate(widths):
        layers += _padded_conv(rng, width, in_c, stride=1 if stage == 0 else 2, dtype=dtype)
        layers.append(LayerSpec(LayerKind.RELU))
        taps.append(len(layers) - 1)
        in_c = width
    logger.debug(f"Encoder built - widths: {tuple(widths)} - seed: {seed} - layers: {len(layers)}")
    return EncoderConfig(tuple(layers), tuple(taps))


def build_decoder(widths: Sequence[int] = DEFAULT_ENCODER_WIDTHS, seed: int = 1,
                  dtype=DEFAULT_DTYPE) -> DecoderConfig:
    """编码器的镜像：九个卷积、三个最近邻上采样，每个卷积前做反射填充"""
    if len(widths) != 4:
        raise ParameterError(f"decoder needs 4 stage widths, got {widths}")
    w1, w2, w3, w4 = widths
    rng = np.random.default_rng(seed)
    relu = LayerSpec(LayerKind.RELU)
    up = LayerSpec(LayerKind.UPSAMPLE)
    plan = [(w4, w3, True), (w3, w3, False), (w3, w3, False), (w3, w3, False), (w3, w2, True),
            (w2, w2, False), (w2, w1, True), (w1, w1, False)]
    layers: List[LayerSpec] = []
    for in_c, out_c, upsample in plan:
        layers += _padded_conv(rng, out_c, in_c, dtype=dtype)
        layers.append(relu)
        if upsample:
            layers.append(up)
    layers += _padded_conv(rng, 1, w1, dtype=dtype)
    logger.debug(f"Decoder built - widths: {tuple(widths)} - seed: {seed} - layers: {len(layers)}")
    return DecoderConfig(tuple(layers))


def forward_chain(x: Tensor4, layers: Sequence[LayerSpec]) -> Tuple[Tensor4, ChainCache]:
    cache = ChainCache()
    for spec in layers:
        cache.inputs.append(x)
        x = apply_layer(x, spec)
    cache.output = x
    return x, cache


def backward_chain(grad_out: Optional[np.ndarray], layers: Sequence[LayerSpec], cache: ChainCache,
                   extra_grads: Optional[Dict[int, np.ndarray]] = None) -> Tuple[Tensor4, LayerGrads]:
    """沿层序列反向；extra_grads[i] 为加在第 i 层输出上的梯度"""
    extra_grads = extra_grads or {}
    out_shape = cache.output.shape
    g = np.zeros(out_shape, dtype=cache.output.dtype) if grad_out is None else grad_out
    param_grads: LayerGrads = {}
    for i in range(len(layers) - 1, -1, -1):
        if i in extra_grads:
            g = g + extra_grads[i]
        grad_in, pgrads = backward_layer(Tensor4(g), cache.inputs[i], layers[i])
        if pgrads is not None:
            param_grads[i] = pgrads
        g = grad_in.data
    return Tensor4(g), param_grads


def check_image_dims(h: int, w: int, enc: EncoderConfig) -> None:
    factor = enc.downsample_factor
    if h % factor or w % factor or h < 2 * factor or w < 2 * factor:
        raise ShapeError(
            f"image dims ({h}, {w}) must be multiples of {factor} and at least {2 * factor}"
        )


def encode(photo: Tensor4, enc: EncoderConfig) -> Tuple[Tensor4, List[Tensor4]]:
    """f(x)：返回最终特征与四个抽头激活"""
    features, taps, _ = encode_with_cache(photo, enc)
    return features, taps


def encode_with_cache(photo: Tensor4, enc: EncoderConfig) -> Tuple[Tensor4, List[Tensor4], ChainCache]:
    if photo.c != enc.in_channels:
        raise ShapeError(f"encoder expects {enc.in_channels} input channels, got shape {photo.shape}")
    check_image_dims(photo.h, photo.w, enc)
    features, cache = forward_chain(photo, enc.layers)
    taps = [cache.inputs[i + 1] if i + 1 < len(enc.layers) else features for i in enc.taps]
    return features, taps, cache


def encoder_backward(grad_features: Optional[np.ndarray], grad_taps: Sequence[Optional[np.ndarray]],
                     cache: ChainCache, enc: EncoderConfig) -> Tensor4:
    """冻结编码器对输入图像的梯度（内容损失梯度 + 各抽头的风格损失梯度）"""
    extra = {index: grad for index, grad in zip(enc.taps, grad_taps) if grad is not None}
    grad_input, _ = backward_chain(grad_features, enc.layers, cache, extra)
    return grad_input


def adain(content_feat: Tensor4, style_feat: Tensor4) -> Tensor4:
    """t = sigma(s) * (c - mu(c)) / sigma(c) + mu(s)，逐样本逐通道

    风格特征的 batch 为 1 时广播到全部内容样本。
    """
    if content_feat.c != style_feat.c:
        raise ShapeError(
            f"adain channel mismatch - content: {content_feat.shape} - style: {style_feat.shape}"
        )
    if style_feat.n not in (1, content_feat.n):
        raise ShapeError(
            f"adain batch mismatch - content: {content_feat.shape} - style: {style_feat.shape}"
        )
    mu_c, sigma_c = channel_moments(content_feat)
    mu_s, sigma_s = channel_moments(style_feat)
    normalized = (content_feat.data - mu_c[:, :, None, None]) / sigma_c[:, :, None, None]
    t = sigma_s[:, :, None, None] * normalized + mu_s[:, :, None, None]
    return Tensor4(t.astype(content_feat.dtype, copy=False))


def decode(t: Tensor4, dec: DecoderConfig) -> Tensor4:
    """T = g(t)，输出在 [0, 1]"""
    out, _ = decode_with_cache(t, dec)
    return out


def decode_with_cache(t: Tensor4, dec: DecoderConfig) -> Tuple[Tensor4, ChainCache]:
    if t.c != dec.in_channels:
        raise ShapeError(f"decoder expects {dec.in_channels} channels, got shape {t.shape}")
    logits, cache = forward_chain(t, dec.layers)
    out = sigmoid(logits)
    return out, cache


def decoder_backward(grad_out: np.ndarray, output: Tensor4, cache: ChainCache,
                     dec: DecoderConfig) -> Tuple[Tensor4, LayerGrads]:
    """经 sigmoid 与解码器层反向，返回 (对 t 的梯度, 各卷积层参数梯度)"""
    grad_logits = sigmoid_backward(Tensor4(grad_out), output)
    return backward_chain(grad_logits.data, dec.layers, cache)


def param_name(index: int, part: str) -> str:
    return f"layer{index:02d}.{part}"


def decoder_params(dec: DecoderConfig) -> Dict[str, np.ndarray]:
    """解码器卷积参数字典（名称 -> 数组）"""
    params: Dict[str, np.ndarray] = {}
    for i, layer in enumerate(dec.layers):
        if layer.kind is LayerKind.CONV2D:
            params[param_name(i, 'kernel')] = layer.kernel
            params[param_name(i, 'bias')] = layer.bias
    return params


def grads_to_params(layer_grads: LayerGrads) -> Dict[str, np.ndarray]:
    grads: Dict[str, np.ndarray] = {}
    for i, (grad_kernel, grad_bias) in layer_grads.items():
        grads[param_name(i, 'kernel')] = grad_kernel
        grads[param_name(i, 'bias')] = grad_bias
    return grads


def with_decoder_params(dec: DecoderConfig, params: Dict[str, np.ndarray]) -> DecoderConfig:
    layers = []
    for i, layer in enumerate(dec.layers):
        if layer.kind is LayerKind.CONV2D:
            layer = layer.with_params(params[param_name(i, 'kernel')], params[param_name(i, 'bias')])
        layers.append(layer)
    return DecoderConfig(tuple(layers))
