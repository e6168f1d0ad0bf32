"""网络层模块：前向与手工推导的反向传播"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .tensor import Tensor4
from ..api.exceptions import ShapeError, ParameterError, UsageError

# sigma = sqrt(var + EPS_VAR)，AdaIN 与风格损失共用
EPS_VAR = 1e-5


class LayerKind(str, Enum):
    """层类型"""
    CONV2D = 'conv2d'
    RELU = 'relu'
    UPSAMPLE = 'nearest-upsample-2x'
    REFLECTION_PAD = 'reflection-pad'


@dataclass(frozen=True)
class LayerSpec:
    """层描述

    conv2d 使用 kernel (out_c, in_c, kh, kw)、bias (out_c)、stride 与零填充宽度 pad；
    reflection-pad 使用 pad 作为反射宽度。
    """
    kind: LayerKind
    kernel: Optional[np.ndarray] = None
    bias: Optional[np.ndarray] = None
    stride: int = 1
    pad: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'kind', LayerKind(self.kind))
        if self.stride < 1:
            raise ParameterError(f"stride must be >= 1, got {self.stride}")
        if self.pad < 0:
            raise ParameterError(f"pad width must be >= 0, got {self.pad}")
        if self.kind is LayerKind.CONV2D:
            if self.kernel is None or self.bias is None:
                raise ParameterError("conv2d layer needs kernel and bias")
            kernel = np.asarray(self.kernel)
            bias = np.asarray(self.bias, dtype=kernel.dtype)
            if kernel.ndim != 4:
                raise ShapeError(f"conv2d kernel must be (out_c, in_c, kh, kw), got {kernel.shape}")
            if bias.shape != (kernel.shape[0],):
                raise ShapeError(f"conv2d bias shape {bias.shape} does not match out_c {kernel.shape[0]}")
            object.__setattr__(self, 'kernel', kernel)
            object.__setattr__(self, 'bias', bias)

    @property
    def out_channels(self) -> int:
        return self.kernel.shape[0]

    @property
    def in_channels(self) -> int:
        return self.kernel.shape[1]

    def with_params(self, kernel: np.ndarray, bias: np.ndarray) -> 'LayerSpec':
        """返回替换了参数的新层"""
        return LayerSpec(self.kind, kernel, bias, self.stride, self.pad)


def conv_output_size(size: int, k: int, stride: int, pad: int) -> int:
    """标准卷积输出尺寸"""
    return (size + 2 * pad - k) // stride + 1


def _windows(xp: np.ndarray, kh: int, kw: int, stride: int) -> np.ndarray:
    """(n, c, Ho, Wo, kh, kw) 滑窗视图"""
    win = sliding_window_view(xp, (kh, kw), axis=(2, 3))
    return win[:, :, ::stride, ::stride]


def _check_conv(x: np.ndarray, spec: LayerSpec) -> None:
    if spec.kind is not LayerKind.CONV2D:
        raise UsageError(f"expected a conv2d layer, got {spec.kind.value}")
    if x.shape[1] != spec.in_channels:
        raise ShapeError(
            f"conv2d channel mismatch - input shape: {x.shape} - kernel shape: {spec.kernel.shape}"
        )
    kh, kw = spec.kernel.shape[2:]
    if x.shape[2] + 2 * spec.pad < kh or x.shape[3] + 2 * spec.pad < kw:
        raise ShapeError(
            f"conv2d input too small - input shape: {x.shape} - kernel shape: {spec.kernel.shape} - pad: {spec.pad}"
        )


def conv2d(input: Tensor4, spec: LayerSpec) -> Tensor4:
    """二维卷积（零填充 spec.pad，步长 spec.stride）"""
    x = input.data
    _check_conv(x, spec)
    kernel = spec.kernel.astype(x.dtype, copy=False)
    kh, kw = kernel.shape[2:]
    p = spec.pad
    xp = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p))) if p else x
    win = _windows(xp, kh, kw, spec.stride)
    out = np.tensordot(win, kernel, axes=([1, 4, 5], [1, 2, 3]))
    out = out.transpose(0, 3, 1, 2) + spec.bias.astype(x.dtype)[None, :, None, None]
    return Tensor4(np.ascontiguousarray(out))


def conv2d_backward(grad_out: Tensor4, cached_input: Optional[Tensor4],
                    spec: LayerSpec) -> Tuple[Tensor4, np.ndarray, np.ndarray]:
    """卷积反向传播

    Returns:
        (grad_input, grad_kernel, grad_bias)
    """
    if cached_input is None:
        raise UsageError("conv2d_backward needs the cached forward input")
    x = cached_input.data
    _check_conv(x, spec)
    kernel = spec.kernel.astype(x.dtype, copy=False)
    n, c, h, w = x.shape
    kh, kw = kernel.shape[2:]
    s, p = spec.stride, spec.pad
    ho, wo = conv_output_size(h, kh, s, p), conv_output_size(w, kw, s, p)
    g = grad_out.data.astype(x.dtype, copy=False)
    if g.shape != (n, spec.out_channels, ho, wo):
        raise ShapeError(
            f"conv2d grad_out shape {g.shape} does not match forward output {(n, spec.out_channels, ho, wo)}"
        )

    xp = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p))) if p else x
    win = _windows(xp, kh, kw, s)
    grad_kernel = np.tensordot(g, win, axes=([0, 2, 3], [0, 2, 3]))
    grad_bias = g.sum(axis=(0, 2, 3))

    # (n, Ho, Wo, c, kh, kw)
    cols = np.tensordot(g, kernel, axes=([1], [0]))
    gxp = np.zeros(xp.shape, dtype=x.dtype)
    for i in range(kh):
        for j in range(kw):
            gxp[:, :, i:i + s * ho:s, j:j + s * wo:s] += cols[..., i, j].transpose(0, 3, 1, 2)
    grad_input = gxp[:, :, p:p + h, p:p + w] if p else gxp
    return Tensor4(np.ascontiguousarray(grad_input)), grad_kernel, grad_bias


def relu(input: Tensor4) -> Tensor4:
    return Tensor4(np.maximum(input.data, 0))


def relu_backward(grad_out: Tensor4, cached_input: Tensor4) -> Tensor4:
    return Tensor4(np.where(cached_input.data < 0, 0, grad_out.data).astype(grad_out.dtype))


def nearest_upsample2x(input: Tensor4) -> Tensor4:
    return Tensor4(input.data.repeat(2, axis=2).repeat(2, axis=3))


def nearest_upsample2x_backward(grad_out: Tensor4) -> Tensor4:
    """对每个 2x2 块求和"""
    n, c, h2, w2 = grad_out.shape
    if h2 % 2 or w2 % 2:
        raise ShapeError(f"upsample grad_out needs even spatial dims, got {grad_out.shape}")
    g = grad_out.data.reshape(n, c, h2 // 2, 2, w2 // 2, 2)
    return Tensor4(g.sum(axis=(3, 5)))


def reflection_pad(input: Tensor4, width: int) -> Tensor4:
    """反射填充，边缘像素不重复：[1,2,3] 宽度 1 -> [2,1,2,3,2]"""
    _check_reflection(input.shape, width)
    if width == 0:
        return Tensor4(input.data.copy())
    return Tensor4(np.pad(input.data, ((0, 0), (0, 0), (width, width), (width, width)), mode='reflect'))


def reflection_pad_backward(grad_out: Tensor4, width: int) -> Tensor4:
    """把反射位置的梯度累加回源像素"""
    n, c, hp, wp = grad_out.shape
    h, w = hp - 2 * width, wp - 2 * width
    _check_reflection((n, c, h, w), width)
    if width == 0:
        return Tensor4(grad_out.data.copy())
    row_idx = np.pad(np.arange(h), width, mode='reflect')
    col_idx = np.pad(np.arange(w), width, mode='reflect')
    rows = np.zeros((n, c, h, wp), dtype=grad_out.dtype)
    np.add.at(rows, (slice(None), slice(None), row_idx), grad_out.data)
    out = np.zeros((n, c, h, w), dtype=grad_out.dtype)
    np.add.at(out, (slice(None), slice(None), slice(None), col_idx), rows)
    return Tensor4(out)


def _check_reflection(shape: Tuple[int, ...], width: int) -> None:
    if width < 0:
        raise ParameterError(f"reflection pad width must be >= 0, got {width}")
    if width and width >= min(shape[2], shape[3]):
        raise ParameterError(
            f"reflection pad width {width} must be smaller than spatial dims {shape[2:]}"
        )


def channel_moments(input: Tensor4) -> Tuple[np.ndarray, np.ndarray]:
    """逐 (样本, 通道) 的空间均值与标准差，sigma = sqrt(var + EPS_VAR)"""
    x = input.data
    mu = x.mean(axis=(2, 3))
    var = x.var(axis=(2, 3))
    sigma = np.sqrt(var + EPS_VAR)
    return mu, sigma


def channel_moments_backward(grad_mu: np.ndarray, grad_sigma: np.ndarray,
                             cached_input: Tensor4) -> Tensor4:
    """d mu/dx = 1/N，d sigma/dx = (x - mu) / (N * sigma)"""
    x = cached_input.data
    count = x.shape[2] * x.shape[3]
    mu, sigma = channel_moments(cached_input)
    grad = (grad_mu[:, :, None, None]
            + grad_sigma[:, :, None, None] * (x - mu[:, :, None, None]) / sigma[:, :, None, None]) / count
    return Tensor4(grad.astype(x.dtype, copy=False))


def sigmoid(input: Tensor4) -> Tensor4:
    """解码器输出钳位到 (0, 1)"""
    z = input.data
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return Tensor4(out)


def sigmoid_backward(grad_out: Tensor4, cached_output: Tensor4) -> Tensor4:
    y = cached_output.data
    return Tensor4(grad_out.data * y * (1 - y))


def apply_layer(x: Tensor4, spec: LayerSpec) -> Tensor4:
    """按层类型分发前向计算"""
    if spec.kind is LayerKind.CONV2D:
        return conv2d(x, spec)
    if spec.kind is LayerKind.RELU:
        return relu(x)
    if spec.kind is LayerKind.UPSAMPLE:
        return nearest_upsample2x(x)
    return reflection_pad(x, spec.pad)


def backward_layer(grad_out: Tensor4, cached_input: Tensor4,
                   spec: LayerSpec) -> Tuple[Tensor4, Optional[Tuple[np.ndarray, np.ndarray]]]:
    """按层类型分发反向计算，返回 (grad_input, (grad_kernel, grad_bias) 或 None)"""
    if spec.kind is LayerKind.CONV2D:
        grad_input, grad_kernel, grad_bias = conv2d_backward(grad_out, cached_input, spec)
        return grad_input, (grad_kernel, grad_bias)
    if spec.kind is LayerKind.RELU:
        return relu_backward(grad_out, cached_input), None
    if spec.kind is LayerKind.UPSAMPLE:
        return nearest_upsample2x_backward(grad_out), None
    return reflection_pad_backward(grad_out, spec.pad), None
