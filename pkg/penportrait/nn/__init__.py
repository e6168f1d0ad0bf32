"""最小确定性张量内核"""
from .tensor import Tensor4, DEFAULT_DTYPE
from .layers import (
    EPS_VAR,
    LayerKind,
    LayerSpec,
    conv2d,
    conv2d_backward,
    relu,
    relu_backward,
    nearest_upsample2x,
    nearest_upsample2x_backward,
    reflection_pad,
    reflection_pad_backward,
    channel_moments,
    channel_moments_backward,
    sigmoid,
    sigmoid_backward,
    apply_layer,
    backward_layer,
)
from .optim import AdamState, adam_update
from .gradcheck import numerical_gradient, relative_error

__all__ = [
    'Tensor4',
    'DEFAULT_DTYPE',
    'EPS_VAR',
    'LayerKind',
    'LayerSpec',
    'conv2d',
    'conv2d_backward',
    'relu',
    'relu_backward',
    'nearest_upsample2x',
    'nearest_upsample2x_backward',
    'reflection_pad',
    'reflection_pad_backward',
    'channel_moments',
    'channel_moments_backward',
    'sigmoid',
    'sigmoid_backward',
    'apply_layer',
    'backward_layer',
    'AdamState',
    'adam_update',
    'numerical_gradient',
    'relative_error',
]
