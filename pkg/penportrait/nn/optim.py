"""Adam 优化器模块"""
from dataclasses import dataclass, field, replace
from typing import Dict, Tuple

import numpy as np

from ..api.exceptions import ShapeError

Params = Dict[str, np.ndarray]


@dataclass(frozen=True)
class AdamState:
    """Adam 状态：一阶/二阶矩累积量与步数"""
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: Params = field(default_factory=dict, compare=False)
    v: Params = field(default_factory=dict, compare=False)

    @classmethod
    def for_params(cls, params: Params, lr: float = 1e-4, beta1: float = 0.9,
                   beta2: float = 0.999, eps: float = 1e-8) -> 'AdamState':
        """为给定参数创建零初始化的矩"""
        return cls(
            lr=lr, beta1=beta1, beta2=beta2, eps=eps, step=0,
            m={name: np.zeros_like(value) for name, value in params.items()},
            v={name: np.zeros_like(value) for name, value in params.items()},
        )


def adam_update(params: Params, grads: Params, state: AdamState) -> Tuple[Params, AdamState]:
    """带偏差修正的 Adam 更新，不修改输入

    Returns:
        (更新后的参数, 新状态)；新状态步数加 1
    """
    step = state.step + 1
    b1, b2 = state.beta1, state.beta2
    new_params: Params = {}
    new_m: Params = {}
    new_v: Params = {}
    for name, value in params.items():
        grad = grads.get(name)
        m = state.m.get(name, np.zeros_like(value))
        v = state.v.get(name, np.zeros_like(value))
        if grad is None or grad.shape != value.shape or m.shape != value.shape or v.shape != value.shape:
            raise ShapeError(
                f"adam shape mismatch for '{name}' - param: {value.shape} - "
                f"grad: {None if grad is None else grad.shape} - moments: {m.shape}/{v.shape}"
            )
        grad = grad.astype(value.dtype, copy=False)
        m = b1 * m + (1 - b1) * grad
        v = b2 * v + (1 - b2) * grad * grad
        m_hat = m / (1 - b1 ** step)
        v_hat = v / (1 - b2 ** step)
        new_params[name] = (value - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(value.dtype)
        new_m[name] = m.astype(value.dtype)
        new_v[name] = v.astype(value.dtype)
    return new_params, replace(state, step=step, m=new_m, v=new_v)
