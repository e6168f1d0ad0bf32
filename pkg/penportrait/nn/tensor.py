"""四维张量模块"""
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ..api.exceptions import ShapeError, DataError

# 网络默认精度；有限差分检验可使用 float64
DEFAULT_DTYPE = np.float32


@dataclass(frozen=True)
class Tensor4:
    """(batch, channels, height, width) 张量，可携带同形状梯度"""
    data: np.ndarray
    grad: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        data = np.asarray(self.data)
        if not np.issubdtype(data.dtype, np.floating):
            data = data.astype(DEFAULT_DTYPE)
        if data.ndim != 4:
            raise ShapeError(f"Tensor4 needs rank 4 data, got shape {data.shape}")
        if not np.isfinite(data).all():
            raise DataError(f"Tensor4 contains non-finite values - shape: {data.shape}")
        object.__setattr__(self, 'data', data)
        if self.grad is not None:
            grad = np.asarray(self.grad, dtype=data.dtype)
            if grad.shape != data.shape:
                raise ShapeError(f"grad shape {grad.shape} does not match data shape {data.shape}")
            object.__setattr__(self, 'grad', grad)

    @property
    def shape(self) -> Tuple[int, int, int, int]:
        return self.data.shape

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def c(self) -> int:
        return self.data.shape[1]

    @property
    def h(self) -> int:
        return self.data.shape[2]

    @property
    def w(self) -> int:
        return self.data.shape[3]

    @property
    def dtype(self):
        return self.data.dtype

    @classmethod
    def from_image(cls, image: np.ndarray, dtype=DEFAULT_DTYPE) -> 'Tensor4':
        """(h, w) 或 (n, h, w) 灰度图转为单通道张量"""
        image = np.asarray(image, dtype=dtype)
        if image.ndim == 2:
            return cls(image[None, None])
        if image.ndim == 3:
            return cls(image[:, None])
        raise ShapeError(f"expected (h, w) or (n, h, w) image, got shape {image.shape}")
