"""流水线配置管理模块"""
import configparser
import os
from dataclasses import replace
from typing import Any, Dict, Iterable, List, Optional, Tuple

from ..api.exceptions import ConfigError
from ..net.trainer import TrainConfig, PRESETS
from ..plot.workspace import WorkspaceConfig
from config import DEFAULT_SEED, PATH_OVERRIDES
from logger import setup_logger

logger = setup_logger(__name__)

PATH_KEYS = ('photo', 'labels', 'annotations', 'styles', 'checkpoint', 'sketch', 'out_dir')
STAGE_KEYS = ('background', 'sparsity', 'fusion', 'fills')
_TRUE = ('1', 'true', 'yes', 'on')
_FALSE = ('0', 'false', 'no', 'off')


def _split_list(raw: Optional[str]) -> List[str]:
    if not raw:
        return []
    return [item.strip() for item in raw.replace('\n', ',').split(',') if item.strip()]


class PipelineConfig:
    """流水线配置管理类

    由 INI 各节构造，构造时完成类型校验；路径相对配置文件目录解析。
    环境变量只能覆盖路径，命令行可覆盖种子、输出目录与阶段开关。
    """

    def __init__(self, sections: Dict[str, Dict[str, str]], base_dir: str = '.',
                 path_overrides: Optional[Dict[str, Optional[str]]] = None,
                 seed: Optional[int] = None, out_dir: Optional[str] = None,
                 disabled_stages: Iterable[str] = ()):
        self._sections = {name: dict(values) for name, values in sections.items()}
        self._base_dir = os.path.abspath(base_dir)
        for key, value in (path_overrides or {}).items():
            if value:
                self._sections.setdefault('paths', {})[key] = value
        if out_dir:
            self._sections.setdefault('paths', {})['out_dir'] = os.path.abspath(out_dir)
        self._seed_override = seed
        self._disabled = set(disabled_stages)
        self._validate_config()
        logger.info(
            f"PipelineConfig initialized - seed: {self.seed} - out_dir: {self.out_dir} - "
            f"stages: {self.stages} - styles: {len(self.style_paths)}"
        )

    def _get(self, section: str, key: str, default: Optional[str] = None) -> Optional[str]:
        value = self._sections.get(section, {}).get(key)
        return default if value is None or value == '' else value

    def _float(self, section: str, key: str, default: float) -> float:
        raw = self._get(section, key)
        if raw is None:
            return default
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key} must be a number, got '{raw}'", field=f"{section}.{key}")

    def _int(self, section: str, key: str, default: int) -> int:
        raw = self._get(section, key)
        if raw is None:
            return default
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key} must be an integer, got '{raw}'", field=f"{section}.{key}")

    def _bool(self, section: str, key: str, default: bool) -> bool:
        raw = self._get(section, key)
        if raw is None:
            return default
        if raw.lower() in _TRUE:
            return True
        if raw.lower() in _FALSE:
            return False
        raise ConfigError(f"[{section}] {key} must be a boolean, got '{raw}'", field=f"{section}.{key}")

    def _path(self, raw: Optional[str]) -> Optional[str]:
        if not raw:
            return None
        return raw if os.path.isabs(raw) else os.path.normpath(os.path.join(self._base_dir, raw))

    def _validate_config(self) -> None:
        """构造各子配置，触发全部校验"""
        unknown = self._disabled - set(STAGE_KEYS)
        if unknown:
            raise ConfigError(f"unknown stage toggles: {', '.join(sorted(unknown))}", field='stages')
        self._train = self._build_train_config()
        # 工作区像素尺寸在读到素描后才确定，这里用占位值校验毫米参数
        self.workspace_for(1, 1)
        if not 0 <= self.threshold <= 1:
            raise ConfigError(f"[sketch] threshold must be in [0, 1], got {self.threshold}", field='sketch.threshold')
        if self.pen_width <= 0:
            raise ConfigError(f"[plan] pen_width must be > 0, got {self.pen_width}", field='plan.pen_width')
        if self.thin_iterations < 0:
            raise ConfigError("[sketch] thin_iterations must be >= 0", field='sketch.thin_iterations')
        logger.debug(f"Pipeline configuration validated - sections: {sorted(self._sections)}")

    def _build_train_config(self) -> TrainConfig:
        section = 'train'
        preset = self._get(section, 'preset')
        if preset is not None and preset not in PRESETS:
            raise ConfigError(f"unknown preset '{preset}', expected one of {sorted(PRESETS)}", field='train.preset')
        base = TrainConfig.from_preset(preset) if preset else TrainConfig()
        widths_raw = _split_list(self._get(section, 'encoder_widths'))
        try:
            widths: Tuple[int, ...] = tuple(int(w) for w in widths_raw) if widths_raw else base.encoder_widths
        except ValueError:
            raise ConfigError(f"[train] encoder_widths must be integers, got {widths_raw}", field='train.encoder_widths')
        cfg = replace(
            base,
            lambda1=self._float(section, 'lambda1', base.lambda1),
            lambda2=self._float(section, 'lambda2', base.lambda2),
            lambda3=self._float(section, 'lambda3', base.lambda3),
            lambda4=self._float(section, 'lambda4', base.lambda4),
            use_content=self._bool(section, 'use_content', base.use_content),
            use_style=self._bool(section, 'use_style', base.use_style),
            use_consist=self._bool(section, 'use_consist', base.use_consist),
            use_sparse=self._bool(section, 'use_sparse', base.use_sparse) and self.stages['sparsity'],
            sparsity_mode=self._get(section, 'sparsity_mode', base.sparsity_mode),
            iterations=self._int(section, 'iterations', base.iterations),
            batch_size=self._int(section, 'batch_size', base.batch_size),
            lr=self._float(section, 'lr', base.lr),
            beta1=self._float(section, 'beta1', base.beta1),
            beta2=self._float(section, 'beta2', base.beta2),
            seed=self.seed,
            encoder_widths=widths,
            validation_fraction=self._float(section, 'validation_fraction', base.validation_fraction),
            log_every=self._int(section, 'log_every', base.log_every),
            content_images=tuple(self._path(p) for p in _split_list(self._get(section, 'contents'))),
            style_images=tuple(self.train_style_paths),
        )
        return cfg

    @property
    def seed(self) -> int:
        """主随机种子：命令行优先，其次 [run] seed"""
        if self._seed_override is not None:
            return int(self._seed_override)
        return self._int('run', 'seed', DEFAULT_SEED)

    @property
    def train(self) -> TrainConfig:
        return self._train

    @property
    def stages(self) -> Dict[str, bool]:
        return {key: self._bool('stages', key, True) and key not in self._disabled for key in STAGE_KEYS}

    def path(self, key: str) -> Optional[str]:
        """获取路径类配置（已解析为绝对路径）"""
        if key not in PATH_KEYS:
            raise ConfigError(f"unknown path key '{key}'", field=f"paths.{key}")
        return self._path(self._get('paths', key))

    @property
    def out_dir(self) -> str:
        return self.path('out_dir') or os.path.join(self._base_dir, 'out')

    @property
    def style_paths(self) -> List[str]:
        """合成用的风格图列表，每张生成一张候选"""
        return [self._path(p) for p in _split_list(self._get('paths', 'styles'))]

    @property
    def train_style_paths(self) -> List[str]:
        """训练用风格图，未单独配置时与合成相同"""
        raw = self._get('train', 'styles') or self._get('paths', 'styles')
        return [self._path(p) for p in _split_list(raw)]

    @property
    def content_label_paths(self) -> List[str]:
        return [self._path(p) for p in _split_list(self._get('train', 'content_labels'))]

    @property
    def loss_log_path(self) -> str:
        return self._path(self._get('train', 'loss_log')) or os.path.join(self.out_dir, 'loss_log.csv')

    @property
    def threshold(self) -> float:
        return self._float('sketch', 'threshold', 0.5)

    @property
    def thin_iterations(self) -> int:
        return self._int('sketch', 'thin_iterations', 1)

    @property
    def check_radius(self) -> int:
        return self._int('sketch', 'check_radius', 2)

    @property
    def spot_radius(self) -> Optional[int]:
        raw = self._get('sketch', 'spot_radius')
        return None if raw is None else self._int('sketch', 'spot_radius', 0)

    @property
    def sparsity_radius(self) -> Optional[int]:
        """稀疏掩码的腐蚀半径，与其他稀疏设置同在 [train]；为空时按图像尺寸取默认值"""
        section = 'train' if self._get('train', 'sparsity_radius') is not None else 'sketch'
        if self._get(section, 'sparsity_radius') is None:
            return None
        radius = self._int(section, 'sparsity_radius', 0)
        if radius < 0:
            raise ConfigError(f"[{section}] sparsity_radius must be >= 0, got {radius}",
                              field=f"{section}.sparsity_radius")
        return radius

    @property
    def hair_style_index(self) -> int:
        """提供头发的风格图下标（默认第二张）"""
        return self._int('sketch', 'hair_style', 1)

    @property
    def canny_sigma(self) -> float:
        return self._float('plan', 'sigma', 1.0)

    @property
    def canny_thresholds(self) -> Tuple[float, float]:
        return self._float('plan', 'low_threshold', 0.1), self._float('plan', 'high_threshold', 0.3)

    @property
    def pen_width(self) -> float:
        return self._float('plan', 'pen_width', 1.0)

    def workspace_for(self, px_width: int, px_height: int) -> WorkspaceConfig:
        """按素描像素尺寸构造工作区配置"""
        section = 'workspace'
        return WorkspaceConfig(
            px_width=px_width,
            px_height=px_height,
            width_mm=self._float(section, 'width_mm', 160.0),
            height_mm=self._float(section, 'height_mm', 160.0),
            margin_mm=self._float(section, 'margin_mm', 0.0),
            feed_rate=self._float(section, 'feed_rate', 20.0),
            travel_rate=self._float(section, 'travel_rate', 40.0),
            lift_time=self._float(section, 'lift_time', 0.4),
        )

    def require_paths(self, *keys: str) -> None:
        """检查输入路径存在，缺失时抛出 ConfigError 并指出字段"""
        for key in keys:
            if key == 'styles':
                paths = self.style_paths
                if not paths:
                    raise ConfigError("no style images configured", field='paths.styles')
            else:
                value = self.path(key)
                if not value:
                    raise ConfigError(f"path '{key}' is not configured", field=f"paths.{key}")
                paths = [value]
            for p in paths:
                if not os.path.exists(p):
                    raise ConfigError(f"{key} not found: {p}", field=f"paths.{key}")

    def to_dict(self) -> Dict[str, Any]:
        """用于清单的配置摘要（不含绝对路径）"""
        return {
            'seed': self.seed,
            'stages': self.stages,
            'train': {k: v for k, v in self.train.to_dict().items() if k not in ('content_images', 'style_images')},
            'sketch': {
                'threshold': self.threshold,
                'thin_iterations': self.thin_iterations,
                'check_radius': self.check_radius,
                'spot_radius': self.spot_radius,
                'hair_style': self.hair_style_index,
                'sparsity_radius': self.sparsity_radius,
            },
            'plan': {
                'sigma': self.canny_sigma,
                'thresholds': list(self.canny_thresholds),
                'pen_width': self.pen_width,
            },
        }


def load_config(path: Optional[str] = None, seed: Optional[int] = None, out_dir: Optional[str] = None,
                disabled_stages: Iterable[str] = (),
                path_overrides: Optional[Dict[str, Optional[str]]] = None) -> PipelineConfig:
    """读取 INI 配置文件；path 为空时只用默认值与环境变量"""
    if path_overrides is None:
        path_overrides = PATH_OVERRIDES
    sections: Dict[str, Dict[str, str]] = {}
    base_dir = os.getcwd()
    if path:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}", field='config')
        parser = configparser.ConfigParser()
        try:
            parser.read(path, encoding='utf-8')
        except configparser.Error as e:
            raise ConfigError(f"cannot parse config file {path}: {e}", field='config')
        sections = {name: dict(parser.items(name)) for name in parser.sections()}
        base_dir = os.path.dirname(os.path.abspath(path))
    return PipelineConfig(sections, base_dir, path_overrides, seed, out_dir, disabled_stages)
