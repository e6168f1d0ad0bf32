"""流水线编排：train / sketch / plot / run 四个子命令"""
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..api.exceptions import ConfigError, DataError, PenPortraitError
from ..api.response import dump_json, stage_status
from ..mask import (
    FaceAnnotations,
    LabelMap,
    binarize,
    derive_sparsity_mask,
    fuse_eyebrows,
    is_binary,
    load_annotations,
    remove_background,
    renew_eyeballs,
    style_fuse_hair,
)
from ..net import (
    Checkpoint,
    TrainingData,
    ink_fraction,
    ink_mass,
    ink_split,
    load_checkpoint,
    save_checkpoint,
    synthesize,
    train,
)
from ..plan import (
    canny_gradient,
    dump_trajectory,
    fill_pixels,
    order_strokes,
    pen_up_distance,
    plan_fills,
    skeletonize,
    trace_strokes,
)
from ..plot import emit_gcode, emit_svg, jaccard, mask_raster, parse_gcode, simulate, to_machine
from ..utils.config import PipelineConfig
from ..utils.file_utils import (
    ensure_dir,
    file_sha256,
    input_namespace,
    load_gray_png,
    load_label_png,
    save_gray_png,
    write_text,
)
from common_utils import stage_logged
from logger import setup_logger

logger = setup_logger(__name__)

STATUS_OK = 'ok'
STATUS_SKIPPED = 'skipped'
STATUS_WARNING = 'warning'
STATUS_FAILED = 'failed'


@dataclass
class RunManifest:
    """运行清单：阶段状态与产物哈希，路径相对输出目录"""
    command: str
    root: str
    seed: int
    config: Dict[str, Any] = field(default_factory=dict)
    stages: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    artifacts: Dict[str, Dict[str, str]] = field(default_factory=dict)

    def mark(self, stage: str, status: str, error: Optional[Exception] = None, **extra: Any) -> None:
        self.stages[stage] = stage_status(status, error, **extra)

    def add(self, name: str, path: str) -> str:
        self.artifacts[name] = {
            'path': os.path.relpath(path, self.root).replace(os.sep, '/'),
            'sha256': file_sha256(path),
        }
        return path

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'seed': self.seed,
            'config': self.config,
            'stages': self.stages,
            'artifacts': self.artifacts,
        }

    def write(self) -> str:
        path = os.path.join(self.root, 'manifest.json')
        write_text(path, dump_json(self.to_dict()))
        return path


def _load_labels(path: str, shape) -> LabelMap:
    labels = LabelMap(load_label_png(path))
    if labels.shape != tuple(shape):
        raise DataError(f"label map dims {labels.shape} do not match image dims {tuple(shape)}", field='paths.labels')
    return labels


# ---------------------------------------------------------------- train

def _training_data(cfg: PipelineConfig) -> TrainingData:
    contents_paths = list(cfg.train.content_images)
    label_paths = cfg.content_label_paths
    if not contents_paths:
        raise ConfigError("training needs at least one content image", field='train.contents')
    if len(label_paths) != len(contents_paths):
        raise ConfigError(
            f"every content image needs a label map - contents: {len(contents_paths)} - labels: {len(label_paths)}",
            field='train.content_labels',
        )
    if not cfg.train.style_images:
        raise ConfigError("training needs at least one style image", field='train.styles')
    for key, paths in (('train.contents', contents_paths), ('train.content_labels', label_paths),
                       ('train.styles', cfg.train.style_images)):
        for p in paths:
            if not os.path.exists(p):
                raise ConfigError(f"training input not found: {p}", field=key)

    contents, masks = [], []
    for photo_path, label_path in zip(contents_paths, label_paths):
        photo = load_gray_png(photo_path)
        labels = _load_labels(label_path, photo.shape)
        if cfg.stages['background']:
            photo = remove_background(photo, labels)
        contents.append(photo)
        masks.append(derive_sparsity_mask(labels, cfg.sparsity_radius))
    styles = [load_gray_png(p) for p in cfg.train.style_images]
    return TrainingData(np.stack(contents), np.stack(masks), np.stack(styles))


@stage_logged('train')
def _train_stage(cfg: PipelineConfig, root: str) -> Dict[str, Any]:
    data = _training_data(cfg)
    ensure_dir(root)
    loss_log = cfg.loss_log_path
    checkpoint = train(cfg.train, data, loss_log)
    checkpoint_path = cfg.path('checkpoint') or os.path.join(root, 'checkpoint.ppck')
    save_checkpoint(checkpoint, checkpoint_path)
    photo = data.contents[0]
    sketch = synthesize(photo, data.styles[0], checkpoint)
    sparse_ink, protected_ink = ink_split(sketch, data.masks[0])
    logger.info(
        f"Training finished - iterations: {checkpoint.metadata['iteration']} - "
        f"ink_fraction_sparse: {sparse_ink:.4f} - ink_fraction_protected: {protected_ink:.4f} - "
        f"ink_fraction: {ink_fraction(sketch):.4f} - ink_mass: {ink_mass(sketch):.4f}"
    )
    return {
        'checkpoint': checkpoint_path,
        'loss_log': loss_log,
        'ink_fraction_sparse': round(sparse_ink, 6),
        'ink_fraction_protected': round(protected_ink, 6),
    }


def cmd_train(cfg: PipelineConfig) -> Dict[str, Any]:
    """训练并写出检查点与逐迭代损失日志"""
    root = os.path.join(cfg.out_dir, 'train')
    result = _train_stage(cfg, root)
    manifest = RunManifest('train', root, cfg.seed, cfg.to_dict())
    manifest.mark('train', STATUS_OK, ink_fraction_sparse=result['ink_fraction_sparse'],
                  ink_fraction_protected=result['ink_fraction_protected'])
    manifest.add('checkpoint', result['checkpoint'])
    manifest.add('loss_log', result['loss_log'])
    result['manifest'] = manifest.write()
    return result


# ---------------------------------------------------------------- sketch

@dataclass
class SketchInputs:
    photo: np.ndarray
    styles: List[np.ndarray]
    checkpoint: Checkpoint
    labels: Optional[LabelMap]
    annotations: Optional[FaceAnnotations]


def _validate_sketch_inputs(cfg: PipelineConfig) -> None:
    """在写任何文件之前检查输入"""
    cfg.require_paths('photo', 'styles', 'checkpoint')
    stages = cfg.stages
    if (stages['fusion'] or stages['background']) and not cfg.path('labels'):
        needed = 'fusion' if stages['fusion'] else 'background'
        raise ConfigError(f"stage '{needed}' is enabled but no label map is configured", field='paths.labels')
    if cfg.path('labels'):
        cfg.require_paths('labels')
    if cfg.path('annotations'):
        cfg.require_paths('annotations')


def _load_sketch_inputs(cfg: PipelineConfig) -> SketchInputs:
    photo = load_gray_png(cfg.path('photo'))
    labels = _load_labels(cfg.path('labels'), photo.shape) if cfg.path('labels') else None
    annotations = None
    if cfg.path('annotations'):
        annotations = load_annotations(cfg.path('annotations')).validate(*photo.shape)
    styles = [load_gray_png(p) for p in cfg.style_paths]
    checkpoint = load_checkpoint(cfg.path('checkpoint'))
    return SketchInputs(photo, styles, checkpoint, labels, annotations)


def sketch_namespace(cfg: PipelineConfig) -> str:
    return input_namespace([cfg.path('photo'), cfg.path('labels'), cfg.path('annotations'),
                            cfg.path('checkpoint')] + cfg.style_paths)


@stage_logged('sketch')
def _sketch_stage(cfg: PipelineConfig, inputs: SketchInputs, root: str, manifest: RunManifest) -> str:
    """remove_background -> synthesize -> binarize -> fuse_eyebrows -> renew_eyeballs -> style_fuse_hair"""
    stages = cfg.stages
    photo = inputs.photo
    if stages['background']:
        photo = remove_background(photo, inputs.labels)
        manifest.mark('remove_background', STATUS_OK)
    else:
        manifest.mark('remove_background', STATUS_SKIPPED)

    grays = [synthesize(photo, style, inputs.checkpoint) for style in inputs.styles]
    binaries = [binarize(gray, cfg.threshold) for gray in grays]
    for index, (gray, binary) in enumerate(zip(grays, binaries)):
        manifest.add(f'candidate_{index}_gray', save_gray_png(os.path.join(root, f'candidate_{index}_gray.png'), gray))
        manifest.add(f'candidate_{index}_binary', save_gray_png(os.path.join(root, f'candidate_{index}_binary.png'), binary))
    manifest.mark('synthesize', STATUS_OK, candidates=len(grays))
    manifest.mark('binarize', STATUS_OK, threshold=cfg.threshold)

    sketch = binaries[0]
    if stages['fusion']:
        if inputs.annotations and inputs.annotations.eyebrow_patches:
            sketch = fuse_eyebrows(sketch, inputs.annotations, inputs.labels, cfg.thin_iterations)
            manifest.mark('fuse_eyebrows', STATUS_OK)
        else:
            logger.warning("Eyebrow fusion skipped - reason: no eyebrow patches", extra={'stage': 'sketch'})
            manifest.mark('fuse_eyebrows', STATUS_WARNING, reason='no eyebrow patches')
        if inputs.annotations and inputs.annotations.eye_centers:
            sketch = renew_eyeballs(sketch, inputs.annotations, cfg.check_radius, cfg.spot_radius)
            manifest.mark('renew_eyeballs', STATUS_OK)
        else:
            manifest.mark('renew_eyeballs', STATUS_SKIPPED, reason='no eye centers')
        if len(binaries) > cfg.hair_style_index >= 1:
            sketch = style_fuse_hair(sketch, binaries[cfg.hair_style_index], inputs.labels)
            manifest.mark('style_fuse_hair', STATUS_OK, hair_style=cfg.hair_style_index)
        else:
            manifest.mark('style_fuse_hair', STATUS_SKIPPED, reason='single style')
    else:
        for name in ('fuse_eyebrows', 'renew_eyeballs', 'style_fuse_hair'):
            manifest.mark(name, STATUS_SKIPPED, reason='fusion disabled')

    manifest.add('sketch_gray', save_gray_png(os.path.join(root, 'sketch_gray.png'), grays[0]))
    return manifest.add('sketch', save_gray_png(os.path.join(root, 'sketch.png'), sketch))


def _run_sketch(cfg: PipelineConfig, root: str, manifest: RunManifest) -> str:
    inputs = _load_sketch_inputs(cfg)
    ensure_dir(root)
    return _sketch_stage(cfg, inputs, root, manifest)


def cmd_sketch(cfg: PipelineConfig) -> Dict[str, Any]:
    """合成素描：每张风格图一张候选，外加后处理后的最终二值素描"""
    _validate_sketch_inputs(cfg)
    root = os.path.join(cfg.out_dir, sketch_namespace(cfg))
    manifest = RunManifest('sketch', root, cfg.seed, cfg.to_dict())
    sketch_path = _run_sketch(cfg, root, manifest)
    return {'sketch': sketch_path, 'root': root, 'manifest': manifest.write()}


# ---------------------------------------------------------------- plot

def _validate_plot_inputs(cfg: PipelineConfig, sketch_path: Optional[str]) -> None:
    if sketch_path is None:
        cfg.require_paths('sketch')
    if cfg.stages['fills']:
        if not cfg.path('labels'):
            raise ConfigError("stage 'fills' is enabled but no label map is configured", field='paths.labels')
        cfg.require_paths('labels')


def load_binary_sketch(path: str) -> np.ndarray:
    sketch = load_gray_png(path)
    if not is_binary(sketch):
        raise DataError(f"plot input sketch is not binary: {path}", field='paths.sketch')
    return sketch


@stage_logged('plot')
def _plot_stage(cfg: PipelineConfig, sketch: np.ndarray, labels: Optional[LabelMap], root: str,
                manifest: RunManifest) -> Dict[str, Any]:
    """skeletonize -> canny_gradient -> trace_strokes -> plan_fills -> order_strokes -> to_machine -> 输出 -> simulate"""
    h, w = sketch.shape
    line_sketch = sketch
    fills = []
    fill_mask = np.zeros(sketch.shape, dtype=bool)
    if cfg.stages['fills']:
        fill_mask = fill_pixels(sketch, labels, cfg.pen_width)
        fills = plan_fills(sketch, labels, cfg.pen_width)
        line_sketch = np.where(fill_mask, 1.0, sketch).astype(np.float32)
        manifest.mark('plan_fills', STATUS_OK, loops=len(fills))
    else:
        manifest.mark('plan_fills', STATUS_SKIPPED)

    skeleton = skeletonize(line_sketch)
    low, high = cfg.canny_thresholds
    grad = canny_gradient(sketch, cfg.canny_sigma, low, high)
    lines = trace_strokes(skeleton, grad)
    strokes = lines + fills
    trajectory = order_strokes(strokes)
    manifest.mark('trace_strokes', STATUS_OK, strokes=len(lines), skeleton_pixels=skeleton.count)

    workspace = cfg.workspace_for(w, h)
    program = to_machine(trajectory, workspace)
    gcode = emit_gcode(program)
    svg = emit_svg(program)
    simulation = simulate(program)
    roundtrip = simulate(parse_gcode(gcode))
    # 参照为骨架与填充区域的并集
    coverage = jaccard(simulation.raster, mask_raster(skeleton.pixels | fill_mask, workspace))
    stats = simulation.stats

    manifest.add('gcode', write_text(os.path.join(root, 'plot.gcode'), gcode))
    manifest.add('svg', write_text(os.path.join(root, 'plot.svg'), svg))
    manifest.add('trajectory', write_text(os.path.join(root, 'trajectory.jsonl'), dump_trajectory(trajectory)))
    manifest.add('simulation', save_gray_png(os.path.join(root, 'simulation.png'), ~simulation.raster))

    report = {
        'strokes': len(trajectory.strokes),
        'strokes_by_kind': trajectory.counts_by_kind(),
        'pen_up_px_input_order': round(pen_up_distance(strokes), 6),
        'pen_up_px': round(trajectory.travel, 6),
        'draw_mm': round(stats.draw_mm, 6),
        'travel_mm': round(stats.travel_mm, 6),
        'lifts': stats.lifts,
        'estimated_seconds': round(stats.seconds, 6),
        'jaccard': round(coverage, 6),
        'gcode_roundtrip': bool(np.array_equal(simulation.raster, roundtrip.raster)),
        'scale_mm_per_px': round(workspace.scale, 9),
    }
    manifest.add('report', write_text(os.path.join(root, 'report.json'), dump_json(report)))
    manifest.mark('simulate', STATUS_OK, jaccard=report['jaccard'], estimated_seconds=report['estimated_seconds'])
    logger.info(
        f"Plot finished - strokes: {report['strokes']} - draw_mm: {report['draw_mm']:.1f} - "
        f"travel_mm: {report['travel_mm']:.1f} - seconds: {report['estimated_seconds']:.1f} - "
        f"jaccard: {report['jaccard']:.4f}"
    )
    return report


def _run_plot(cfg: PipelineConfig, sketch_path: str, root: str, manifest: RunManifest) -> Dict[str, Any]:
    sketch = load_binary_sketch(sketch_path)
    labels = _load_labels(cfg.path('labels'), sketch.shape) if cfg.stages['fills'] else None
    ensure_dir(root)
    return _plot_stage(cfg, sketch, labels, root, manifest)


def cmd_plot(cfg: PipelineConfig, sketch_path: Optional[str] = None) -> Dict[str, Any]:
    """把二值素描编译为 G-code、SVG 与模拟报告"""
    _validate_plot_inputs(cfg, sketch_path)
    sketch_path = sketch_path or cfg.path('sketch')
    root = os.path.join(cfg.out_dir, input_namespace([sketch_path, cfg.path('labels')]))
    manifest = RunManifest('plot', root, cfg.seed, cfg.to_dict())
    report = _run_plot(cfg, sketch_path, root, manifest)
    return {'report': report, 'root': root, 'manifest': manifest.write()}


# ---------------------------------------------------------------- run

def cmd_run(cfg: PipelineConfig) -> Dict[str, Any]:
    """sketch 后接 plot，写出单一清单；失败时保留已有产物并标记状态"""
    _validate_sketch_inputs(cfg)
    _validate_plot_inputs(cfg, sketch_path='')
    root = os.path.join(cfg.out_dir, sketch_namespace(cfg))
    manifest = RunManifest('run', root, cfg.seed, cfg.to_dict())
    current = 'sketch'
    try:
        sketch_path = _run_sketch(cfg, root, manifest)
        current = 'plot'
        report = _run_plot(cfg, sketch_path, root, manifest)
    except PenPortraitError as e:
        manifest.mark(current, STATUS_FAILED, e)
        if os.path.isdir(root):
            manifest.write()
        raise
    manifest.mark('sketch', STATUS_OK)
    manifest.mark('plot', STATUS_OK)
    return {'report': report, 'root': root, 'manifest': manifest.write()}
