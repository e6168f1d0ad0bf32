"""掩码相关的栅格操作"""
from .labels import (
    NUM_CLASSES,
    FaceLabel,
    LabelMap,
    PROTECTED_LABELS,
    EYEBROW_LABELS,
    EYE_LABELS,
    FILL_LABELS,
    HAIR_LABELS,
    as_label_map,
    is_binary,
    ink_mask,
)
from .sparsity import remove_background, derive_sparsity_mask, global_sparsity_mask, default_radius
from .postprocess import binarize, thin_ink, fuse_eyebrows, renew_eyeballs, style_fuse_hair
from .annotations import FaceAnnotations, EyebrowPatch, load_annotations

__all__ = [
    'NUM_CLASSES',
    'FaceLabel',
    'LabelMap',
    'PROTECTED_LABELS',
    'EYEBROW_LABELS',
    'EYE_LABELS',
    'FILL_LABELS',
    'HAIR_LABELS',
    'as_label_map',
    'is_binary',
    'ink_mask',
    'remove_background',
    'derive_sparsity_mask',
    'global_sparsity_mask',
    'default_radius',
    'binarize',
    'thin_ink',
    'fuse_eyebrows',
    'renew_eyeballs',
    'style_fuse_hair',
    'FaceAnnotations',
    'EyebrowPatch',
    'load_annotations',
]
