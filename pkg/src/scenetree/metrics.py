"""Instance-segmentation and semantic-segmentation metrics.

Average precision uses all-point interpolation: AP = sum over recall steps
of delta-recall times the maximum precision at any recall >= that step.
Matching is greedy in descending prediction confidence (ties keep input
order); each prediction takes the unmatched ground-truth instance with the
highest IoU at or above the threshold (IoU ties go to the lower GT index).
Categories without ground truth are excluded from every mean. Anyone
comparing numbers against another harness should check it integrates the
PR curve the same way.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .model import as_index_array

AP_OVERLAPS = tuple(np.arange(0.50, 0.96, 0.05).round(2))  # 0.50, 0.55, ..., 0.95


@dataclass
class GtInstance:
    category: str
    point_indices: np.ndarray

    def __post_init__(self) -> None:
        self.point_indices = as_index_array(self.point_indices)


@dataclass
class PredInstance:
    category: str
    point_indices: np.ndarray
    confidence: float

    def __post_init__(self) -> None:
        self.point_indices = as_index_array(self.point_indices)
        self.confidence = float(self.confidence)


def mask_iou(a, b) -> float:
    """Intersection over union of two index sets; two empty sets give 0."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.size == 0 and b.size == 0:
        return 0.0
    inter = np.intersect1d(a, b, assume_unique=False).size
    union = np.union1d(a, b).size
    return inter / union


def _match_predictions(preds, gts, iou_threshold):
    """Greedy matching; returns per-prediction True (TP) / False (FP)."""
    order = sorted(range(len(preds)), key=lambda i: -preds[i].confidence)
    gt_taken = [False] * len(gts)
    is_tp = [False] * len(preds)
    for i in order:
        best_iou = 0.0
        best_j = -1
        for j, gt in enumerate(gts):
            if gt_taken[j]:
                continue
            iou = mask_iou(preds[i].point_indices, gt.point_indices)
            if iou >= iou_threshold and iou > best_iou:
                best_iou = iou
                best_j = j
        if best_j >= 0:
            gt_taken[best_j] = True
            is_tp[i] = True
    return order, is_tp


def average_precision(preds, gts, iou_threshold: float) -> float | None:
    """AP for a single category; None when the metric is undefined."""
    categories = {p.category for p in preds} | {g.category for g in gts}
    if len(categories) > 1:
        raise ValidationError(f"average_precision expects one category, got {sorted(categories)}")
    if not gts:
        return None if not preds else 0.0
    if not preds:
        return 0.0

    order, is_tp = _match_predictions(preds, gts, iou_threshold)
    tp_flags = np.array([is_tp[i] for i in order], dtype=np.float64)
    tp_cum = np.cumsum(tp_flags)
    fp_cum = np.cumsum(1.0 - tp_flags)
    recall = tp_cum / len(gts)
    precision = tp_cum / (tp_cum + fp_cum)

    # All-point interpolation: running max of precision from the right.
    interp = np.maximum.accumulate(precision[::-1])[::-1]
    ap = 0.0
    prev_recall = 0.0
    for r, p in zip(recall, interp):
        if r > prev_recall:
            ap += (r - prev_recall) * p
            prev_recall = r
    return float(ap)


@dataclass
class ApReport:
    ap: float
    ap50: float
    ap25: float
    per_category: dict[str, dict[str, float]] = field(default_factory=dict)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.ap, self.ap50, self.ap25)


def ap_suite(preds, gts) -> ApReport:
    """AP averaged over IoU 0.50:0.95:0.05 plus AP50/AP25, macro over categories."""
    categories = sorted({g.category for g in gts})
    per_category: dict[str, dict[str, float]] = {}
    for cat in categories:
        cat_preds = [p for p in preds if p.category == cat]
        cat_gts = [g for g in gts if g.category == cat]
        ap_values = [average_precision(cat_preds, cat_gts, thr) for thr in AP_OVERLAPS]
        per_category[cat] = {
            "ap": float(np.mean(ap_values)),
            "ap50": average_precision(cat_preds, cat_gts, 0.50),
            "ap25": average_precision(cat_preds, cat_gts, 0.25),
        }
    if not categories:
        return ApReport(0.0, 0.0, 0.0, {})
    return ApReport(
        ap=float(np.mean([v["ap"] for v in per_category.values()])),
        ap50=float(np.mean([v["ap50"] for v in per_category.values()])),
        ap25=float(np.mean([v["ap25"] for v in per_category.values()])),
        per_category=per_category,
    )


def miou_acc(
    pred_labels,
    gt_labels,
    num_classes: int,
    ignore_label: int = -1,
) -> tuple[float, float]:
    """Mean IoU and mean per-class recall over classes present in GT."""
    pred = np.asarray(pred_labels, dtype=np.int64)
    gt = np.asarray(gt_labels, dtype=np.int64)
    if pred.shape != gt.shape:
        raise ValidationError(f"label arrays differ in length: {pred.shape} vs {gt.shape}")
    keep = gt != ignore_label
    pred, gt = pred[keep], gt[keep]

    confusion = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(confusion, (gt, pred), 1)

    present = np.unique(gt)
    ious, recalls = [], []
    for c in present:
        tp = confusion[c, c]
        fn = confusion[c].sum() - tp
        fp = confusion[:, c].sum() - tp
        denom = tp + fp + fn
        ious.append(tp / denom if denom else 0.0)
        recalls.append(tp / (tp + fn) if (tp + fn) else 0.0)
    if not ious:
        return (0.0, 0.0)
    return (float(np.mean(ious)), float(np.mean(recalls)))


def oracle_feature_eval(
    bundle,
    gt_objects,
    config,
    provider,
    *,
    queries=None,
    mode=None,
    crop_embedder=None,
):
    """Score queries over features aggregated on ground-truth part masks.

    Swaps annotated part segments in for predicted ones while keeping the
    rest of the pipeline identical, isolating feature quality from
    geometric segmentation quality. Returns (ApReport, SceneTree).
    """
    from . import pipeline  # local import: pipeline depends on this module's types

    tree = pipeline.tree_from_hierarchy(bundle, gt_objects, config)
    if crop_embedder is None:
        crop_embedder = pipeline.synthetic_crop_embedder(provider, gt_objects)
    pipeline.attach_object_features(tree, bundle, config, crop_embedder)
    pipeline.attach_segment_features(tree, bundle, config)
    report, _ = pipeline.evaluate_queries(
        tree, gt_objects, provider, queries, config, mode=mode or config.score_mode
    )
    return report, tree
