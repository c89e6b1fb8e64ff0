"""Score predicted masks against a manifest's truth masks.

Predictions live in a directory using the same file naming as generated
masks; 8-bit grayscale values map linearly to probabilities (v / 255).
A missing prediction file counts as an all-zero prediction for that
class.  Frames where every class is empty in both prediction and truth
carry a null score and are excluded from the aggregate mean.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DataError, UndefinedMetricError
from .images import frame_mask_name, load_mask_png
from .iou import SegmentationResult, mean_iou
from .manifest import DatasetManifest


def _load_probability_map(path: Path) -> np.ndarray:
    with Image.open(path) as im:
        if im.mode != "L":
            raise DataError(f"prediction {path} is not 8-bit grayscale")
        return np.asarray(im, dtype=np.float64) / 255.0


def evaluate_predictions(manifest: DatasetManifest, manifest_dir, pred_dir,
                         threshold: float = 0.5) -> list[dict]:
    """Per-frame mean IoU records: [{"frame": i, "iou": float | None}, ...]."""
    base = Path(manifest_dir)
    pred_base = Path(pred_dir)
    results = []
    for rec in manifest.records:
        truth_stack = []
        pred_stack = []
        shape = None
        for slug in manifest.classes:
            truth = load_mask_png(base / rec.masks[slug])
            shape = truth.shape
            truth_stack.append(truth)
            ppath = pred_base / frame_mask_name(rec.frame, slug)
            if ppath.is_file():
                pred_stack.append(_load_probability_map(ppath))
            else:
                pred_stack.append(np.zeros(shape, dtype=np.float64))
        result = SegmentationResult(np.stack(pred_stack), np.stack(truth_stack))
        try:
            score = mean_iou(result, threshold)
        except UndefinedMetricError:
            score = None
        results.append({"frame": rec.frame, "iou": score})
    return results


def aggregate_mean(results: list[dict]) -> float:
    scored = [r["iou"] for r in results if r["iou"] is not None]
    if not scored:
        raise UndefinedMetricError("no frame produced a defined IoU")
    return float(np.mean(scored))
