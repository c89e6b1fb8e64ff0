"""Mean intersection-over-union with uniform class weighting.

Predictions are binarized at the threshold (``>=``), IoU is computed per
class, and classes empty in both prediction and truth are excluded from
the mean rather than scored, so feature-absent images do not inflate the
score.  If every class is empty in both, the metric is undefined.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, UndefinedMetricError


@dataclass(frozen=True, eq=False)
class SegmentationResult:
    """Per-class prediction maps in [0, 1] paired with binary truth masks."""

    prediction: np.ndarray  # (C, H, W) float or bool
    truth: np.ndarray       # (C, H, W) bool

    def __post_init__(self):
        pred = np.asarray(self.prediction)
        truth = np.asarray(self.truth, dtype=bool)
        if pred.shape != truth.shape:
            raise DataError(f"prediction shape {pred.shape} != truth shape {truth.shape}")
        if pred.ndim != 3:
            raise DataError("expected (classes, height, width) arrays")
        if pred.dtype != bool:
            pred = np.asarray(pred, dtype=np.float64)
            if pred.min(initial=0.0) < 0.0 or pred.max(initial=0.0) > 1.0:
                raise DataError("prediction probabilities must lie in [0, 1]")
        object.__setattr__(self, "prediction", pred)
        object.__setattr__(self, "truth", truth)


def mean_iou(result: SegmentationResult, threshold: float = 0.5) -> float:
    """Unweighted mean of per-class IoU after thresholding the prediction."""
    if not 0.0 <= threshold <= 1.0:
        raise DataError(f"threshold must be in [0, 1], got {threshold}")
    pred = result.prediction if result.prediction.dtype == bool \
        else result.prediction >= threshold
    truth = result.truth
    inter = np.logical_and(pred, truth).sum(axis=(1, 2))
    union = np.logical_or(pred, truth).sum(axis=(1, 2))
    included = union > 0
    if not included.any():
        raise UndefinedMetricError("every class is empty in both prediction and truth")
    return float((inter[included] / union[included]).mean())
