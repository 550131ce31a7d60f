"""Tracking metrics: center error, overlap, precision/success curves, and a
singular-value measure of how low-dimensional a set of collected targets is.

Boxes are (left, top, width, height) in pixels with half-open intervals for
area computation, matching the common benchmark file convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DELTA_THRESHOLDS = np.arange(0, 51, 1.0)        # center-error thresholds, px
RHO_THRESHOLDS = np.round(np.arange(0, 51) * 0.02, 2)  # overlap thresholds

PRECISION_DELTA = 20.0
SUCCESS_RHO = 0.5


@dataclass
class GroundTruth:
    """One (x, y, w, h) box per frame."""

    boxes: np.ndarray

    def __post_init__(self):
        self.boxes = np.asarray(self.boxes, dtype=float)
        if self.boxes.ndim != 2 or self.boxes.shape[1] != 4:
            raise ValueError("boxes must be (K, 4)")
        if np.any(self.boxes[:, 2:] <= 0):
            raise ValueError("box sizes must be positive")

    def __len__(self) -> int:
        return self.boxes.shape[0]


def _center(box) -> tuple[float, float]:
    x, y, w, h = box
    return (x + w / 2.0, y + h / 2.0)


def tle(pred_box, gt_box) -> float:
    """Euclidean distance between box centers (tracking location error)."""
    px, py = _center(pred_box)
    gx, gy = _center(gt_box)
    return float(np.hypot(px - gx, py - gy))


def overlap(pred_box, gt_box) -> float:
    """Intersection over union of two boxes, in [0, 1]."""
    ax, ay, aw, ah = pred_box
    bx, by, bw, bh = gt_box
    iw = max(0.0, min(ax + aw, bx + bw) - max(ax, bx))
    ih = max(0.0, min(ay + ah, by + bh) - max(ay, by))
    inter = iw * ih
    union = aw * ah + bw * bh - inter
    if union <= 0:
        return 0.0
    return float(inter / union)


def precision_curve(tles, thresholds=DELTA_THRESHOLDS) -> np.ndarray:
    """Fraction of frames with TLE strictly below each threshold."""
    tles = np.asarray(tles, dtype=float)
    if tles.size == 0:
        raise ValueError("empty TLE series")
    return np.array([(tles < t).mean() for t in np.asarray(thresholds)])


def success_curve(ors, thresholds=RHO_THRESHOLDS) -> np.ndarray:
    """Fraction of frames with overlap strictly above each threshold."""
    ors = np.asarray(ors, dtype=float)
    if ors.size == 0:
        raise ValueError("empty overlap series")
    return np.array([(ors > t).mean() for t in np.asarray(thresholds)])


def low_dimension_degree(targets: np.ndarray,
                         theta: float) -> tuple[int, float]:
    """Smallest number of leading singular values holding a theta fraction of
    the singular-value mass of the stacked-targets matrix.

    Returns the raw count and the count normalized by min(d, K).  A zero
    matrix has degree 0.
    """
    targets = np.asarray(targets, dtype=float)
    if targets.ndim != 2 or targets.shape[1] < 1:
        raise ValueError("targets must be a d x K matrix")
    if not (0.0 < theta <= 1.0):
        raise ValueError("theta must lie in (0, 1]")
    s = np.linalg.svd(targets, compute_uv=False)
    total = s.sum()
    if total == 0.0:
        return 0, 0.0
    k = int(np.searchsorted(np.cumsum(s), theta * total - 1e-12) + 1)
    return k, k / min(targets.shape)


@dataclass
class EvalReport:
    """Per-frame errors plus the derived curves and headline scalars."""

    tle_series: np.ndarray
    or_series: np.ndarray
    delta_thresholds: np.ndarray
    rho_thresholds: np.ndarray
    precision: np.ndarray
    success: np.ndarray

    @property
    def mean_tle(self) -> float:
        return float(self.tle_series.mean())

    @property
    def median_tle(self) -> float:
        return float(np.median(self.tle_series))

    @property
    def mean_or(self) -> float:
        return float(self.or_series.mean())

    def precision_at(self, delta: float = PRECISION_DELTA) -> float:
        return float((self.tle_series < delta).mean())

    def sr_at(self, rho: float = SUCCESS_RHO) -> float:
        return float((self.or_series > rho).mean())

    def as_dict(self) -> dict:
        return {
            "frames": int(self.tle_series.size),
            "mean_tle": self.mean_tle,
            "median_tle": self.median_tle,
            "precision_20": self.precision_at(),
            "mean_or": self.mean_or,
            "sr_05": self.sr_at(),
            "delta_thresholds": self.delta_thresholds.tolist(),
            "precision_curve": self.precision.tolist(),
            "rho_thresholds": self.rho_thresholds.tolist(),
            "success_curve": self.success.tolist(),
        }


def build_report(pred_boxes, gt: GroundTruth) -> EvalReport:
    pred = np.asarray(pred_boxes, dtype=float)
    if pred.ndim != 2 or pred.shape[1] != 4:
        raise ValueError("pred_boxes must be (K, 4)")
    if pred.shape[0] != len(gt):
        raise ValueError("prediction and ground truth lengths differ")
    tles = np.array([tle(p, g) for p, g in zip(pred, gt.boxes)])
    ors = np.array([overlap(p, g) for p, g in zip(pred, gt.boxes)])
    return EvalReport(
        tle_series=tles,
        or_series=ors,
        delta_thresholds=DELTA_THRESHOLDS.copy(),
        rho_thresholds=RHO_THRESHOLDS.copy(),
        precision=precision_curve(tles),
        success=success_curve(ors),
    )
