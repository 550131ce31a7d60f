"""Appearance extraction: cropping, resampling, vectorization and masking.

A target region is described by a motion state (center position plus scale).
The region is cropped with bilinear resampling to a fixed patch size, stacked
column-major into a vector with entries in [0, 1], and optionally masked down
to an observed subset of pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# ITU-R 601 luma weights for RGB to gray conversion
_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass
class MotionState:
    """Center position in pixels and a scale coefficient."""

    x: float
    y: float
    s: float = 1.0

    def __post_init__(self):
        if self.s <= 0:
            raise ValueError("scale must be positive")


class ObservationMaskError(ValueError):
    """Raised for masks with out-of-range indices."""


def to_gray(frame: np.ndarray) -> np.ndarray:
    """Convert a decoded frame to a float grayscale image in [0, 1].

    Accepts 8-bit or float input, single channel or RGB(A).
    """
    frame = np.asarray(frame)
    if frame.ndim == 3:
        rgb = frame[..., :3].astype(float)
        gray = rgb @ _LUMA
    elif frame.ndim == 2:
        gray = frame.astype(float)
    else:
        raise ValueError("frame must be 2-D gray or 3-D RGB")
    if np.issubdtype(frame.dtype, np.integer):
        gray = gray / 255.0
    return np.clip(gray, 0.0, 1.0)


def crop_patch(frame: np.ndarray, state: MotionState, base_w: float,
               base_h: float, out_w: int, out_h: int) -> np.ndarray:
    """Crop the rectangle centered at the state and resample it to out size.

    The rectangle has size (s * base_w) x (s * base_h).  Resampling is
    bilinear; sample points outside the frame clamp to the nearest border
    pixel, so candidates near the frame edge stay scoreable.
    """
    frame = np.asarray(frame, dtype=float)
    if frame.ndim != 2:
        raise ValueError("crop_patch expects a 2-D grayscale frame")
    w_rect = state.s * base_w
    h_rect = state.s * base_h
    if w_rect <= 0 or h_rect <= 0 or out_w < 1 or out_h < 1:
        raise ValueError("zero-area crop rectangle")
    H, W = frame.shape
    if H < 2 or W < 2:
        raise ValueError("frame too small to sample")

    step_x = w_rect / out_w
    step_y = h_rect / out_h
    # pixel centers of the output grid, mapped into source pixel coordinates
    px = state.x - w_rect / 2 + (np.arange(out_w) + 0.5) * step_x - 0.5
    py = state.y - h_rect / 2 + (np.arange(out_h) + 0.5) * step_y - 0.5
    px = np.clip(px, 0.0, W - 1.0)
    py = np.clip(py, 0.0, H - 1.0)

    x0 = np.minimum(np.floor(px).astype(int), W - 2)
    y0 = np.minimum(np.floor(py).astype(int), H - 2)
    fx = (px - x0)[None, :]
    fy = (py - y0)[:, None]
    I00 = frame[np.ix_(y0, x0)]
    I01 = frame[np.ix_(y0, x0 + 1)]
    I10 = frame[np.ix_(y0 + 1, x0)]
    I11 = frame[np.ix_(y0 + 1, x0 + 1)]
    return (I00 * (1 - fy) * (1 - fx) + I01 * (1 - fy) * fx
            + I10 * fy * (1 - fx) + I11 * fy * fx)


def to_vector(patch: np.ndarray) -> np.ndarray:
    """Stack a patch column-major into an appearance vector in [0, 1].

    8-bit patches are divided by 255; float patches must already be
    normalized.
    """
    patch = np.asarray(patch)
    if patch.ndim != 2:
        raise ValueError("patch must be 2-D")
    if np.issubdtype(patch.dtype, np.integer):
        v = patch.astype(float) / 255.0
    else:
        v = patch.astype(float)
        if v.size and (v.min() < -1e-9 or v.max() > 1 + 1e-9):
            raise ValueError("float patch values must lie in [0, 1]")
    return v.flatten(order="F")


def vector_to_patch(v: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Inverse of :func:`to_vector` for a known patch shape."""
    v = np.asarray(v, dtype=float)
    if v.size != out_h * out_w:
        raise ValueError("vector length does not match patch shape")
    return v.reshape((out_h, out_w), order="F")


def mask_candidate(c: np.ndarray, omega: "ObservationMask") -> np.ndarray:
    """Zero the candidate entries outside the observed index set."""
    c = np.asarray(c, dtype=float)
    idx = omega.indices
    if idx.size and (idx.min() < 0 or idx.max() >= c.size):
        raise ObservationMaskError("mask index out of range for candidate")
    out = np.zeros_like(c)
    out[idx] = c[idx]
    return out


@dataclass
class ObservationMask:
    """Sorted set of observed pixel indices within a d-pixel patch."""

    indices: np.ndarray
    d: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        idx = np.sort(idx)
        if idx.size:
            if idx[0] < 0 or idx[-1] >= self.d:
                raise ObservationMaskError("mask indices out of range")
            if np.any(np.diff(idx) == 0):
                raise ObservationMaskError("mask indices must be distinct")
        self.indices = idx

    @property
    def size(self) -> int:
        return int(self.indices.size)

    def complement(self) -> np.ndarray:
        """Boolean selector of the unobserved pixels."""
        unobs = np.ones(self.d, dtype=bool)
        unobs[self.indices] = False
        return unobs
