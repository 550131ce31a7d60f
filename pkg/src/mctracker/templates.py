"""Target template maintenance.

A fixed-size set of template vectors summarizes previously located targets
and spans the low-dimensional appearance subspace used by the completion
estimator.  Updates are similarity gated: a new target replaces the least
weighted template only when it is far from every existing one, and the
weights drift toward templates that keep matching what the tracker sees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .appearance import MotionState, ObservationMask, crop_patch, to_vector
from .completion import CompletionProblem

SIM_THRESHOLD = 0.85
WEIGHT_ALPHA = 0.2

# deterministic one-pixel shift cycle used to seed the initial template set
_SHIFTS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1))


@dataclass
class TemplateSet:
    """d x n template matrix with one positive weight per column."""

    T: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.T = np.asarray(self.T, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.T.ndim != 2:
            raise ValueError("T must be 2-D")
        if self.weights.shape != (self.T.shape[1],):
            raise ValueError("one weight per template required")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")

    @property
    def n(self) -> int:
        return self.T.shape[1]

    @property
    def d(self) -> int:
        return self.T.shape[0]


def init_templates(y1: np.ndarray, frame: np.ndarray, state: MotionState,
                   base_w: float, base_h: float, out_w: int, out_h: int,
                   n: int) -> TemplateSet:
    """Build the initial template set from the first located target.

    Column 0 is ``y1`` itself; the remaining columns are appearance vectors
    cropped at the initial state shifted by one pixel, cycling through the
    eight neighbors.  Weights start uniform at 1/n.
    """
    y1 = np.asarray(y1, dtype=float)
    if n < 1:
        raise ValueError("need at least one template")
    if y1.size != out_w * out_h:
        raise ValueError("y1 length does not match patch size")
    cols = [y1]
    for k in range(n - 1):
        dx, dy = _SHIFTS[k % len(_SHIFTS)]
        shifted = MotionState(state.x + dx, state.y + dy, state.s)
        cols.append(to_vector(crop_patch(frame, shifted, base_w, base_h,
                                         out_w, out_h)))
    return TemplateSet(np.column_stack(cols), np.full(n, 1.0 / n))


def _cosine_similarities(T: np.ndarray, y: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(T, axis=0) * np.linalg.norm(y)
    return (T.T @ y) / np.maximum(norms, 1e-12)


def update_templates(ts: TemplateSet, y_k: np.ndarray,
                     sim_threshold: float = SIM_THRESHOLD,
                     alpha: float = WEIGHT_ALPHA) -> TemplateSet:
    """Absorb a newly located target into the template set.

    If the best cosine similarity against the current templates falls below
    the threshold, the least weighted template is replaced by ``y_k`` and its
    weight reset to the median weight.  Either way, each weight is then
    multiplied by exp(alpha * similarity to the updated column) and the
    weights are renormalized to mean 1.  At most one column changes per call.
    """
    y_k = np.asarray(y_k, dtype=float)
    if y_k.shape != (ts.d,):
        raise ValueError("target vector length does not match templates")
    T = ts.T.copy()
    w = ts.weights.copy()
    sims = _cosine_similarities(T, y_k)
    if sims.max() < sim_threshold:
        i = int(np.argmin(w))
        T[:, i] = y_k
        w[i] = float(np.median(ts.weights))
        sims = sims.copy()
        sims[i] = 1.0
    w = w * np.exp(alpha * sims)
    return TemplateSet(T, w / w.mean())


def assemble(ts: TemplateSet, c_prime: np.ndarray,
             omega: ObservationMask) -> CompletionProblem:
    """Stack templates and an observed candidate into a completion problem.

    The data matrix is [T, c'] and the observation mask covers every template
    entry plus the candidate rows indexed by omega.
    """
    c_prime = np.asarray(c_prime, dtype=float)
    if c_prime.shape != (ts.d,):
        raise ValueError("candidate length does not match templates")
    if omega.d != ts.d:
        raise ValueError("mask dimension does not match templates")
    Y = np.column_stack([ts.T, c_prime])
    observed = np.zeros(Y.shape, dtype=bool)
    observed[:, :ts.n] = True
    observed[omega.indices, ts.n] = True
    return CompletionProblem(Y, observed)
