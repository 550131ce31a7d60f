"""Observed-pixel bookkeeping: per-pixel sampling weights and mask updates.

Each pixel carries a weight giving its chance of being observed on the next
frame.  After a frame is located, weights are refreshed from the per-pixel
estimation errors: unobserved pixels are weighted inversely to their error,
while pixels that were observed (and therefore have zero error) receive a
bounded weight interpolated between the errors bracketing the median, which
keeps them from dominating the draw.  The new mask is then drawn by weighted
sampling without replacement.
"""

from __future__ import annotations

import numpy as np

from .appearance import ObservationMask

ERROR_FLOOR = 1e-6


def init_weights(d: int) -> np.ndarray:
    """Uniform weights over d pixels."""
    if d < 1:
        raise ValueError("d must be at least 1")
    return np.full(d, 1.0 / d)


def _median_bracket(nonzero_errs: np.ndarray) -> tuple[float, float]:
    """Errors adjacent below and above the median of the nonzero errors.

    With fewer than three distinct values, or when one side of the median is
    empty, the missing bound falls back to 0.5x / 1.5x the median.
    """
    med = float(np.median(nonzero_errs))
    vals = np.unique(nonzero_errs)
    if vals.size < 3:
        return 0.5 * med, 1.5 * med
    below = vals[vals < med]
    above = vals[vals > med]
    e_a = float(below[-1]) if below.size else 0.5 * med
    e_b = float(above[0]) if above.size else 1.5 * med
    return e_a, e_b


def update_weights(err: np.ndarray, omega: ObservationMask,
                   rng: np.random.Generator) -> np.ndarray:
    """Refresh pixel weights from the located target's estimation errors.

    ``err`` is the per-pixel absolute estimation error of the located target.
    Unobserved pixels get weight 1 / (err + floor).  Observed pixels get
    1 / (e_a + u * (e_b - e_a)) where (e_a, e_b) bracket the median nonzero
    error and u is drawn uniformly in [0, 1] per pixel from ``rng``.  The
    result is normalized to sum 1.  An all-zero error map yields uniform
    weights.
    """
    err = np.asarray(err, dtype=float)
    if err.ndim != 1 or err.size != omega.d:
        raise ValueError("err must be a length-d vector")
    if np.any(err < 0):
        raise ValueError("errors must be nonnegative")
    d = err.size
    nz = err[err > 0]
    if nz.size == 0:
        return init_weights(d)

    e_a, e_b = _median_bracket(nz)
    w = np.empty(d)
    unobs = omega.complement()
    w[unobs] = 1.0 / (err[unobs] + ERROR_FLOOR)
    if omega.size:
        u = rng.uniform(0.0, 1.0, omega.size)
        w[omega.indices] = 1.0 / (e_a + u * (e_b - e_a))
    return w / w.sum()


def sample_mask(w: np.ndarray, m: int,
                rng: np.random.Generator) -> ObservationMask:
    """Draw m distinct pixel indices by weight, without replacement.

    Implemented as successive renormalized draws, so the result is exact and
    deterministic under a seeded generator.
    """
    w = np.asarray(w, dtype=float)
    d = w.size
    if m > d:
        raise ValueError("cannot draw more indices than pixels")
    if m < 0:
        raise ValueError("m must be nonnegative")
    if m == d:
        return ObservationMask(np.arange(d), d)
    remaining = w.astype(float).copy()
    chosen = np.empty(m, dtype=np.int64)
    for j in range(m):
        p = remaining / remaining.sum()
        idx = int(rng.choice(d, p=p))
        chosen[j] = idx
        remaining[idx] = 0.0
    return ObservationMask(chosen, d)
