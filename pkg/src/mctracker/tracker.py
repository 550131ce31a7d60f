"""Per-frame tracking loop.

Candidates are drawn from a Gaussian motion model around the previous state,
each is scored by how accurately the completion estimator reconstructs it
from its observed pixels, and the candidate with the smallest estimation
error wins.  The winner's error map then drives the observation-mask update,
and the template set absorbs the new target.

Candidate scoring is a pure function of read-only state, so it can be spread
over worker threads; results are identical for any worker count.  All random
draws happen sequentially on the calling thread.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .appearance import MotionState, ObservationMask, crop_patch, \
    mask_candidate, to_vector
from .completion import DegenerateProblemError, SolverParams, complete
from .observation import init_weights, sample_mask, update_weights
from .templates import TemplateSet, assemble, init_templates, \
    update_templates

_MIN_SCALE = 0.05
_MAX_REDRAWS = 10


class TrackerLostError(RuntimeError):
    """All candidates were rejected; carries the last valid state."""

    def __init__(self, last_state: MotionState):
        super().__init__("tracker lost the target")
        self.last_state = last_state


@dataclass
class TrackerConfig:
    num_candidates: int = 600
    sigma: tuple[float, float, float] = (3.0, 3.0, 0.005)
    patch_w: int = 20
    patch_h: int = 20
    obs_rate: float = 0.7
    n_templates: int = 10
    solver: SolverParams = field(default_factory=SolverParams)
    seed: int = 0
    workers: int = 1
    # unscaled target size; filled in from the first-frame box by run_tracker
    base_w: float | None = None
    base_h: float | None = None

    def __post_init__(self):
        if self.num_candidates < 1:
            raise ValueError("need at least one candidate")
        if not (0.0 < self.obs_rate <= 1.0):
            raise ValueError("obs_rate must lie in (0, 1]")
        if any(s <= 0 for s in self.sigma):
            raise ValueError("sigma components must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        d = self.patch_w * self.patch_h
        if int(round(self.obs_rate * d)) < 1:
            raise ValueError("obs_rate leaves no observed pixels")

    @property
    def patch_dim(self) -> int:
        return self.patch_w * self.patch_h

    @property
    def mask_size(self) -> int:
        return int(round(self.obs_rate * self.patch_dim))


@dataclass
class CandidateScore:
    state: MotionState
    c: np.ndarray
    x_hat: np.ndarray
    err: float
    iterations: int


@dataclass
class CandidateSummary:
    state: MotionState
    err: float
    iterations: int


@dataclass
class FrameResult:
    state: MotionState
    bbox: tuple[float, float, float, float]
    err_map: np.ndarray
    score: float
    per_candidate: list[CandidateSummary]
    omega: np.ndarray  # observed indices used to score this frame


def state_to_bbox(state: MotionState, base_w: float,
                  base_h: float) -> tuple[float, float, float, float]:
    w = state.s * base_w
    h = state.s * base_h
    return (state.x - w / 2, state.y - h / 2, w, h)


def bbox_to_state(bbox) -> MotionState:
    x, y, w, h = bbox
    return MotionState(x + w / 2, y + h / 2, 1.0)


def _crop_intersects(frame_shape, x: float, y: float, s: float,
                     base_w: float, base_h: float) -> bool:
    H, W = frame_shape
    hw = s * base_w / 2
    hh = s * base_h / 2
    return (x + hw > 0 and x - hw < W - 1 and y + hh > 0 and y - hh < H - 1)


def sample_candidates(z_prev: MotionState, cfg: TrackerConfig,
                      rng: np.random.Generator, frame_shape,
                      base_w: float, base_h: float) -> list[MotionState]:
    """Draw candidate states i.i.d. Gaussian around the previous state.

    A draw whose crop rectangle misses the frame entirely is redrawn up to a
    fixed number of attempts and then clamped to the frame interior.
    """
    sx, sy, ss = cfg.sigma
    H, W = frame_shape
    out = []
    for _ in range(cfg.num_candidates):
        for _attempt in range(_MAX_REDRAWS):
            x = z_prev.x + rng.normal(0.0, sx)
            y = z_prev.y + rng.normal(0.0, sy)
            s = max(z_prev.s + rng.normal(0.0, ss), _MIN_SCALE)
            if _crop_intersects(frame_shape, x, y, s, base_w, base_h):
                break
        else:
            x = min(max(x, 0.0), W - 1.0)
            y = min(max(y, 0.0), H - 1.0)
        out.append(MotionState(x, y, s))
    return out


def score_candidate(frame: np.ndarray, state: MotionState, ts: TemplateSet,
                    omega: ObservationMask, cfg: TrackerConfig) -> CandidateScore:
    """Score one candidate by its completion estimation error.

    The candidate appearance is cropped, masked down to the observed pixels,
    completed against the templates, and compared (l2) with the estimate.  A
    degenerate completion problem rejects the candidate with infinite error.
    """
    c = to_vector(crop_patch(frame, state, cfg.base_w, cfg.base_h,
                             cfg.patch_w, cfg.patch_h))
    c_prime = mask_candidate(c, omega)
    try:
        result = complete(assemble(ts, c_prime, omega), cfg.solver)
    except DegenerateProblemError:
        return CandidateScore(state, c, np.zeros_like(c), math.inf, 0)
    x_hat = result.X_star[:, ts.n]
    err = float(np.linalg.norm(c - x_hat))
    return CandidateScore(state, c, x_hat, err, result.iterations)


def _canonical_order(states: list[MotionState]) -> list[MotionState]:
    # deterministic ordering so tie-breaking ignores sampling order
    xs = np.array([st.x for st in states])
    ys = np.array([st.y for st in states])
    ss = np.array([st.s for st in states])
    order = np.lexsort((ss, ys, xs))
    return [states[i] for i in order]


def _score_all(frame, states, ts, omega, cfg) -> list[CandidateScore]:
    if cfg.workers == 1 or len(states) < 2:
        return [score_candidate(frame, st, ts, omega, cfg) for st in states]
    results: list[CandidateScore | None] = [None] * len(states)

    def work(span):
        lo, hi = span
        for i in range(lo, hi):
            results[i] = score_candidate(frame, states[i], ts, omega, cfg)

    bounds = np.linspace(0, len(states), cfg.workers + 1).astype(int)
    spans = [(int(bounds[i]), int(bounds[i + 1])) for i in range(cfg.workers)]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        list(pool.map(work, spans))
    return results  # type: ignore[return-value]


def track_frame(frame: np.ndarray, z_prev: MotionState, ts: TemplateSet,
                omega: ObservationMask, weights: np.ndarray,
                cfg: TrackerConfig, rng: np.random.Generator
                ) -> tuple[FrameResult, TemplateSet, ObservationMask, np.ndarray]:
    """Locate the target on one frame and refresh the online model.

    Returns the frame result plus the updated templates, observation mask and
    pixel weights.  Updates run in the order weights, mask, templates so the
    weight update consumes the error map before the templates absorb the new
    target.
    """
    states = _canonical_order(
        sample_candidates(z_prev, cfg, rng, frame.shape, cfg.base_w, cfg.base_h))
    scores = _score_all(frame, states, ts, omega, cfg)

    errs = np.array([sc.err for sc in scores])
    best = int(np.argmin(errs))
    if not np.isfinite(errs[best]):
        raise TrackerLostError(z_prev)
    winner = scores[best]

    err_map = np.abs(winner.c - winner.x_hat)
    result = FrameResult(
        state=winner.state,
        bbox=state_to_bbox(winner.state, cfg.base_w, cfg.base_h),
        err_map=err_map,
        score=math.exp(-winner.err),
        per_candidate=[CandidateSummary(sc.state, sc.err, sc.iterations)
                       for sc in scores],
        omega=omega.indices.copy(),
    )
    new_weights = update_weights(err_map, omega, rng)
    new_omega = sample_mask(new_weights, cfg.mask_size, rng)
    new_ts = update_templates(ts, winner.c)
    return result, new_ts, new_omega, new_weights


def run_tracker(frames, init_bbox, cfg: TrackerConfig | None = None
                ) -> list[FrameResult]:
    """Track through a sequence starting from a first-frame bounding box.

    ``frames`` is a sequence of 2-D float grayscale images in [0, 1].  The
    base target size comes from the initial box; frame 0's result is the box
    itself.  Fully deterministic for a fixed config seed.
    """
    if cfg is None:
        cfg = TrackerConfig()
    frames = list(frames)
    if not frames:
        raise ValueError("empty sequence")
    x0, y0, bw, bh = (float(v) for v in init_bbox)
    if bw <= 0 or bh <= 0:
        raise ValueError("initial box must have positive size")
    cfg = replace(cfg, base_w=bw, base_h=bh)

    rng = np.random.default_rng(cfg.seed)
    state = bbox_to_state(init_bbox)
    y1 = to_vector(crop_patch(frames[0], state, bw, bh,
                              cfg.patch_w, cfg.patch_h))
    ts = init_templates(y1, frames[0], state, bw, bh,
                        cfg.patch_w, cfg.patch_h, cfg.n_templates)
    weights = init_weights(cfg.patch_dim)
    omega = sample_mask(weights, cfg.mask_size, rng)

    trajectory = [FrameResult(
        state=state,
        bbox=(x0, y0, bw, bh),
        err_map=np.zeros(cfg.patch_dim),
        score=1.0,
        per_candidate=[],
        omega=omega.indices.copy(),
    )]
    for frame in frames[1:]:
        result, ts, omega, weights = track_frame(
            frame, trajectory[-1].state, ts, omega, weights, cfg, rng)
        trajectory.append(result)
    return trajectory
