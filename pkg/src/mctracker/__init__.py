"""Visual tracking by low-rank appearance estimation.

The tracker keeps a small set of target templates spanning a low-dimensional
appearance subspace, observes a subset of pixels from each candidate region,
and estimates the full candidate appearance by nuclear-norm matrix completion
over [templates, observed candidate].  Candidates that really show the target
are reconstructed accurately, so the smallest estimation error localizes it.
"""

from .appearance import MotionState, ObservationMask, crop_patch, \
    mask_candidate, to_gray, to_vector, vector_to_patch
from .completion import CompletionProblem, CompletionResult, \
    DegenerateProblemError, SolverParams, complete, nuclear_norm, svt
from .evaluation import EvalReport, GroundTruth, build_report, \
    low_dimension_degree, overlap, precision_curve, success_curve, tle
from .observation import init_weights, sample_mask, update_weights
from .sequences import GroundTruthError, IngestionError, load_groundtruth, \
    load_sequence, save_groundtruth, save_sequence
from .synthetic import SyntheticSpec, generate_synthetic
from .templates import TemplateSet, assemble, init_templates, \
    update_templates
from .tracker import CandidateScore, FrameResult, TrackerConfig, \
    TrackerLostError, run_tracker, sample_candidates, score_candidate, \
    state_to_bbox, track_frame

__version__ = "0.1.0"

__all__ = [
    "CandidateScore", "CompletionProblem", "CompletionResult",
    "DegenerateProblemError", "EvalReport", "FrameResult", "GroundTruth",
    "GroundTruthError", "IngestionError", "MotionState", "ObservationMask",
    "SolverParams", "SyntheticSpec", "TemplateSet", "TrackerConfig",
    "TrackerLostError", "assemble", "build_report", "complete", "crop_patch",
    "generate_synthetic", "init_templates", "init_weights",
    "load_groundtruth", "load_sequence", "low_dimension_degree",
    "mask_candidate", "nuclear_norm", "overlap", "precision_curve",
    "run_tracker", "sample_candidates", "sample_mask", "save_groundtruth",
    "save_sequence", "score_candidate", "state_to_bbox", "success_curve",
    "svt", "tle", "to_gray", "to_vector", "track_frame", "update_templates",
    "update_weights", "vector_to_patch",
]
