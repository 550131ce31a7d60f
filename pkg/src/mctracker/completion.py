"""Nuclear-norm matrix completion via an inexact augmented Lagrange multiplier
iteration.

The problem solved here is

    min ||X||_*   s.t.  Y = X + E,  P_obs(E) = 0

where ``Y`` is the data matrix, ``obs`` marks the observed entries, and the
slack ``E`` absorbs the unobserved ones.  Each iteration soft-thresholds the
singular values of the current feasible point, projects the slack, and takes a
dual ascent step on the multiplier while the penalty grows geometrically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import svd as _scipy_svd


class DegenerateProblemError(ValueError):
    """Raised when a completion problem has no usable observations."""


def _validate_finite(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def nuclear_norm(M: np.ndarray) -> float:
    """Sum of the singular values of ``M`` (the trace norm)."""
    M = _validate_finite(M)
    return float(np.linalg.svd(M, compute_uv=False).sum())


def _svt(M: np.ndarray, tau: float) -> np.ndarray:
    # economy SVD, soft-shrink the spectrum, rebuild from surviving components
    U, s, Vt = _scipy_svd(M, full_matrices=False, check_finite=False,
                          lapack_driver="gesdd")
    shrunk = s - tau
    r = int((shrunk > 0).sum())
    if r == 0:
        return np.zeros_like(M)
    return (U[:, :r] * shrunk[:r]) @ Vt[:r]


def svt(M: np.ndarray, tau: float) -> np.ndarray:
    """Singular value thresholding, the proximal operator of the trace norm.

    Returns ``U shrink(S, tau) V^T`` where ``shrink`` maps each singular value
    ``s`` to ``max(s - tau, 0)``.  This is the unique minimizer of
    ``tau * ||X||_* + 0.5 * ||X - M||_F^2``.
    """
    M = _validate_finite(M)
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    return _svt(M, float(tau))


@dataclass
class CompletionProblem:
    """A data matrix together with the boolean mask of its observed entries.

    ``Y`` is d x (n+1): the first n columns are fully observed templates and
    the last column is a candidate observed only at masked pixel rows.  The
    class itself does not enforce that column structure; any observation
    pattern is accepted.
    """

    Y: np.ndarray
    observed: np.ndarray

    def __post_init__(self):
        self.Y = _validate_finite(self.Y, "Y")
        self.observed = np.asarray(self.observed, dtype=bool)
        if self.Y.ndim != 2:
            raise ValueError("Y must be a 2-D matrix")
        if self.observed.shape != self.Y.shape:
            raise ValueError("observed mask shape must match Y")


@dataclass
class SolverParams:
    """Iteration controls.  ``mu0=None`` selects 1.25 / sigma_max(Y)."""

    mu0: float | None = None
    rho: float = 1.5
    tol: float = 1e-7
    max_iter: int = 100

    def __post_init__(self):
        if self.mu0 is not None and self.mu0 <= 0:
            raise ValueError("mu0 must be positive")
        if self.rho <= 1:
            raise ValueError("rho must exceed 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")


@dataclass
class CompletionResult:
    """Recovered matrix, slack, and convergence diagnostics.

    ``X_star`` is the low-rank estimate; its last column holds the estimated
    candidate.  ``E`` is zero at observed entries.  ``residual`` is the final
    relative feasibility residual ||Y - X - E||_F / ||Y||_F and
    ``residual_history`` records it per iteration.
    """

    X_star: np.ndarray
    E: np.ndarray
    iterations: int
    residual: float
    converged: bool
    residual_history: list[float] = field(default_factory=list)


def complete(problem: CompletionProblem,
             params: SolverParams | None = None) -> CompletionResult:
    """Solve the completion problem.

    Parameters
    ----------
    problem : CompletionProblem
        Data matrix and observation mask.  Every column needs at least one
        observed entry.
    params : SolverParams, optional
        Solver controls; defaults follow the standard inexact ALM settings
        (mu0 = 1.25 / sigma_max, rho = 1.5, tol = 1e-7, max_iter = 100).

    Returns
    -------
    CompletionResult
        Non-convergence within ``max_iter`` is reported through
        ``converged=False`` rather than an exception: callers scoring
        candidates still use the residual of a slow solve.
    """
    if params is None:
        params = SolverParams()
    Y, obs = problem.Y, problem.observed
    if not obs.any():
        raise DegenerateProblemError("no observed entries")
    cols_empty = ~obs.any(axis=0)
    if cols_empty.any():
        j = int(np.argmax(cols_empty))
        raise DegenerateProblemError(f"column {j} has no observed entries")

    norm_Y = float(np.linalg.norm(Y))
    if norm_Y == 0.0:
        # the zero matrix is feasible and nuclear-norm minimal
        return CompletionResult(np.zeros_like(Y), np.zeros_like(Y), 0, 0.0,
                                True, [0.0])

    if params.mu0 is None:
        mu = 1.25 / float(np.linalg.svd(Y, compute_uv=False)[0])
    else:
        mu = params.mu0

    # A carries Y at observed entries and the current estimate elsewhere;
    # the multiplier L stays supported on the observed set.
    A = np.where(obs, Y, 0.0)
    L = np.zeros_like(Y)
    X = np.zeros_like(Y)
    history: list[float] = []
    residual = np.inf
    converged = False
    iterations = 0

    for iterations in range(1, params.max_iter + 1):
        X = _svt(A + L / mu, 1.0 / mu)
        R = np.where(obs, Y - X, 0.0)
        residual = float(np.linalg.norm(R)) / norm_Y
        history.append(residual)
        if residual <= params.tol:
            converged = True
            break
        A = np.where(obs, Y, X)
        L += mu * R
        mu *= params.rho

    E = np.where(obs, 0.0, Y - X)
    return CompletionResult(X, E, iterations, residual, converged, history)
