"""Shape-parameter selection by leave-one-out cross validation.

Leave-one-out errors are computed with Rippa's shortcut
``e_i = c_i / (K^{-1})_ii``, which equals the prediction error of the
interpolant refitted without node i but costs one factorization instead of N.
Selection scans a fixed epsilon grid, scores each value by the LOO root mean
square error, and breaks ties toward the smaller epsilon (the smoother
interpolant).  Grid values whose system is too ill-conditioned to factorize
are scored +inf and recorded rather than aborting the scan.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .interpolation import (
    IllConditionedError,
    NodeSet,
    _augmented_distance_matrix,
    _check_injective_augmented,
    _factor_condition_gate,
    _factor_inverse_diag,
    _factor_solve,
    _factorize,
    CONDITION_LIMIT,
    gram_from_distances,
)
from .kernels import RadialKernel
from .scalings import AugmentedMap


class SelectionError(RuntimeError):
    """Every epsilon on the grid failed; carries the per-epsilon failure log."""

    def __init__(self, message: str, failures):
        super().__init__(message)
        self.failures = failures


def default_epsilon_grid(count: int = 200, lo: float = 0.01, hi: float = 50.0):
    """Equispaced epsilon grid; defaults match the discontinuous-function study."""
    return tuple(np.linspace(lo, hi, count))


@dataclass(frozen=True)
class LoocvConfig:
    epsilon_grid: tuple = field(default_factory=default_epsilon_grid)
    scorer: str = "loo_rmse"

    def __post_init__(self):
        grid = tuple(float(e) for e in self.epsilon_grid)
        if len(grid) == 0:
            raise ValueError("epsilon grid must be non-empty")
        if any(e <= 0 for e in grid):
            raise ValueError("epsilon grid values must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("epsilon grid must be strictly increasing")
        if self.scorer != "loo_rmse":
            raise ValueError(f"unknown scorer {self.scorer!r}")
        object.__setattr__(self, "epsilon_grid", grid)


@dataclass(frozen=True)
class SelectionResult:
    best_epsilon: float
    score_curve: tuple  # ((epsilon, loo_rmse), ...) -- same length as the grid
    failures: tuple  # ((epsilon, message), ...)


def _loo_from_factor(factor, values):
    coeffs = _factor_solve(factor, values)
    inv_diag = _factor_inverse_diag(factor)
    if values.ndim == 1:
        return coeffs / inv_diag
    return coeffs / inv_diag[:, None]


def loo_errors(kernel: RadialKernel, m: AugmentedMap, nodes: NodeSet, values):
    """Leave-one-out prediction errors ``f(x_i) - R^(-i)(x_i)`` for all i.

    ``values`` may be an (N,) vector or an (N, k) stack of data columns
    sharing the node set; errors come back in the same shape.
    """
    if nodes.n < 2:
        raise ValueError("leave-one-out needs at least two nodes")
    values = np.asarray(values, dtype=float)
    if values.shape[0] != nodes.n:
        raise ValueError(f"expected {nodes.n} values, got {values.shape[0]}")
    dist, _ = _augmented_distance_matrix(m, nodes)
    _check_injective_augmented(dist)
    k = gram_from_distances(kernel.profile, kernel.epsilon, dist)
    factor = _factorize(k)
    cond = _factor_condition_gate(factor)
    if cond > CONDITION_LIMIT:
        raise IllConditionedError(
            f"condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:.0e}", cond
        )
    return _loo_from_factor(factor, values)


def select_epsilon(
    config: LoocvConfig,
    profile: str,
    m: AugmentedMap,
    nodes: NodeSet,
    values,
) -> SelectionResult:
    """Pick the epsilon minimizing the LOO-RMSE over the configured grid.

    Deterministic: same inputs give the same selection.  With multi-column
    ``values`` the score pools the squared LOO errors of all columns (used by
    the imaging pipeline to share one epsilon between the real and imaginary
    visibility parts).
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] != nodes.n:
        raise ValueError(f"expected {nodes.n} values, got {values.shape[0]}")
    dist, _ = _augmented_distance_matrix(m, nodes)
    _check_injective_augmented(dist)

    curve = []
    failures = []
    for eps in config.epsilon_grid:
        k = gram_from_distances(profile, eps, dist)
        try:
            factor = _factorize(k)
            cond = _factor_condition_gate(factor)
            if cond > CONDITION_LIMIT:
                raise IllConditionedError(
                    f"condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:.0e}",
                    cond,
                )
            errors = _loo_from_factor(factor, values)
            score = float(np.sqrt(np.mean(errors**2)))
        except (IllConditionedError, np.linalg.LinAlgError) as exc:
            failures.append((eps, str(exc)))
            score = np.inf
        curve.append((eps, score))

    scores = np.asarray([s for _, s in curve])
    if not np.any(np.isfinite(scores)):
        raise SelectionError(
            "every epsilon on the grid failed the conditioning gate",
            tuple(failures),
        )
    # argmin returns the first minimizer; the grid is increasing, so ties
    # resolve toward the smaller epsilon
    best = float(config.epsilon_grid[int(np.argmin(scores))])
    return SelectionResult(
        best_epsilon=best, score_curve=tuple(curve), failures=tuple(failures)
    )
