"""Kernel interpolation: Gram assembly, coefficient solve, evaluation.

The interpolant has the form ``R(x) = sum_i c_i * kappa((S(x), psi(x)),
(S(x_i), psi(x_i)))`` where the coefficients solve the symmetric positive
definite system ``K c = f``.  Because the augmented map only relocates points,
fitting with a nontrivial map on nodes X is literally classical interpolation
on the augmented node set Lambda(X) in R^(d+1); this module exploits that by
assembling everything from augmented-point distance matrices.

All solvers are dense: node counts stay in the hundreds for every use case in
this package, so a Cholesky factorization (with a symmetric eigendecomposition
fallback) is the right tool.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve, eigh
from scipy.linalg import lapack as _lapack

from .kernels import RadialKernel, profile_function
from .scalings import AugmentedMap, InjectivityError

CONDITION_LIMIT = 1e16
_EXACT_CONDITION_MAX_N = 500
_EVAL_CHUNK = 2048


class IllConditionedError(ValueError):
    """Interpolation system too ill-conditioned to solve reliably."""

    def __init__(self, message: str, condition_estimate: float):
        super().__init__(message)
        self.condition_estimate = condition_estimate


class NumericalBreakdownError(ValueError):
    """Power-function radicand went significantly negative."""


@dataclass(frozen=True)
class NodeSet:
    """N distinct points in R^d, with optional region labels.

    Points must be pairwise distinct; duplicates are rejected at construction
    rather than silently merged.
    """

    points: np.ndarray
    region_labels: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("points must be a non-empty (N, d) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        if pts.shape[0] > 1:
            d = pairwise_distances(pts)
            d[np.diag_indices(pts.shape[0])] = np.inf
            if np.min(d) == 0.0:
                i, j = np.unravel_index(np.argmin(d), d.shape)
                raise ValueError(f"duplicate nodes at indices {i} and {j}")
        object.__setattr__(self, "points", pts)
        if self.region_labels is not None:
            labels = np.asarray(self.region_labels, dtype=int)
            if labels.shape != (pts.shape[0],):
                raise ValueError("region_labels must be a length-N vector")
            object.__setattr__(self, "region_labels", labels)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class FitDiagnostics:
    condition_estimate: float
    residual_at_nodes: float


@dataclass(frozen=True)
class Interpolant:
    """Fitted kernel interpolant; immutable and safe for concurrent evaluation."""

    nodes: NodeSet
    kernel: RadialKernel
    map: AugmentedMap
    coefficients: np.ndarray
    diagnostics: FitDiagnostics

    def __call__(self, queries):
        return evaluate(self, queries)


def pairwise_distances(a, b=None):
    """Euclidean distance matrix between point stacks ``a`` (n, m) and ``b`` (q, m).

    Differences are formed explicitly (no dot-product shortcut) so that
    appending a constant coordinate leaves the result bitwise unchanged.
    """
    a = np.asarray(a, dtype=float)
    b = a if b is None else np.asarray(b, dtype=float)
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def _augmented_distance_matrix(m: AugmentedMap, nodes: NodeSet):
    aug = m.augment(nodes.points)
    return pairwise_distances(aug), aug


def gram_from_distances(profile: str, epsilon: float, dist):
    """Kernel matrix from a node distance matrix: upper triangle, mirrored."""
    phi = profile_function(profile)
    k = np.triu(phi(epsilon * np.triu(dist)))
    return k + np.triu(k, 1).T


def assemble_gram(kernel: RadialKernel, m: AugmentedMap, nodes: NodeSet):
    """Assemble the N x N kernel matrix ``K_ij = kappa(Lambda(x_i), Lambda(x_j))``.

    The upper triangle is computed and mirrored, so the result is exactly
    symmetric.
    """
    dist, _ = _augmented_distance_matrix(m, nodes)
    return gram_from_distances(kernel.profile, kernel.epsilon, dist)


def _factorize(k):
    """Cholesky with eigendecomposition fallback; returns an opaque factor."""
    try:
        c, lower = cho_factor(k, lower=False, check_finite=False)
        return ("chol", (c, lower), k)
    except np.linalg.LinAlgError:
        w, q = eigh(k, check_finite=False)
        if np.min(w) <= 0:
            lam_max = float(np.max(np.abs(w)))
            lam_min = float(np.min(w))
            est = np.inf if lam_min <= 0 else lam_max / lam_min
            raise IllConditionedError(
                f"kernel matrix is numerically singular "
                f"(min eigenvalue {lam_min:.3e})",
                est,
            ) from None
        return ("eigh", (w, q), k)


def _factor_solve(factor, b):
    kind, data, _ = factor
    if kind == "chol":
        return cho_solve(data, b, check_finite=False)
    w, q = data
    return q @ ((q.T @ b).T / w).T


def _factor_condition_gate(factor):
    """Cheap condition estimate for go/no-go gating (reciprocal-norm based)."""
    kind, data, k = factor
    if kind == "chol":
        anorm = float(np.max(np.sum(np.abs(k), axis=1)))
        rcond, info = _lapack.dpocon(data[0], anorm)
        if info != 0 or rcond == 0:
            return np.inf
        return 1.0 / rcond
    w, _ = data
    return float(np.max(w) / np.min(w))


def _factor_inverse_diag(factor):
    kind, data, _ = factor
    if kind == "chol":
        inv, info = _lapack.dpotri(data[0], lower=0)
        if info != 0:
            raise IllConditionedError("inverse from Cholesky factor failed", np.inf)
        return np.diag(inv).copy()
    w, q = data
    return np.sum(q * q / w[None, :], axis=1)


def condition_estimate(k, factor=None):
    """lambda_max / lambda_min of a symmetric positive definite matrix.

    Exact (full symmetric eigensolve) up to N = 500; power / inverse power
    iteration beyond that.
    """
    n = k.shape[0]
    if n <= _EXACT_CONDITION_MAX_N:
        w = np.linalg.eigvalsh(k)
        if w[0] <= 0:
            return np.inf
        return float(w[-1] / w[0])
    if factor is None:
        factor = _factorize(k)
    v = np.ones(n) / np.sqrt(n)
    lam_max = 0.0
    for _ in range(60):
        v = k @ v
        lam_max = float(np.linalg.norm(v))
        if lam_max == 0:
            return np.inf
        v /= lam_max
    u = np.ones(n) / np.sqrt(n)
    inv_norm = 0.0
    for _ in range(60):
        u = _factor_solve(factor, u)
        inv_norm = float(np.linalg.norm(u))
        u /= inv_norm
    return lam_max * inv_norm


def _check_injective_augmented(dist, tol=1e-12):
    n = dist.shape[0]
    if n < 2:
        return
    off = dist + np.diag(np.full(n, np.inf))
    i, j = np.unravel_index(np.argmin(off), off.shape)
    if off[i, j] < tol:
        raise InjectivityError(
            f"augmented nodes {i} and {j} coincide within {off[i, j]:.3e}; "
            "the node map is not injective on this node set"
        )


def fit(
    kernel: RadialKernel,
    m: AugmentedMap,
    nodes: NodeSet,
    values,
    ridge: float = 0.0,
) -> Interpolant:
    """Solve ``K c = f`` and return the fitted interpolant.

    Parameters
    ----------
    kernel, m, nodes
        Kernel, augmented map, and node set defining the Gram matrix.
    values
        Data vector of length N (or (N, k) for k right-hand sides).
    ridge
        Optional Tikhonov term added to the diagonal; defaults to 0 (pure
        interpolation).

    Raises
    ------
    IllConditionedError
        If factorization fails outright or the condition estimate exceeds
        1e16; the estimate rides along on the exception.
    InjectivityError
        If the map collapses two nodes (augmented points closer than 1e-12).
    """
    values = np.asarray(values, dtype=float)
    if values.shape[0] != nodes.n:
        raise ValueError(f"expected {nodes.n} values, got {values.shape[0]}")
    dist, _ = _augmented_distance_matrix(m, nodes)
    _check_injective_augmented(dist)
    k = gram_from_distances(kernel.profile, kernel.epsilon, dist)
    if ridge:
        k = k + ridge * np.eye(nodes.n)

    factor = _factorize(k)
    cond = condition_estimate(k, factor)
    if cond > CONDITION_LIMIT:
        raise IllConditionedError(
            f"condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:.0e}", cond
        )
    coeffs = _factor_solve(factor, values)
    # one step of iterative refinement keeps the node residual at machine
    # level even when the condition number approaches the gate
    coeffs = coeffs + _factor_solve(factor, values - k @ coeffs)
    residual = float(np.max(np.abs(k @ coeffs - values)))
    return Interpolant(
        nodes=nodes,
        kernel=kernel,
        map=m,
        coefficients=coeffs,
        diagnostics=FitDiagnostics(condition_estimate=cond, residual_at_nodes=residual),
    )


def evaluate(interp: Interpolant, queries):
    """Evaluate the interpolant at query points (Q, d) -> (Q,)."""
    queries = np.asarray(queries, dtype=float)
    single = queries.ndim == 1
    queries = np.atleast_2d(queries)
    aug_nodes = interp.map.augment(interp.nodes.points)
    phi = profile_function(interp.kernel.profile)
    out = np.empty(
        queries.shape[0]
        if interp.coefficients.ndim == 1
        else (queries.shape[0], interp.coefficients.shape[1])
    )
    for start in range(0, queries.shape[0], _EVAL_CHUNK):
        chunk = queries[start : start + _EVAL_CHUNK]
        aug_q = interp.map.augment(chunk)
        cross = phi(interp.kernel.epsilon * pairwise_distances(aug_q, aug_nodes))
        out[start : start + _EVAL_CHUNK] = cross @ interp.coefficients
    return out[0] if single else out


def power_function(kernel: RadialKernel, m: AugmentedMap, nodes: NodeSet, queries):
    """Pointwise power function ``sqrt(kappa(x,x) - k(x)^T K^{-1} k(x))``.

    The radicand is clamped to zero when it dips no lower than -1e-12
    (round-off); anything more negative raises ``NumericalBreakdownError``.
    """
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    k = assemble_gram(kernel, m, nodes)
    factor = _factorize(k)
    aug_nodes = m.augment(nodes.points)
    aug_q = m.augment(queries)
    phi = profile_function(kernel.profile)
    cross = phi(kernel.epsilon * pairwise_distances(aug_q, aug_nodes))
    diag_val = phi(np.zeros(()))
    radicand = diag_val - np.sum(cross * _factor_solve(factor, cross.T).T, axis=1)
    low = float(np.min(radicand))
    if low < -1e-12:
        raise NumericalBreakdownError(
            f"power function radicand reached {low:.3e}; system too ill-conditioned"
        )
    return np.sqrt(np.clip(radicand, 0.0, None))
