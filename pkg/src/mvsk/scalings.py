"""Scaling functions, node maps, and their composition into augmented maps.

The augmented map ``Lambda(x) = (S(x), psi(x))`` sends a point in R^d to
R^(d+1): an injective node map ``S`` redistributes the points while a scalar
scaling function ``psi`` supplies the extra coordinate.  Evaluating a radial
kernel on augmented point pairs yields, depending on the choice of ``S`` and
``psi``:

* classical kernel      -- identity map, constant scaling;
* mapped kernel         -- nontrivial ``S``, constant scaling;
* variably scaled kernel -- identity map, nontrivial ``psi``;
* mapped variably scaled kernel -- both nontrivial.

A piecewise-constant ``psi`` whose jumps coincide with the jumps of the target
function suppresses the Gibbs phenomenon; maps like the componentwise-erf
uniformizer improve node-distribution quality (smaller fill distance, larger
separation distance).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import erf

from .kernels import RadialKernel, eval_kernel


class InjectivityError(ValueError):
    """Raised when a node map sends two distinct nodes to (nearly) the same point."""


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------


class Partition:
    """Decomposition of the domain into disjoint regions, indexed from 0."""

    n_regions: int

    def region_of(self, points):
        """Region index of each point; shape ``points.shape[:-1]``."""
        raise NotImplementedError

    def neighbor_pairs(self) -> Optional[Sequence[tuple[int, int]]]:
        """Declared adjacent region pairs, or None when adjacency is unknown."""
        return None


@dataclass(frozen=True)
class AxisThresholdPartition(Partition):
    """Slab partition along one coordinate axis.

    Region ``k`` is ``{x : thresholds[k-1] <= x[axis] < thresholds[k]}`` with
    the outer regions unbounded, so every point of R^d belongs to exactly one
    region.  Consecutive regions are neighbors.
    """

    axis: int
    thresholds: tuple

    def __post_init__(self):
        thr = tuple(float(t) for t in self.thresholds)
        if len(thr) == 0:
            raise ValueError("thresholds must be non-empty")
        if any(b <= a for a, b in zip(thr, thr[1:])):
            raise ValueError("thresholds must be strictly increasing")
        object.__setattr__(self, "thresholds", thr)

    @property
    def n_regions(self) -> int:
        return len(self.thresholds) + 1

    def region_of(self, points):
        points = np.asarray(points, dtype=float)
        coord = points[..., self.axis]
        return np.searchsorted(np.asarray(self.thresholds), coord, side="right")

    def neighbor_pairs(self):
        return [(k, k + 1) for k in range(self.n_regions - 1)]


@dataclass(frozen=True)
class CallbackPartition(Partition):
    """Partition defined by a user callback ``fn(points) -> region indices``.

    The callback must return an integer region index in ``[0, n_regions)`` for
    every covered point and a negative index for uncovered ones.
    """

    fn: Callable
    n_regions: int
    neighbors: Optional[tuple] = None

    def region_of(self, points):
        points = np.asarray(points, dtype=float)
        idx = np.asarray(self.fn(points))
        if np.any(idx < 0) or np.any(idx >= self.n_regions):
            raise ValueError("point outside every partition region")
        return idx

    def neighbor_pairs(self):
        return self.neighbors


# ---------------------------------------------------------------------------
# scaling functions psi
# ---------------------------------------------------------------------------


class ScalingFunction:
    """Scalar function psi on the domain; callable on (..., d) point arrays."""

    def __call__(self, points):
        raise NotImplementedError

    def spec(self) -> dict:
        raise TypeError(f"{type(self).__name__} cannot be serialized to a spec")


@dataclass(frozen=True)
class ConstantScaling(ScalingFunction):
    alpha: float = 0.0

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        return np.full(points.shape[:-1], float(self.alpha))

    def spec(self):
        return {"kind": "constant", "alpha": float(self.alpha)}


@dataclass(frozen=True)
class PiecewiseConstantScaling(ScalingFunction):
    """psi constant on each partition region: ``psi|_{region k} = values[k]``.

    When the partition declares adjacency, neighboring regions must carry
    distinct values (otherwise the intended jump of psi vanishes there).
    """

    partition: Partition
    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if len(vals) != self.partition.n_regions:
            raise ValueError(
                f"expected {self.partition.n_regions} region values, got {len(vals)}"
            )
        pairs = self.partition.neighbor_pairs()
        if pairs is not None:
            for i, j in pairs:
                if vals[i] == vals[j]:
                    raise ValueError(
                        f"neighboring regions {i} and {j} carry equal value {vals[i]}"
                    )
        object.__setattr__(self, "values", vals)

    def __call__(self, points):
        idx = self.partition.region_of(points)
        return np.asarray(self.values, dtype=float)[idx]

    def spec(self):
        part = self.partition
        if not isinstance(part, AxisThresholdPartition):
            raise TypeError("only axis-threshold partitions are serializable")
        return {
            "kind": "piecewise_constant",
            "axis": part.axis,
            "thresholds": list(part.thresholds),
            "values": list(self.values),
        }


class SampledScaling(ScalingFunction):
    """psi given by samples on a rectilinear 2-D grid, evaluated bilinearly.

    Queries outside the grid are clamped to the boundary.  Used when psi comes
    from an image sampled on a grid (e.g. a back-projected map transformed to
    the frequency plane) rather than from a closed-form expression.
    """

    def __init__(self, x_axis, y_axis, values):
        x_axis = np.asarray(x_axis, dtype=float)
        y_axis = np.asarray(y_axis, dtype=float)
        values = np.asarray(values, dtype=float)
        if x_axis.ndim != 1 or y_axis.ndim != 1:
            raise ValueError("grid axes must be 1-D")
        if values.shape != (x_axis.size, y_axis.size):
            raise ValueError(
                f"values shape {values.shape} does not match axes "
                f"({x_axis.size}, {y_axis.size})"
            )
        if np.any(np.diff(x_axis) <= 0) or np.any(np.diff(y_axis) <= 0):
            raise ValueError("grid axes must be strictly increasing")
        self.x_axis = x_axis
        self.y_axis = y_axis
        self.values = values

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != 2:
            raise ValueError("sampled scaling is defined on a 2-D grid")
        shape = points.shape[:-1]
        pts = points.reshape(-1, 2)
        x = np.clip(pts[:, 0], self.x_axis[0], self.x_axis[-1])
        y = np.clip(pts[:, 1], self.y_axis[0], self.y_axis[-1])
        ix = np.clip(np.searchsorted(self.x_axis, x) - 1, 0, self.x_axis.size - 2)
        iy = np.clip(np.searchsorted(self.y_axis, y) - 1, 0, self.y_axis.size - 2)
        tx = (x - self.x_axis[ix]) / (self.x_axis[ix + 1] - self.x_axis[ix])
        ty = (y - self.y_axis[iy]) / (self.y_axis[iy + 1] - self.y_axis[iy])
        v00 = self.values[ix, iy]
        v10 = self.values[ix + 1, iy]
        v01 = self.values[ix, iy + 1]
        v11 = self.values[ix + 1, iy + 1]
        out = (
            v00 * (1 - tx) * (1 - ty)
            + v10 * tx * (1 - ty)
            + v01 * (1 - tx) * ty
            + v11 * tx * ty
        )
        return out.reshape(shape)

    def spec(self):
        return {
            "kind": "sampled",
            "x_axis": self.x_axis.tolist(),
            "y_axis": self.y_axis.tolist(),
            "values": self.values.tolist(),
        }


@dataclass(frozen=True)
class CallbackScaling(ScalingFunction):
    fn: Callable

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        return np.asarray(self.fn(points), dtype=float)


# ---------------------------------------------------------------------------
# node maps S
# ---------------------------------------------------------------------------


class NodeMap:
    """Injective map S of the domain into R^d; callable on (..., d) arrays."""

    def __call__(self, points):
        raise NotImplementedError

    def spec(self) -> dict:
        raise TypeError(f"{type(self).__name__} cannot be serialized to a spec")


@dataclass(frozen=True)
class IdentityMap(NodeMap):
    def __call__(self, points):
        return np.array(points, dtype=float, copy=True)

    def spec(self):
        return {"kind": "identity"}


@dataclass(frozen=True)
class SGibbsMap(NodeMap):
    """Piecewise translation opening gaps at region boundaries.

    Points of region ``k`` (0-based) are shifted by ``(k+1) * beta`` in every
    coordinate, so distinct regions are pushed apart by at least
    ``|beta| * sqrt(d)`` per region index step.  The mapped set may leave the
    original domain; only injectivity matters for interpolation.
    """

    partition: Partition
    beta: float = 1.0

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        idx = self.partition.region_of(points)
        shift = (np.asarray(idx, dtype=float) + 1.0) * self.beta
        return points + shift[..., None]

    def spec(self):
        part = self.partition
        if not isinstance(part, AxisThresholdPartition):
            raise TypeError("only axis-threshold partitions are serializable")
        return {
            "kind": "s_gibbs",
            "axis": part.axis,
            "thresholds": list(part.thresholds),
            "beta": float(self.beta),
        }


@dataclass(frozen=True)
class ErfUniformizeMap(NodeMap):
    """Componentwise ``erf((x_j - mean_j) / sqrt(2 * variance_j))``.

    Sends samples of a normal distribution with matching mean and (diagonal)
    covariance to an approximately uniform distribution on [-1, 1]^d, which
    decreases the fill distance and increases the separation distance of
    clustered node sets.
    """

    mean: float = 0.0
    variance: float = 0.1

    def __post_init__(self):
        var = np.asarray(self.variance, dtype=float)
        if np.any(var <= 0):
            raise ValueError("variance must be positive")

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        mean = np.asarray(self.mean, dtype=float)
        var = np.asarray(self.variance, dtype=float)
        return erf((points - mean) / np.sqrt(2.0 * var))

    def spec(self):
        return {
            "kind": "erf_uniformize",
            "mean": np.asarray(self.mean, dtype=float).tolist(),
            "variance": np.asarray(self.variance, dtype=float).tolist(),
        }


@dataclass(frozen=True)
class LogPolarMap(NodeMap):
    """Log-polar radial rescaling of the plane, preserving direction.

    A point at radius ``r`` and angle ``theta`` (two-argument angle, so
    antipodal points stay antipodal and the map is injective) goes to radius
    ``rho(r)`` at the same angle, with

        rho(r) = normalizer * log(r)                  (r_ref is None)
        rho(r) = normalizer * log(r / r_ref)          (otherwise)

    With ``r_ref`` below the smallest data radius the mapped radii are
    positive and span a much smaller ratio than the original ones, turning a
    cluster of concentric circles into a circular crown.  The origin is a
    singularity of the map.
    """

    normalizer: float = 1.0
    r_ref: Optional[float] = None

    def __post_init__(self):
        if self.r_ref is not None and not self.r_ref > 0:
            raise ValueError("r_ref must be positive")

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != 2:
            raise ValueError("log-polar map is defined on the plane")
        r = np.linalg.norm(points, axis=-1)
        if np.any(r == 0):
            raise ValueError("log-polar map is singular at the origin")
        rho = np.log(r) if self.r_ref is None else np.log(r / self.r_ref)
        scale = self.normalizer * rho / r
        return points * scale[..., None]

    def spec(self):
        out = {"kind": "log_polar", "normalizer": float(self.normalizer)}
        if self.r_ref is not None:
            out["r_ref"] = float(self.r_ref)
        return out


@dataclass(frozen=True)
class CallbackMap(NodeMap):
    fn: Callable

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        return np.asarray(self.fn(points), dtype=float)


def check_injectivity(node_map: NodeMap, points, tol: float = 1e-12):
    """Empirical injectivity check: mapped points must not coincide within tol."""
    mapped = np.atleast_2d(node_map(np.asarray(points, dtype=float)))
    n = mapped.shape[0]
    if n < 2:
        return
    diff = mapped[:, None, :] - mapped[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    dist[np.diag_indices(n)] = np.inf
    i, j = np.unravel_index(np.argmin(dist), dist.shape)
    if dist[i, j] < tol:
        raise InjectivityError(
            f"map sends nodes {i} and {j} within {dist[i, j]:.3e} of each other"
        )


# ---------------------------------------------------------------------------
# augmented map and kernel evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AugmentedMap:
    """The pair ``(S, psi)`` defining ``Lambda(x) = (S(x), psi(x))`` in R^(d+1)."""

    node_map: NodeMap
    scaling: ScalingFunction

    @classmethod
    def trivial(cls) -> "AugmentedMap":
        """Identity map with zero scaling: plain kernel interpolation."""
        return cls(IdentityMap(), ConstantScaling(0.0))

    def augment(self, points):
        points = np.asarray(points, dtype=float)
        mapped = np.asarray(self.node_map(points), dtype=float)
        extra = np.asarray(self.scaling(points), dtype=float)
        return np.concatenate([mapped, extra[..., None]], axis=-1)

    def spec(self):
        return {"map": self.node_map.spec(), "scaling": self.scaling.spec()}


def apply_scaling(psi: ScalingFunction, x):
    """Evaluate psi at x; scalar for a single point, array for stacked points."""
    x = np.asarray(x, dtype=float)
    out = psi(x)
    return float(out) if np.ndim(out) == 0 else out


def apply_map(s: NodeMap, x):
    """Evaluate the node map S at x."""
    return s(np.asarray(x, dtype=float))


def augment(m: AugmentedMap, x):
    """Evaluate ``Lambda(x) = (S(x), psi(x))``."""
    return m.augment(x)


def mvsk_eval(kernel: RadialKernel, m: AugmentedMap, x, y):
    """Evaluate the (mapped, variably scaled) kernel on a point pair.

    Equals ``phi(sqrt(||S(x) - S(y)||^2 + (psi(x) - psi(y))^2))`` scaled by
    the kernel's shape parameter; reduces to the mapped kernel for constant
    psi and to the variably scaled kernel for the identity map.
    """
    return eval_kernel(kernel, m.augment(x), m.augment(y))
