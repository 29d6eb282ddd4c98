"""Node-set quality metrics and the error norm used in the experiments.

The fill distance drives the achievable interpolation accuracy; the
separation distance drives conditioning.  Mapping a clustered node set with a
spreading map trades one against the other, which is exactly what the metric
pair here is meant to expose.  The fill-distance supremum is approximated on
a uniform evaluation grid over the domain box; this underestimates the true
supremum uniformly across compared node sets, which is all the comparisons
need.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .interpolation import NodeSet
from .scalings import PiecewiseConstantScaling

_MAX_GRID_POINTS = 5_000_000


@dataclass(frozen=True)
class DomainBox:
    """Axis-aligned box with a per-axis evaluation-grid resolution."""

    lower: tuple
    upper: tuple
    resolution: int = 200

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lower) != len(upper):
            raise ValueError("lower and upper must have equal length")
        if any(u <= l for l, u in zip(lower, upper)):
            raise ValueError("box must satisfy lower < upper componentwise")
        if self.resolution < 2:
            raise ValueError("grid resolution must be at least 2")
        if self.resolution ** len(lower) > _MAX_GRID_POINTS:
            raise ValueError("evaluation grid too large; lower the resolution")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def dim(self) -> int:
        return len(self.lower)

    def grid(self):
        """Uniform evaluation grid as an (R^d, d) array."""
        axes = [
            np.linspace(l, u, self.resolution)
            for l, u in zip(self.lower, self.upper)
        ]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def contains(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        return np.all((points >= lo) & (points <= hi), axis=1)


def unit_square(resolution: int = 200) -> DomainBox:
    """The standard experiment domain [-1, 1]^2."""
    return DomainBox((-1.0, -1.0), (1.0, 1.0), resolution)


def fill_distance(nodes: NodeSet, domain: DomainBox) -> float:
    """Largest nearest-node distance over the domain evaluation grid.

    Grid approximation (from below) of ``sup_x min_k ||x - x_k||``.
    """
    if nodes.n < 1:
        raise ValueError("fill distance needs at least one node")
    tree = cKDTree(nodes.points)
    dist, _ = tree.query(domain.grid(), k=1)
    return float(np.max(dist))


def separation_distance(nodes: NodeSet) -> float:
    """Half the minimum pairwise node distance (exact)."""
    if nodes.n < 2:
        raise ValueError("separation distance needs at least two nodes")
    return 0.5 * float(np.min(pdist(nodes.points)))


@dataclass(frozen=True)
class RegionalDistances:
    """Per-region and global fill / separation distances.

    ``fill_global`` is the max of the regional fill distances;
    ``separation_global`` the min of the regional separation distances over
    regions holding at least two nodes.
    """

    fill_per_region: tuple
    separation_per_region: tuple
    fill_global: float
    separation_global: float


def regional_distances(
    nodes: NodeSet, domain: DomainBox, scaling: PiecewiseConstantScaling
) -> RegionalDistances:
    """Fill / separation distances restricted to each partition region.

    Region membership uses the same partition predicates as the scaling
    function, so the regional metrics and the jump-encoding psi always agree
    on which side of a boundary a node lies.  A region without nodes gets an
    infinite fill distance (with a warning) and is excluded from the global
    separation distance, as is any region with fewer than two nodes.
    """
    partition = scaling.partition
    m = partition.n_regions
    node_regions = partition.region_of(nodes.points)
    grid = domain.grid()
    grid_regions = partition.region_of(grid)

    fill = []
    sep = []
    for k in range(m):
        pts = nodes.points[node_regions == k]
        cell = grid[grid_regions == k]
        if pts.shape[0] == 0:
            warnings.warn(
                f"region {k} contains no nodes; regional fill distance is infinite",
                stacklevel=2,
            )
            fill.append(np.inf)
        elif cell.shape[0] == 0:
            fill.append(0.0)
        else:
            dist, _ = cKDTree(pts).query(cell, k=1)
            fill.append(float(np.max(dist)))
        if pts.shape[0] >= 2:
            sep.append(0.5 * float(np.min(pdist(pts))))
        else:
            sep.append(np.nan)

    finite_sep = [s for s in sep if not np.isnan(s)]
    return RegionalDistances(
        fill_per_region=tuple(fill),
        separation_per_region=tuple(sep),
        fill_global=float(np.max(fill)),
        separation_global=float(np.min(finite_sep)) if finite_sep else np.nan,
    )


def rmse(reference, predicted) -> float:
    """Root mean square deviation between two equally long vectors."""
    reference = np.asarray(reference, dtype=float).ravel()
    predicted = np.asarray(predicted, dtype=float).ravel()
    if reference.shape != predicted.shape:
        raise ValueError(
            f"length mismatch: {reference.shape} vs {predicted.shape}"
        )
    if reference.size == 0:
        raise ValueError("rmse of empty vectors is undefined")
    return float(np.sqrt(np.mean((reference - predicted) ** 2)))
