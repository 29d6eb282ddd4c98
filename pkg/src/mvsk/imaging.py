"""Synthetic hard X-ray visibility imaging at desk scale.

A Fourier imaging instrument samples the transform of the sky flux at a
sparse set of (u, v) frequency points ("visibilities").  The pipeline here
reconstructs an image in two steps:

1. interpolate the scattered visibilities onto a uniform frequency grid using
   a (mapped, variably scaled) kernel, where the scaling function comes from
   a crude back-projection image and the node map is a log-polar rescaling
   that declusters the concentric sampling circles;
2. invert the gridded surface with the projected Landweber iteration
   (gradient descent on the discretized Fourier system with a positivity
   projection after every step).

Everything is dense and synthetic: grids are 64x64 by default and the
sampling geometry is a configurable stand-in with the published radial range
of the STIX subcollimators.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .interpolation import NodeSet, fit
from .kernels import MATERN_C6, RadialKernel
from .model_selection import LoocvConfig, select_epsilon
from .scalings import (
    AugmentedMap,
    ConstantScaling,
    IdentityMap,
    LogPolarMap,
    SampledScaling,
)

STIX_MIN_RADIUS = 2.79e-3  # arcsec^-1
STIX_MAX_RADIUS = 7.02e-2  # arcsec^-1
STIX_L1 = 550.0
STIX_L2 = 47.0

PIPELINE_VARIANTS = ("classical", "vsk", "mvsk")


class StepSizeError(RuntimeError):
    """Landweber residual diverged; the relaxation parameter is too large."""


# ---------------------------------------------------------------------------
# geometry and data containers
# ---------------------------------------------------------------------------


class UvGeometry:
    """Sampled (u, v) frequency points, symmetric under reflection.

    Every point must have its reflection through the origin in the set; the
    constructor verifies this and records the pairing.
    """

    def __init__(self, points, metadata: Optional[dict] = None):
        points = np.asarray(points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] == 0:
            raise ValueError("points must be a non-empty (N, 2) array")
        self.points = points
        self.metadata = dict(metadata or {})
        self.reflection_pairs = self._pair_reflections()

    def _pair_reflections(self):
        scale = float(np.max(np.abs(self.points)))
        tol = 1e-12 * max(scale, 1.0)
        pairs = np.full(self.n, -1, dtype=int)
        for i, p in enumerate(self.points):
            if pairs[i] >= 0:
                continue
            diff = np.linalg.norm(self.points + p, axis=1)
            j = int(np.argmin(diff))
            if diff[j] > tol:
                raise ValueError(
                    f"point {i} at {tuple(p)} has no reflection through the origin"
                )
            pairs[i], pairs[j] = j, i
        return pairs

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def radii(self) -> np.ndarray:
        return np.linalg.norm(self.points, axis=1)

    @classmethod
    def from_upper_half(cls, upper_points, metadata: Optional[dict] = None):
        """Build a symmetric geometry from points with v > 0 (or v = 0, u > 0)."""
        upper = np.asarray(upper_points, dtype=float)
        return cls(np.vstack([upper, -upper]), metadata)


def default_stix_geometry() -> UvGeometry:
    """Synthetic STIX-like sampling: 60 points on 10 circles.

    Radii are geometrically spaced over the published range
    [2.79e-3, 7.02e-2] arcsec^-1; each circle carries three upper-half-plane
    points at 10, 70 and 130 degrees plus their reflections.  The true
    subcollimator orientations require instrument tables; any fixed
    non-degenerate choice exercises the same mathematics, and custom
    geometries can be loaded from CSV.
    """
    radii = STIX_MIN_RADIUS * (STIX_MAX_RADIUS / STIX_MIN_RADIUS) ** (
        np.arange(10) / 9.0
    )
    angles = np.deg2rad([10.0, 70.0, 130.0])
    upper = np.array(
        [
            (r * math.cos(a), r * math.sin(a))
            for r in radii
            for a in angles
        ]
    )
    return UvGeometry.from_upper_half(
        upper,
        metadata={
            "circle_radii": radii.tolist(),
            "points_per_circle": 6,
            "L1": STIX_L1,
            "L2": STIX_L2,
        },
    )


class VisibilitySet:
    """Complex visibility values attached to a sampling geometry."""

    def __init__(self, geometry: UvGeometry, values, noise_sigma=None):
        values = np.asarray(values, dtype=complex)
        if values.shape != (geometry.n,):
            raise ValueError(
                f"expected {geometry.n} visibility values, got {values.shape}"
            )
        self.geometry = geometry
        self.values = values
        if noise_sigma is not None:
            noise_sigma = np.asarray(noise_sigma, dtype=float)
            if noise_sigma.shape != (geometry.n,):
                raise ValueError("noise_sigma must match the number of points")
            if np.any(noise_sigma <= 0):
                raise ValueError("noise_sigma entries must be positive")
        self.noise_sigma = noise_sigma

    @property
    def n(self) -> int:
        return self.geometry.n

    def conjugate_symmetry_residual(self) -> float:
        """Max |V(-u,-v) - conj(V(u,v))|, scaled by the peak magnitude."""
        pairs = self.geometry.reflection_pairs
        mismatch = np.abs(self.values[pairs] - np.conj(self.values))
        scale = float(np.max(np.abs(self.values)))
        return float(np.max(mismatch)) / scale if scale > 0 else 0.0


@dataclass(frozen=True)
class GridSpec:
    """Square image raster: n_pixels per side, physical pixel size, center."""

    n_pixels: int
    pixel_size: float
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.n_pixels < 2:
            raise ValueError("n_pixels must be at least 2")
        if not self.pixel_size > 0:
            raise ValueError("pixel_size must be positive")

    def axes(self):
        """Pixel-center coordinates along each axis (fftshift convention)."""
        idx = np.arange(self.n_pixels) - self.n_pixels // 2
        x = self.center[0] + idx * self.pixel_size
        y = self.center[1] + idx * self.pixel_size
        return x, y

    @property
    def pixel_area(self) -> float:
        return self.pixel_size**2


def nyquist_pixel_size(geometry: UvGeometry) -> float:
    """Pixel size 1/(2 * u_max) pairing the image raster with the sampled band."""
    return 1.0 / (2.0 * float(np.max(geometry.radii)))


def default_grid_spec(geometry: UvGeometry, n_pixels: int = 64) -> GridSpec:
    return GridSpec(n_pixels=n_pixels, pixel_size=nyquist_pixel_size(geometry))


@dataclass(frozen=True)
class ImageGrid:
    """M x M real flux image on a GridSpec raster."""

    flux: np.ndarray
    spec: GridSpec

    def __post_init__(self):
        flux = np.asarray(self.flux, dtype=float)
        m = self.spec.n_pixels
        if flux.shape != (m, m):
            raise ValueError(f"flux must be ({m}, {m}), got {flux.shape}")
        object.__setattr__(self, "flux", flux)

    @property
    def total_flux(self) -> float:
        return float(np.sum(self.flux))


# ---------------------------------------------------------------------------
# Fourier forward model and back-projection
# ---------------------------------------------------------------------------


def _phase_matrix(freqs, coords):
    """exp(-2*pi*i * outer(freqs, coords))."""
    return np.exp(-2j * np.pi * np.outer(freqs, coords))


def forward_model(image: ImageGrid, geometry: UvGeometry) -> VisibilitySet:
    """Sample the discretized Fourier transform of the image at the geometry.

    ``V_i = sum_pixels flux(x, y) * exp(-2*pi*i*(u_i x + v_i y)) * pixel_area``
    """
    x, y = image.spec.axes()
    u = geometry.points[:, 0]
    v = geometry.points[:, 1]
    phase = _phase_matrix(u, x)[:, :, None] * _phase_matrix(v, y)[:, None, :]
    values = np.tensordot(phase, image.flux, axes=([1, 2], [0, 1]))
    return VisibilitySet(geometry, values * image.spec.pixel_area)


def fourier_adjoint(vis: VisibilitySet, spec: GridSpec) -> np.ndarray:
    """True adjoint of ``forward_model``: complex (M, M) array.

    ``(F* V)(x, y) = sum_i V_i * exp(+2*pi*i*(u_i x + v_i y)) * pixel_area``
    """
    x, y = spec.axes()
    u = vis.geometry.points[:, 0]
    v = vis.geometry.points[:, 1]
    ph_x = np.conj(_phase_matrix(u, x))  # exp(+2 pi i u x), (N, M)
    ph_y = np.conj(_phase_matrix(v, y))
    out = np.einsum("i,ip,iq->pq", vis.values, ph_x, ph_y)
    return out * spec.pixel_area


def back_projection(vis: VisibilitySet, spec: GridSpec) -> ImageGrid:
    """Crude first image: real part of the unweighted inverse-transform sum.

    ``B(x, y) = Re sum_i V_i * exp(+2*pi*i*(u_i x + v_i y))`` -- the adjoint
    up to the pixel-area factor, returned without positivity clipping (its
    sidelobes go negative).
    """
    adj = fourier_adjoint(vis, spec)
    return ImageGrid(np.real(adj) / spec.pixel_area, spec)


# ---------------------------------------------------------------------------
# scaling function and node map for the frequency plane
# ---------------------------------------------------------------------------


def _symmetric_axis(half_extent: float, n: int) -> np.ndarray:
    """Odd-length axis symmetric under negation, built as exact multiples."""
    if n % 2 == 0:
        n += 1
    half = n // 2
    step = half_extent / half
    return (np.arange(n) - half) * step


def build_psi_from_backprojection(
    vis: VisibilitySet,
    spec: Optional[GridSpec] = None,
    mode: str = "magnitude",
    psi_grid_n: int = 65,
    scale: float = 1.0,
) -> SampledScaling:
    """Scaling function for the frequency plane from a back-projected image.

    The back-projection is clipped to nonnegative values, transformed back to
    a uniform (u, v) grid covering the sampled disk, reduced to a real value
    per grid point (``mode="magnitude"`` or ``"real"``), normalized to
    [0, ``scale``] (default [0, 1]), and wrapped as a bilinear lookup table.
    The grid and its values are symmetrized so psi is exactly even, matching
    the conjugate symmetry of the data.

    The extra coordinate competes with the frequency coordinates inside the
    kernel's distance, so for interpolation use ``scale`` should sit at a
    fraction of the sampled band radius (the pipeline default); a psi spread
    much wider than the (u, v) extent destroys spatial locality.
    """
    if mode not in ("magnitude", "real"):
        raise ValueError(f"psi mode must be 'magnitude' or 'real', got {mode!r}")
    if spec is None:
        spec = default_grid_spec(vis.geometry)
    bp = back_projection(vis, spec)
    clipped = np.clip(bp.flux, 0.0, None)

    r_cov = float(np.max(vis.geometry.radii))
    axis = _symmetric_axis(r_cov, psi_grid_n)
    x, y = spec.axes()
    ph_u = _phase_matrix(axis, x)
    ph_v = _phase_matrix(axis, y)
    transform = ph_u @ clipped @ ph_v.T * spec.pixel_area

    values = np.abs(transform) if mode == "magnitude" else np.real(transform)
    values = 0.5 * (values + values[::-1, ::-1])  # exact evenness
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        warnings.warn(
            "back-projection is identically zero; psi is constant and the "
            "variably scaled kernel degrades to the mapped kernel",
            stacklevel=2,
        )
        values = np.zeros_like(values)
    elif mode == "magnitude":
        values = values / hi * scale
    else:
        values = (values - lo) / (hi - lo) * scale
    return SampledScaling(axis, axis, values)


def stix_log_polar_map(geometry: UvGeometry) -> LogPolarMap:
    """Log-polar map tuned to the geometry's radial range.

    Radius r maps to ``C * (1 + log(r / r_min))``, which is positive on the
    data (the innermost circle lands at C, not at the origin) and monotone,
    and the normalizer C is chosen so the outermost circle keeps its radius.
    The concentric sampling circles become a circular crown with a much
    smaller spread of radii.
    """
    radii = geometry.radii
    r_min = float(np.min(radii))
    r_max = float(np.max(radii))
    if r_min <= 0:
        raise ValueError("log-polar map needs strictly positive radii")
    span = 1.0 + math.log(r_max / r_min) if r_max > r_min else 1.0
    normalizer = r_max / span
    return LogPolarMap(normalizer=normalizer, r_ref=r_min / math.e)


@dataclass(frozen=True)
class AngleCheck:
    max_angle_deviation: float
    original_radius_ratio: float
    mapped_radius_ratio: float

    @property
    def declustered(self) -> bool:
        return self.mapped_radius_ratio < self.original_radius_ratio


def angle_preservation_check(log_polar: LogPolarMap, points) -> AngleCheck:
    """Verify the log-polar map keeps directions and compresses radii.

    Angles are compared with the two-argument arctangent; a deviation of zero
    means every point kept its direction (mapped radii must be positive for
    this, which holds when r_ref sits below the smallest point radius).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    mapped = log_polar(points)
    ang0 = np.arctan2(points[:, 1], points[:, 0])
    ang1 = np.arctan2(mapped[:, 1], mapped[:, 0])
    dev = np.abs(np.angle(np.exp(1j * (ang1 - ang0))))
    r0 = np.linalg.norm(points, axis=1)
    r1 = np.linalg.norm(mapped, axis=1)
    return AngleCheck(
        max_angle_deviation=float(np.max(dev)),
        original_radius_ratio=float(np.max(r0) / np.min(r0)),
        mapped_radius_ratio=float(np.max(r1) / np.min(r1)),
    )


# ---------------------------------------------------------------------------
# visibility surface on a uniform frequency grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurfaceGrid:
    """Uniform M x M frequency grid in fftshift order (includes the origin)."""

    n_points: int
    spacing: float

    def __post_init__(self):
        if self.n_points < 2 or self.n_points % 2 != 0:
            raise ValueError("surface grid side must be an even integer >= 2")
        if not self.spacing > 0:
            raise ValueError("grid spacing must be positive")

    @classmethod
    def for_geometry(cls, geometry: UvGeometry, n_points: int = 64) -> "SurfaceGrid":
        r_max = float(np.max(geometry.radii))
        return cls(n_points=n_points, spacing=2.0 * r_max / n_points)

    @property
    def freqs(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_points // 2) * self.spacing

    def points(self) -> np.ndarray:
        f = self.freqs
        uu, vv = np.meshgrid(f, f, indexing="ij")
        return np.stack([uu.ravel(), vv.ravel()], axis=-1)

    def radius_grid(self) -> np.ndarray:
        f = self.freqs
        return np.hypot(f[:, None], f[None, :])

    def support_mask(self, r_max: float) -> np.ndarray:
        """True where the surface is interpolated (not extrapolated).

        Points beyond ``r_max`` are outside the sampled band; the first row
        and column (frequencies without a reflected partner on an even grid)
        are excluded so the mask is exactly symmetric under negation.
        """
        mask = self.radius_grid() <= r_max * (1.0 + 1e-12)
        mask[0, :] = False
        mask[:, 0] = False
        mask[self.n_points // 2, self.n_points // 2] = False  # origin: special rule
        return mask

    def conjugate_mirror(self, surface: np.ndarray) -> np.ndarray:
        """conj(V) sampled at the negated grid points (paired region only)."""
        out = np.zeros_like(surface)
        out[1:, 1:] = np.conj(surface[1:, 1:][::-1, ::-1])
        return out


def interpolate_visibility_surface(
    vis: VisibilitySet,
    kernel: RadialKernel,
    amap: AugmentedMap,
    grid: SurfaceGrid,
) -> np.ndarray:
    """Interpolate scattered visibilities onto the uniform frequency grid.

    Real and imaginary parts are interpolated independently with the same
    kernel and augmented map.  Outside the outermost sampled radius the
    surface is set to zero (band-limit assumption; no extrapolation), and the
    origin -- a singularity of the log-polar map -- receives the mean of the
    innermost-circle visibilities.
    """
    nodes = NodeSet(vis.geometry.points)
    data = np.stack([np.real(vis.values), np.imag(vis.values)], axis=-1)
    interp = fit(kernel, amap, nodes, data)

    m = grid.n_points
    surface = np.zeros((m, m), dtype=complex)
    r_max = float(np.max(vis.geometry.radii))
    mask = grid.support_mask(r_max)
    pts = grid.points().reshape(m, m, 2)
    queried = interp(pts[mask])
    surface[mask] = queried[:, 0] + 1j * queried[:, 1]

    radii = vis.geometry.radii
    inner = radii <= np.min(radii) * (1.0 + 1e-9)
    surface[m // 2, m // 2] = np.mean(vis.values[inner])
    return surface


def symmetrize_surface(surface: np.ndarray, grid: SurfaceGrid) -> np.ndarray:
    """Average the surface with its conjugate mirror, enforcing the symmetry
    a real image imposes exactly."""
    mirrored = grid.conjugate_mirror(surface)
    out = surface.copy()
    out[1:, 1:] = 0.5 * (surface[1:, 1:] + mirrored[1:, 1:])
    return out


# ---------------------------------------------------------------------------
# projected Landweber inversion
# ---------------------------------------------------------------------------


class _GridFourierOperator:
    """Separable dense Fourier transform between an image raster and a
    uniform frequency grid."""

    def __init__(self, grid: SurfaceGrid, spec: GridSpec):
        x, y = spec.axes()
        f = grid.freqs
        self._eu = _phase_matrix(f, x)
        self._ev = _phase_matrix(f, y)
        self._area = spec.pixel_area
        self.grid = grid
        self.spec = spec

    def forward(self, flux: np.ndarray) -> np.ndarray:
        return self._eu @ flux @ self._ev.T * self._area

    def adjoint(self, surface: np.ndarray) -> np.ndarray:
        return self._eu.conj().T @ surface @ self._ev.conj() * self._area

    def top_singular_value(self, iters: int = 200, tol: float = 1e-12) -> float:
        v = np.ones((self.spec.n_pixels, self.spec.n_pixels), dtype=complex)
        v /= np.linalg.norm(v)
        sigma_sq = 0.0
        for _ in range(iters):
            w = self.adjoint(self.forward(v))
            new = float(np.linalg.norm(w))
            if new == 0.0:
                return 0.0
            v = w / new
            if abs(new - sigma_sq) <= tol * new:
                sigma_sq = new
                break
            sigma_sq = new
        return math.sqrt(sigma_sq)


class _DivergenceMonitor:
    """Raises StepSizeError after ``limit`` consecutive meaningful residual
    increases (above rounding noise and the floating-point floor)."""

    def __init__(self, initial_residual: float, tau: float, limit: int = 5):
        self._floor = 1e-13 * initial_residual
        self._tau = tau
        self._limit = limit
        self._streak = 0

    def observe(self, previous: float, current: float):
        meaningful = current > previous * (1.0 + 1e-9) and current > self._floor
        if meaningful:
            self._streak += 1
            if self._streak >= self._limit:
                raise StepSizeError(
                    f"residual increased for {self._streak} consecutive "
                    f"iterations; reduce the relaxation (tau={self._tau:.3e})"
                )
        else:
            self._streak = 0


@dataclass(frozen=True)
class LandweberConfig:
    max_iters: int = 500
    tol: float = 1e-9
    tau_safety: float = 0.9
    tau: Optional[float] = None  # explicit relaxation overrides the estimate


@dataclass(frozen=True)
class LandweberResult:
    image: ImageGrid
    residuals: tuple
    tau: float
    sigma_max: float
    iterations: int
    converged: bool


def projected_landweber(
    surface: np.ndarray,
    grid: SurfaceGrid,
    spec: Optional[GridSpec] = None,
    config: LandweberConfig = LandweberConfig(),
) -> LandweberResult:
    """Invert a gridded visibility surface into a nonnegative image.

    Iterates ``f <- max(f + tau * Re F*(V - F f), 0)`` from ``f = 0`` with
    ``tau = tau_safety / sigma_max(F)^2`` (power-iteration estimate), which
    guarantees a non-increasing data residual.  Stops when the relative
    residual change drops below ``tol`` or after ``max_iters``; five
    consecutive residual increases raise ``StepSizeError``.
    """
    surface = np.asarray(surface, dtype=complex)
    m = grid.n_points
    if surface.shape != (m, m):
        raise ValueError(f"surface must be ({m}, {m}), got {surface.shape}")
    if spec is None:
        spec = GridSpec(n_pixels=m, pixel_size=1.0 / (m * grid.spacing))
    op = _GridFourierOperator(grid, spec)

    adj = op.adjoint(surface)
    adj_norm = float(np.linalg.norm(adj))
    if adj_norm > 0:
        imag_residue = float(np.linalg.norm(np.imag(adj))) / adj_norm
        if imag_residue > 1e-6:
            raise ValueError(
                f"adjoint of the surface has imaginary residue {imag_residue:.3e}; "
                "the surface is not conjugate-symmetric enough to represent a "
                "real image"
            )

    sigma = op.top_singular_value()
    if sigma == 0.0:
        raise ValueError("forward operator is identically zero")
    tau = config.tau if config.tau is not None else config.tau_safety / sigma**2

    flux = np.zeros((spec.n_pixels, spec.n_pixels))
    residuals = []
    prev = None
    monitor = None
    converged = False
    iterations = 0
    for _ in range(config.max_iters):
        misfit = surface - op.forward(flux)
        res = float(np.linalg.norm(misfit))
        residuals.append(res)
        if monitor is None:
            monitor = _DivergenceMonitor(res, tau)
        flux = np.clip(flux + tau * np.real(op.adjoint(misfit)), 0.0, None)
        iterations += 1
        if prev is not None:
            monitor.observe(prev, res)
            if abs(prev - res) <= config.tol * max(residuals[0], 1e-300):
                converged = True
                break
        elif res == 0.0:
            converged = True
            break
        prev = res
    residuals.append(float(np.linalg.norm(surface - op.forward(flux))))
    return LandweberResult(
        image=ImageGrid(flux, spec),
        residuals=tuple(residuals),
        tau=tau,
        sigma_max=sigma,
        iterations=iterations,
        converged=converged,
    )


# ---------------------------------------------------------------------------
# goodness of fit and synthetic scenes
# ---------------------------------------------------------------------------


def chi_square(vis_observed: VisibilitySet, image: ImageGrid) -> float:
    """Normalized squared visibility misfit of a reconstructed image.

    ``(1/2N) * sum_i (Re dV_i^2 + Im dV_i^2) / sigma_i^2`` with ``dV`` the
    observed-minus-predicted visibilities and unit sigma when none is given.
    """
    predicted = forward_model(image, vis_observed.geometry)
    delta = vis_observed.values - predicted.values
    if vis_observed.noise_sigma is not None:
        sigma = vis_observed.noise_sigma
        if np.any(sigma == 0):
            raise ValueError("noise sigma must be nonzero")
    else:
        sigma = np.ones(vis_observed.n)
    terms = (np.real(delta) ** 2 + np.imag(delta) ** 2) / sigma**2
    return float(np.sum(terms) / (2.0 * vis_observed.n))


@dataclass(frozen=True)
class GaussianSource:
    """Circular Gaussian component: total flux, center, full width half max."""

    flux: float
    x: float
    y: float
    fwhm: float

    def __post_init__(self):
        if not self.fwhm > 0:
            raise ValueError("fwhm must be positive")


def gaussian_scene(sources: Sequence[GaussianSource], spec: GridSpec) -> ImageGrid:
    """Rasterize a list of Gaussian sources onto an image grid."""
    x, y = spec.axes()
    xx, yy = np.meshgrid(x, y, indexing="ij")
    flux = np.zeros_like(xx)
    for src in sources:
        sigma = src.fwhm / (2.0 * math.sqrt(2.0 * math.log(2.0)))
        dist_sq = (xx - src.x) ** 2 + (yy - src.y) ** 2
        density = np.exp(-dist_sq / (2.0 * sigma**2)) / (2.0 * math.pi * sigma**2)
        flux = flux + src.flux * density * spec.pixel_area
    return ImageGrid(flux, spec)


# ---------------------------------------------------------------------------
# end-to-end pipeline
# ---------------------------------------------------------------------------


def imaging_epsilon_grid(count: int = 60, lo: float = 1.0, hi: float = 1e4):
    """Log-spaced shape-parameter grid matched to the (u, v) coordinate scale.

    Frequency coordinates are O(1e-2), so useful epsilon values sit orders of
    magnitude above the unit-box defaults.
    """
    return tuple(np.geomspace(lo, hi, count))


@dataclass(frozen=True)
class PipelineConfig:
    kernel_profile: str = MATERN_C6
    epsilon_grid: tuple = field(default_factory=imaging_epsilon_grid)
    surface_n: int = 64
    image_n: int = 64
    psi_mode: str = "magnitude"
    psi_grid_n: int = 65
    # psi amplitude as a fraction of the max sampled radius; keeps the extra
    # coordinate commensurate with the frequency coordinates
    psi_scale_fraction: float = 0.25
    landweber: LandweberConfig = field(default_factory=LandweberConfig)


@dataclass(frozen=True)
class PipelineResult:
    variant: str
    epsilon: float
    surface: np.ndarray
    image: ImageGrid
    residuals: tuple
    chi_square: float
    predicted: VisibilitySet


def pipeline_map(
    vis: VisibilitySet, variant: str, config: PipelineConfig = PipelineConfig()
) -> AugmentedMap:
    """Augmented map used by a pipeline variant.

    classical: identity map, constant scaling (plain kernel);
    vsk: identity map, back-projection scaling;
    mvsk: log-polar map, back-projection scaling.
    """
    if variant not in PIPELINE_VARIANTS:
        raise ValueError(
            f"unknown variant {variant!r}; expected one of {PIPELINE_VARIANTS}"
        )
    if variant == "classical":
        return AugmentedMap(IdentityMap(), ConstantScaling(0.0))
    spec = default_grid_spec(vis.geometry, config.image_n)
    psi = build_psi_from_backprojection(
        vis,
        spec,
        mode=config.psi_mode,
        psi_grid_n=config.psi_grid_n,
        scale=config.psi_scale_fraction * float(np.max(vis.geometry.radii)),
    )
    if variant == "vsk":
        return AugmentedMap(IdentityMap(), psi)
    return AugmentedMap(stix_log_polar_map(vis.geometry), psi)


def reconstruct_pipeline(
    vis: VisibilitySet,
    variant: str = "mvsk",
    config: PipelineConfig = PipelineConfig(),
) -> PipelineResult:
    """Full reconstruction: interpolate, symmetrize, invert, score.

    The shape parameter is selected by LOOCV on the paired real/imaginary
    data with a shared epsilon; the interpolated surface is symmetrized (a
    real image has an exactly conjugate-symmetric transform) before the
    projected Landweber inversion.
    """
    amap = pipeline_map(vis, variant, config)
    grid = SurfaceGrid.for_geometry(vis.geometry, config.surface_n)
    nodes = NodeSet(vis.geometry.points)
    data = np.stack([np.real(vis.values), np.imag(vis.values)], axis=-1)
    selection = select_epsilon(
        LoocvConfig(config.epsilon_grid), config.kernel_profile, amap, nodes, data
    )
    kernel = RadialKernel(config.kernel_profile, selection.best_epsilon)
    surface = interpolate_visibility_surface(vis, kernel, amap, grid)
    surface = symmetrize_surface(surface, grid)
    spec = default_grid_spec(vis.geometry, config.image_n)
    result = projected_landweber(surface, grid, spec, config.landweber)
    predicted = forward_model(result.image, vis.geometry)
    return PipelineResult(
        variant=variant,
        epsilon=selection.best_epsilon,
        surface=surface,
        image=result.image,
        residuals=result.residuals,
        chi_square=chi_square(vis, result.image),
        predicted=predicted,
    )
