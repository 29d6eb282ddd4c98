"""
Visibility imaging pipeline
===========================

A Fourier imaging instrument samples the transform of the sky flux at 60
points on 10 concentric circles of the frequency plane. Reconstruction runs
in two steps:

1. grid the scattered visibilities onto a uniform 64x64 frequency grid by
   kernel interpolation -- classical, variably scaled (psi from a crude
   back-projection image), or mapped variably scaled (log-polar map that
   declusters the circles, plus psi);
2. invert the gridded surface with the projected Landweber iteration, which
   enforces pixel positivity at every step.

The synthetic scene is two Gaussian sources near map center with noiseless
visibilities from the discrete forward model.
"""

import numpy as np

from mvsk import (
    GaussianSource,
    angle_preservation_check,
    back_projection,
    chi_square,
    default_grid_spec,
    default_stix_geometry,
    forward_model,
    gaussian_scene,
    reconstruct_pipeline,
    stix_log_polar_map,
)

geometry = default_stix_geometry()
print(f"sampling geometry: {geometry.n} points, radii "
      f"{geometry.radii.min():.3e} .. {geometry.radii.max():.3e} arcsec^-1")

# the log-polar map turns the concentric circles into a circular crown:
# directions are kept, radii are compressed from a 25:1 spread to ~4:1
check = angle_preservation_check(stix_log_polar_map(geometry), geometry.points)
print(f"log-polar map: radius ratio {check.original_radius_ratio:.1f} -> "
      f"{check.mapped_radius_ratio:.1f}, max angle deviation "
      f"{check.max_angle_deviation:.1e}")

# synthetic truth and its noiseless visibilities
spec = default_grid_spec(geometry, 64)
print(f"\nimage raster: 64x64, pixel {spec.pixel_size:.2f} arcsec, "
      f"field of view {64 * spec.pixel_size:.0f} arcsec")
truth = gaussian_scene(
    [GaussianSource(1.0, -6.0, -4.0, 10.0), GaussianSource(0.7, 6.0, 4.5, 18.0)],
    spec,
)
vis = forward_model(truth, geometry)

# the crude back-projection already hints at the sources (and feeds psi)
bp = back_projection(vis, spec)
peak = np.unravel_index(np.argmax(bp.flux), bp.flux.shape)
x, y = spec.axes()
print(f"back-projection peak at ({x[peak[0]]:.0f}, {y[peak[1]]:.0f}) arcsec")

print(f"\n{'variant':10s} {'epsilon':>9s} {'chi^2':>9s} {'rel L2':>8s} {'iters':>6s}")
for variant in ("classical", "vsk", "mvsk"):
    result = reconstruct_pipeline(vis, variant)
    rel = np.linalg.norm(result.image.flux - truth.flux) / np.linalg.norm(truth.flux)
    print(
        f"{variant:10s} {result.epsilon:9.2f} {result.chi_square:9.3f} "
        f"{rel:8.3f} {len(result.residuals) - 1:6d}"
    )
    assert np.all(result.image.flux >= 0)  # positivity projection

print(
    "\nchi^2 compares observed visibilities with those of the reconstruction;"
    "\nthe mapped variably scaled variant fits them best, echoing the real-"
    "\ndata behaviour of the interpolation/inversion approach."
)
print("\nsanity: chi^2 of the true image itself:", chi_square(vis, truth))
