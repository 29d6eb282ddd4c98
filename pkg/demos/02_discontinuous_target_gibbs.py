"""
Interpolating a discontinuous function
======================================

A piecewise target with two jump lines, sampled at nodes clustered around the
origin. Plain kernel interpolation rings at the jumps (the Gibbs phenomenon);
augmenting the points with a piecewise-constant scaling function psi that
jumps where the target jumps suppresses the ringing, and composing with a
node-spreading map on top improves the node distribution.

The three variants:
    classical  R(x) = sum c_i phi(||x - x_i||)
    vsdk       points augmented to (x, psi(x))
    mvsdk      points augmented to (S(x), psi(x)), S the erf uniformizer
"""

import numpy as np

from mvsk import (
    RadialKernel,
    fit,
    near_jump_error,
    rmse,
    sample_gaussian_nodes,
    target_f,
    variant_map,
)
from mvsk.harness import experiment_grid
from mvsk.model_selection import LoocvConfig, select_epsilon

# clustered nodes, exact samples of the discontinuous target
nodes = sample_gaussian_nodes(300, seed=7)
values = target_f(nodes.points)
print(f"{nodes.n} nodes survived the [-1,1]^2 cut")

grid = experiment_grid(60)
reference = target_f(grid)

print(f"\n{'variant':10s} {'epsilon':>8s} {'rmse':>10s} {'near-jump':>10s}")
for variant in ("classical", "vsdk", "mvsdk"):
    amap = variant_map(variant)
    # shape parameter by leave-one-out cross validation on a short grid
    cfg = LoocvConfig(epsilon_grid=tuple(np.linspace(0.5, 20, 40)))
    selection = select_epsilon(cfg, "matern6", amap, nodes, values)
    interp = fit(RadialKernel("matern6", selection.best_epsilon), amap, nodes, values)
    predicted = interp(grid)
    print(
        f"{variant:10s} {selection.best_epsilon:8.3f} "
        f"{rmse(reference, predicted):10.5f} "
        f"{near_jump_error(grid, reference, predicted):10.5f}"
    )

print(
    "\nThe scaled variants cut the near-jump error several-fold (vsdk by more"
    "\nthan 10x here): the augmented coordinate separates points on opposite"
    "\nsides of a jump, so the kernel never smooths across it."
)
