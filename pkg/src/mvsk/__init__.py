"""Variably scaled and mapped kernel interpolation.

Scattered-data interpolation with radial kernels evaluated on augmented
points ``(S(x), psi(x))``: an injective node map S redistributes the nodes
while a scaling function psi adds a coordinate that can encode jumps of the
target.  Includes node-quality metrics, shape-parameter selection by
leave-one-out cross validation, a benchmark harness on a discontinuous
target, and a synthetic hard X-ray visibility imaging pipeline (kernel
gridding of visibilities followed by projected Landweber inversion).
"""

from .kernels import (
    GAUSSIAN,
    MATERN_C6,
    PROFILES,
    WENDLAND_C0,
    RadialKernel,
    eval_kernel,
    eval_profile,
)
from .scalings import (
    AugmentedMap,
    AxisThresholdPartition,
    CallbackMap,
    CallbackPartition,
    CallbackScaling,
    ConstantScaling,
    ErfUniformizeMap,
    IdentityMap,
    InjectivityError,
    LogPolarMap,
    NodeMap,
    PiecewiseConstantScaling,
    SampledScaling,
    ScalingFunction,
    SGibbsMap,
    apply_map,
    apply_scaling,
    augment,
    mvsk_eval,
)
from .interpolation import (
    IllConditionedError,
    Interpolant,
    NodeSet,
    NumericalBreakdownError,
    assemble_gram,
    evaluate,
    fit,
    power_function,
)
from .metrics import (
    DomainBox,
    RegionalDistances,
    fill_distance,
    regional_distances,
    rmse,
    separation_distance,
    unit_square,
)
from .model_selection import (
    LoocvConfig,
    SelectionError,
    SelectionResult,
    default_epsilon_grid,
    loo_errors,
    select_epsilon,
)
from .harness import (
    ExperimentConfig,
    erf_map,
    experiment_grid,
    jump_partition,
    jump_scaling,
    near_jump_error,
    run_experiment,
    sample_gaussian_nodes,
    target_f,
    variant_map,
)
from .imaging import (
    GaussianSource,
    GridSpec,
    ImageGrid,
    LandweberConfig,
    PipelineConfig,
    StepSizeError,
    SurfaceGrid,
    UvGeometry,
    VisibilitySet,
    angle_preservation_check,
    back_projection,
    build_psi_from_backprojection,
    chi_square,
    default_grid_spec,
    default_stix_geometry,
    forward_model,
    fourier_adjoint,
    gaussian_scene,
    interpolate_visibility_surface,
    projected_landweber,
    reconstruct_pipeline,
    stix_log_polar_map,
    symmetrize_surface,
)
from .io_config import ConfigError, RunConfig, parse_config, write_results

__version__ = "0.1.0"
