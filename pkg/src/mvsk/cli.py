"""Command-line entry point.

Subcommands mirror the library's workflows: ``interp`` fits and evaluates a
kernel interpolant from a node CSV, ``metrics`` reports node-quality
diagnostics, ``bench-discontinuous`` reproduces the discontinuous-target
benchmark, and ``image-reconstruct`` runs the visibility imaging pipeline.
Exit codes: 0 success, 1 usage/configuration error, 2 runtime or numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness, imaging, io_config
from .interpolation import IllConditionedError, fit
from .io_config import ConfigError, RunConfig, parse_config
from .kernels import RadialKernel
from .metrics import DomainBox, fill_distance, regional_distances, separation_distance
from .model_selection import LoocvConfig, SelectionError, select_epsilon
from .scalings import InjectivityError


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; this tool reserves 2 for runtime
    # failures and uses 1 for anything wrong with the invocation
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="mvsk", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("interp", parents=[], help="fit a kernel interpolant")
    p.add_argument("--nodes", help="node CSV (coordinates then value)")
    p.add_argument("--queries", help="optional query-point CSV")
    p.add_argument("--kernel", choices=("wendland0", "matern6", "gaussian"))
    p.add_argument("--epsilon", type=float)
    p.add_argument("--loocv", action="store_true", default=None,
                   help="select epsilon by leave-one-out cross validation")
    p.add_argument("--ridge", type=float)
    p.add_argument("--config", help="TOML/JSON config (map/scaling specs etc.)")
    p.add_argument("--out", help="output directory")

    p = sub.add_parser("metrics", help="fill/separation distance report")
    p.add_argument("--nodes", required=True)
    p.add_argument("--resolution", type=int)
    p.add_argument("--config", help="TOML/JSON config (domain, partition)")
    p.add_argument("--out", help="output JSON path (default: stdout)")

    p = sub.add_parser("bench-discontinuous",
                       help="discontinuous-target benchmark over N")
    p.add_argument("--config", help="TOML/JSON experiment config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("image-reconstruct",
                       help="visibility interpolation + projected Landweber")
    p.add_argument("--geometry", help="'default' or a (u,v) CSV")
    p.add_argument("--source", required=True,
                   help="scene JSON or visibility CSV")
    p.add_argument("--variant", choices=imaging.PIPELINE_VARIANTS)
    p.add_argument("--kernel", choices=("wendland0", "matern6", "gaussian"))
    p.add_argument("--config", help="TOML/JSON pipeline config")
    p.add_argument("--out", required=True, help="output directory")
    return parser


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _run_interp(cfg: RunConfig) -> int:
    s = cfg.settings
    if s["nodes"] is None:
        raise ConfigError("interp requires a nodes CSV ('nodes' key or --nodes)")
    nodes, values = io_config.read_nodes_csv(s["nodes"])
    amap = io_config.parse_augmented_map(s["map"], s["scaling"])

    grid = io_config.epsilon_grid_from_spec(
        s["epsilon_grid"], LoocvConfig().epsilon_grid
    )
    curve = None
    if s["epsilon"] is not None and not s["loocv"]:
        epsilon = s["epsilon"]
    else:
        selection = select_epsilon(LoocvConfig(grid), s["kernel"], amap, nodes, values)
        epsilon = selection.best_epsilon
        curve = selection.score_curve
    kernel = RadialKernel(s["kernel"], epsilon)
    interp = fit(kernel, amap, nodes, values, ridge=s["ridge"])

    summary = {
        "kernel": s["kernel"],
        "epsilon": epsilon,
        "n_nodes": nodes.n,
        "condition_estimate": interp.diagnostics.condition_estimate,
        "residual_at_nodes": interp.diagnostics.residual_at_nodes,
    }
    if s["out"] is None:
        print(json.dumps({"schema_version": io_config.SCHEMA_VERSION, **summary},
                         indent=2))
        return 0
    out = _outdir(s["out"])
    io_config.interpolant_to_json(interp, out / "interpolant.json")
    if curve is not None:
        io_config.write_results(
            [{"epsilon": e, "loo_rmse": r} for e, r in curve],
            out / "loocv_curve.csv",
            ["epsilon", "loo_rmse"],
        )
    if s["queries"] is not None:
        queries, _ = _read_query_csv(s["queries"], nodes.dim)
        predicted = interp(queries)
        rows = []
        for q, val in zip(queries, predicted):
            row = {f"x{i}": q[i] for i in range(nodes.dim)}
            row["predicted"] = val
            rows.append(row)
        io_config.write_results(
            rows, out / "predictions.csv",
            [f"x{i}" for i in range(nodes.dim)] + ["predicted"],
        )
    io_config.write_json(summary, out / "summary.json")
    return 0


def _read_query_csv(path, dim):
    import csv as _csv
    import io as _io

    text = Path(path).read_text()
    rows = list(_csv.reader(_io.StringIO(text)))
    if rows and not io_config._is_numeric_row(rows[0]):
        rows = rows[1:]
    data = np.array([[float(v) for v in row[:dim]] for row in rows])
    return data, None


def _run_metrics(cfg: RunConfig) -> int:
    s = cfg.settings
    nodes, _ = io_config.read_nodes_csv(s["nodes"])
    domain = DomainBox(tuple(s["lower"]), tuple(s["upper"]), s["resolution"])
    payload = {
        "n_nodes": nodes.n,
        "fill_distance": fill_distance(nodes, domain),
        "separation_distance": (
            separation_distance(nodes) if nodes.n >= 2 else None
        ),
    }
    if s["partition"] is not None:
        scaling = io_config.parse_scaling_spec(
            {"kind": "piecewise_constant", **s["partition"]}
        )
        regional = regional_distances(nodes, domain, scaling)
        payload["per_region"] = {
            "fill_distance": list(regional.fill_per_region),
            "separation_distance": [
                None if np.isnan(v) else v for v in regional.separation_per_region
            ],
            "fill_global": regional.fill_global,
            "separation_global": regional.separation_global,
        }
    if s["out"] is None:
        print(json.dumps({"schema_version": io_config.SCHEMA_VERSION, **payload},
                         indent=2))
    else:
        io_config.write_json(payload, s["out"])
    return 0


def _run_bench(cfg: RunConfig) -> int:
    s = cfg.settings
    grid = io_config.epsilon_grid_from_spec(
        s["epsilon_grid"], LoocvConfig().epsilon_grid
    )
    config = harness.ExperimentConfig(
        n_values=tuple(s["n_values"]),
        eval_grid=s["eval_grid"],
        seed=s["seed"],
        kernels=tuple(s["kernels"]),
        variants=tuple(s["variants"]),
        loocv=LoocvConfig(grid),
        sampler_variance=s["sampler_variance"],
    )
    rows, curves = harness.run_experiment(config)
    out = _outdir(s["out"])
    io_config.write_results(rows, out / "rmse.csv", list(harness.RESULT_COLUMNS))

    seen = set()
    distance_rows = []
    for row in rows:
        key = (row["n_requested"], row["variant"])
        if key in seen:
            continue
        seen.add(key)
        distance_rows.append(
            {
                "n_requested": row["n_requested"],
                "n_nodes": row["n_nodes"],
                "variant": row["variant"],
                "fill_distance": row["fill_distance"],
                "separation_distance": row["separation_distance"],
            }
        )
    io_config.write_results(
        distance_rows,
        out / "distances.csv",
        ["n_requested", "n_nodes", "variant", "fill_distance", "separation_distance"],
    )
    curve_dir = out / "loocv_curves"
    curve_dir.mkdir(exist_ok=True)
    for (n, kernel_name, variant), curve in sorted(curves.items()):
        io_config.write_results(
            [{"epsilon": e, "loo_rmse": r} for e, r in curve],
            curve_dir / f"n{n}_{kernel_name}_{variant}.csv",
            ["epsilon", "loo_rmse"],
        )
    return 0


def _run_image(cfg: RunConfig) -> int:
    s = cfg.settings
    if s["geometry"] in (None, "default"):
        geometry = imaging.default_stix_geometry()
    else:
        geometry = io_config.read_geometry_csv(s["geometry"])

    source = Path(s["source"])
    if source.suffix.lower() == ".json":
        scene = json.loads(source.read_text())
        spec = imaging.default_grid_spec(geometry, s["image_n"])
        sources = [
            imaging.GaussianSource(
                flux=float(item["flux"]),
                x=float(item["x"]),
                y=float(item["y"]),
                fwhm=float(item["fwhm"]),
            )
            for item in scene["sources"]
        ]
        truth = imaging.gaussian_scene(sources, spec)
        vis = imaging.forward_model(truth, geometry)
        if s["noise_sigma"] is not None:
            sigma = np.full(vis.n, s["noise_sigma"])
            vis = imaging.VisibilitySet(geometry, vis.values, sigma)
    else:
        vis = io_config.read_visibilities_csv(source)

    config = imaging.PipelineConfig(
        kernel_profile=s["kernel"],
        epsilon_grid=io_config.epsilon_grid_from_spec(
            s["epsilon_grid"], imaging.imaging_epsilon_grid()
        ),
        surface_n=s["surface_n"],
        image_n=s["image_n"],
        psi_mode=s["psi_mode"],
        psi_grid_n=s["psi_grid_n"],
        landweber=imaging.LandweberConfig(
            max_iters=s["max_iters"], tol=s["tol"], tau_safety=s["tau_safety"]
        ),
    )
    result = imaging.reconstruct_pipeline(vis, s["variant"], config)

    out = _outdir(s["out"])
    image_rows = [
        {f"c{j}": result.image.flux[i, j] for j in range(result.image.spec.n_pixels)}
        for i in range(result.image.spec.n_pixels)
    ]
    io_config.write_results(
        image_rows, out / "image.csv",
        [f"c{j}" for j in range(result.image.spec.n_pixels)],
    )
    io_config.write_results(
        [{"iteration": i, "residual": r} for i, r in enumerate(result.residuals)],
        out / "residuals.csv",
        ["iteration", "residual"],
    )
    fit_rows = []
    for point, obs, pred in zip(
        geometry.points, vis.values, result.predicted.values
    ):
        fit_rows.append(
            {
                "u": point[0],
                "v": point[1],
                "re_obs": obs.real,
                "im_obs": obs.imag,
                "re_pred": pred.real,
                "im_pred": pred.imag,
            }
        )
    io_config.write_results(
        fit_rows, out / "vis_fit.csv",
        ["u", "v", "re_obs", "im_obs", "re_pred", "im_pred"],
    )
    io_config.write_json(
        {
            "variant": result.variant,
            "kernel": s["kernel"],
            "epsilon": result.epsilon,
            "chi_square": result.chi_square,
            "pixel_size": result.image.spec.pixel_size,
            "n_pixels": result.image.spec.n_pixels,
            "landweber_iterations": len(result.residuals) - 1,
            "final_residual": result.residuals[-1],
        },
        out / "summary.json",
    )
    return 0


_RUNNERS = {
    "interp": _run_interp,
    "metrics": _run_metrics,
    "bench-discontinuous": _run_bench,
    "image-reconstruct": _run_image,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = vars(parser.parse_args(argv))
    subcommand = args.pop("subcommand")
    config_path = args.pop("config", None)
    try:
        cfg = parse_config(subcommand, config_path, overrides=args)
    except ConfigError as exc:
        print(f"mvsk: configuration error: {exc}", file=sys.stderr)
        return 1
    try:
        return _RUNNERS[subcommand](cfg)
    except ConfigError as exc:
        print(f"mvsk: configuration error: {exc}", file=sys.stderr)
        return 1
    except (
        IllConditionedError,
        InjectivityError,
        SelectionError,
        imaging.StepSizeError,
        ValueError,
        OSError,
    ) as exc:
        print(f"mvsk: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
