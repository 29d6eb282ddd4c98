import json

import numpy as np
import pytest

from mvsk import cli
from mvsk.harness import sample_gaussian_nodes, target_f
from mvsk.imaging import VisibilitySet, default_stix_geometry, forward_model, gaussian_scene
from mvsk.imaging import GaussianSource, default_grid_spec
from mvsk.interpolation import fit
from mvsk.io_config import (
    ConfigError,
    interpolant_from_json,
    interpolant_to_json,
    parse_augmented_map,
    parse_config,
    read_nodes_csv,
    read_visibilities_csv,
    write_nodes_csv,
    write_results,
    write_visibilities_csv,
)
from mvsk.kernels import MATERN_C6, RadialKernel


# ---------------------------------------------------------------------------
# persistence round trips
# ---------------------------------------------------------------------------


def test_nodes_csv_round_trip(tmp_path):
    nodes = sample_gaussian_nodes(50, seed=2)
    values = target_f(nodes.points)
    path = tmp_path / "nodes.csv"
    write_nodes_csv(nodes, values, path)
    loaded_nodes, loaded_values = read_nodes_csv(path)
    np.testing.assert_array_equal(loaded_nodes.points, nodes.points)
    np.testing.assert_array_equal(loaded_values, values)


def test_results_deterministic_bytes(tmp_path):
    rows = [{"a": 1, "b": 0.1 + 0.2}, {"a": 2, "b": float("inf")}]
    p1, p2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
    write_results(rows, p1)
    write_results(rows, p2)
    assert p1.read_bytes() == p2.read_bytes()
    # 17 significant digits: round-trip exact
    text = p1.read_text().splitlines()
    assert float(text[1].split(",")[1]) == 0.1 + 0.2


def test_empty_table_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    write_results([], path, columns=["x", "y"])
    assert path.read_bytes() == b"x,y\r\n"
    with pytest.raises(ValueError, match="columns"):
        write_results([], tmp_path / "nope.csv")


def test_visibilities_csv_round_trip(tmp_path):
    geometry = default_stix_geometry()
    spec = default_grid_spec(geometry, 16)
    scene = gaussian_scene([GaussianSource(1.0, 0.0, 0.0, 20.0)], spec)
    vis = forward_model(scene, geometry)
    sigma = np.full(vis.n, 0.05)
    vis = VisibilitySet(geometry, vis.values, sigma)
    path = tmp_path / "vis.csv"
    write_visibilities_csv(vis, path)
    loaded = read_visibilities_csv(path)
    np.testing.assert_array_equal(loaded.geometry.points, geometry.points)
    np.testing.assert_array_equal(loaded.values, vis.values)
    np.testing.assert_array_equal(loaded.noise_sigma, sigma)


def test_interpolant_json_round_trip(tmp_path):
    nodes = sample_gaussian_nodes(30, seed=4)
    values = target_f(nodes.points)
    amap = parse_augmented_map(
        {"kind": "erf_uniformize", "mean": 0.0, "variance": 0.1},
        {"kind": "piecewise_constant", "axis": 0,
         "thresholds": [-0.3, 0.0, 0.5], "values": [0.0, 1.0, 2.0, 3.0]},
    )
    interp = fit(RadialKernel(MATERN_C6, 2.0), amap, nodes, values)
    path = tmp_path / "interp.json"
    interpolant_to_json(interp, path)
    loaded = interpolant_from_json(path)
    rng = np.random.default_rng(0)
    queries = rng.uniform(-1, 1, size=(20, 2))
    np.testing.assert_allclose(loaded(queries), interp(queries), rtol=1e-12)
    payload = json.loads(path.read_text())
    assert payload["schema_version"] == 1


def test_map_spec_round_trip():
    amap = parse_augmented_map({"kind": "log_polar", "normalizer": 2.0, "r_ref": 0.1},
                               {"kind": "constant", "alpha": 1.5})
    spec = amap.spec()
    assert spec["map"] == {"kind": "log_polar", "normalizer": 2.0, "r_ref": 0.1}
    assert spec["scaling"] == {"kind": "constant", "alpha": 1.5}


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


def test_parse_config_fills_defaults():
    cfg = parse_config("bench-discontinuous", overrides={"out": "somewhere"})
    assert cfg.settings["eval_grid"] == 80
    assert cfg.settings["seed"] == 1
    assert cfg.settings["kernels"] == ("wendland0", "matern6")


def test_parse_config_rejects_bad_epsilon():
    with pytest.raises(ConfigError, match="epsilon"):
        parse_config("interp", overrides={"epsilon": -1.0})


def test_parse_config_suggests_nearest_key():
    with pytest.raises(ConfigError, match="epsilonn.*epsilon"):
        parse_config("interp", overrides={"epsilonn": 2.0})


def test_parse_config_unknown_subcommand():
    with pytest.raises(ConfigError, match="subcommand"):
        parse_config("frobnicate")


def test_parse_config_from_toml_file(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text('eval_grid = 40\nseed = 9\nout = "results"\n')
    cfg = parse_config("bench-discontinuous", config_path=path)
    assert cfg.settings["eval_grid"] == 40
    assert cfg.settings["seed"] == 9


def test_parse_config_from_json_file(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"kernel": "gaussian", "epsilon": 2.5}))
    cfg = parse_config("interp", config_path=path)
    assert cfg.settings["kernel"] == "gaussian"
    assert cfg.settings["epsilon"] == 2.5


def test_parse_config_invalid_toml_reports_file(tmp_path):
    path = tmp_path / "broken.toml"
    path.write_text("eval_grid = = 40")
    with pytest.raises(ConfigError, match="invalid TOML"):
        parse_config("bench-discontinuous", config_path=path)


# ---------------------------------------------------------------------------
# CLI end to end
# ---------------------------------------------------------------------------


def _write_nodes(tmp_path, n=40, seed=3):
    nodes = sample_gaussian_nodes(n, seed=seed)
    values = target_f(nodes.points)
    path = tmp_path / "nodes.csv"
    write_nodes_csv(nodes, values, path)
    return path


def test_cli_metrics_stdout(tmp_path, capsys):
    nodes_csv = _write_nodes(tmp_path)
    code = cli.main(["metrics", "--nodes", str(nodes_csv), "--resolution", "50"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["fill_distance"] > 0
    assert payload["separation_distance"] > 0


def test_cli_metrics_with_partition(tmp_path):
    nodes_csv = _write_nodes(tmp_path, n=120)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "partition": {"axis": 0, "thresholds": [-0.3, 0.0, 0.5],
                      "values": [0.0, 1.0, 2.0, 3.0]},
        "resolution": 50,
    }))
    out = tmp_path / "metrics.json"
    code = cli.main(["metrics", "--nodes", str(nodes_csv), "--config", str(cfg),
                     "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert len(payload["per_region"]["fill_distance"]) == 4


def test_cli_interp_loocv(tmp_path):
    nodes_csv = _write_nodes(tmp_path)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"epsilon_grid": {"count": 5, "lo": 1.0, "hi": 10.0}}))
    out = tmp_path / "out"
    code = cli.main([
        "interp", "--nodes", str(nodes_csv), "--kernel", "matern6", "--loocv",
        "--config", str(cfg), "--out", str(out),
    ])
    assert code == 0
    assert (out / "interpolant.json").exists()
    assert (out / "loocv_curve.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["epsilon"] > 0


def test_cli_interp_queries(tmp_path):
    nodes_csv = _write_nodes(tmp_path)
    queries = tmp_path / "queries.csv"
    queries.write_text("x0,x1\n0.0,0.0\n0.5,0.5\n")
    out = tmp_path / "out"
    code = cli.main([
        "interp", "--nodes", str(nodes_csv), "--kernel", "matern6",
        "--epsilon", "3.0", "--queries", str(queries), "--out", str(out),
    ])
    assert code == 0
    lines = (out / "predictions.csv").read_text().splitlines()
    assert lines[0] == "x0,x1,predicted"
    assert len(lines) == 3


def test_cli_bench_outputs(tmp_path):
    cfg = tmp_path / "bench.json"
    cfg.write_text(json.dumps({
        "n_values": [30], "eval_grid": 15, "kernels": ["matern6"],
        "variants": ["classical", "vsdk"],
        "epsilon_grid": {"count": 4, "lo": 1.0, "hi": 10.0},
    }))
    out = tmp_path / "bench_out"
    code = cli.main(["bench-discontinuous", "--config", str(cfg), "--out", str(out)])
    assert code == 0
    rmse_lines = (out / "rmse.csv").read_text().splitlines()
    assert len(rmse_lines) == 3  # header + 2 variants
    assert (out / "distances.csv").exists()
    assert len(list((out / "loocv_curves").glob("*.csv"))) == 2


def test_cli_bench_reproducible(tmp_path):
    cfg = tmp_path / "bench.json"
    cfg.write_text(json.dumps({
        "n_values": [25], "eval_grid": 12, "kernels": ["matern6"],
        "variants": ["classical"],
        "epsilon_grid": {"count": 3, "lo": 1.0, "hi": 10.0},
    }))
    out1, out2 = tmp_path / "b1", tmp_path / "b2"
    assert cli.main(["bench-discontinuous", "--config", str(cfg), "--out", str(out1)]) == 0
    assert cli.main(["bench-discontinuous", "--config", str(cfg), "--out", str(out2)]) == 0
    assert (out1 / "rmse.csv").read_bytes() == (out2 / "rmse.csv").read_bytes()


def test_cli_image_reconstruct(tmp_path):
    scene = tmp_path / "scene.json"
    scene.write_text(json.dumps({
        "sources": [
            {"flux": 1.0, "x": -6.0, "y": -4.0, "fwhm": 10.0},
            {"flux": 0.7, "x": 6.0, "y": 4.5, "fwhm": 18.0},
        ]
    }))
    cfg = tmp_path / "img.json"
    cfg.write_text(json.dumps({
        "surface_n": 32, "image_n": 32, "max_iters": 100,
        "epsilon_grid": {"count": 12, "lo": 1.0, "hi": 10000.0, "log": True},
    }))
    out = tmp_path / "img_out"
    code = cli.main([
        "image-reconstruct", "--source", str(scene), "--variant", "mvsk",
        "--config", str(cfg), "--out", str(out),
    ])
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["chi_square"] >= 0
    image_lines = (out / "image.csv").read_text().splitlines()
    assert len(image_lines) == 33  # header + 32 rows
    fit_lines = (out / "vis_fit.csv").read_text().splitlines()
    assert fit_lines[0] == "u,v,re_obs,im_obs,re_pred,im_pred"
    assert len(fit_lines) == 61
    assert (out / "residuals.csv").exists()


def test_cli_image_reconstruct_from_vis_csv(tmp_path):
    geometry = default_stix_geometry()
    spec = default_grid_spec(geometry, 32)
    vis = forward_model(
        gaussian_scene([GaussianSource(1.0, 0.0, 0.0, 15.0)], spec), geometry
    )
    vis_csv = tmp_path / "vis.csv"
    write_visibilities_csv(vis, vis_csv)
    cfg = tmp_path / "img.json"
    cfg.write_text(json.dumps({
        "surface_n": 32, "image_n": 32, "max_iters": 60,
        "epsilon_grid": {"count": 8, "lo": 1.0, "hi": 10000.0, "log": True},
    }))
    out = tmp_path / "img_out"
    code = cli.main([
        "image-reconstruct", "--source", str(vis_csv), "--variant", "classical",
        "--config", str(cfg), "--out", str(out),
    ])
    assert code == 0


def test_cli_usage_error_exit_code_1(tmp_path):
    # unknown key in config: configuration error, not a crash
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"eval_gridd": 10}))
    code = cli.main(["bench-discontinuous", "--config", str(cfg),
                     "--out", str(tmp_path / "o")])
    assert code == 1


def test_cli_runtime_error_exit_code_2(tmp_path):
    # nodes file missing: runtime I/O failure
    code = cli.main(["metrics", "--nodes", str(tmp_path / "missing.csv")])
    assert code == 2


def test_cli_argparse_usage_exit_code_1():
    with pytest.raises(SystemExit) as info:
        cli.main(["interp", "--kernel", "bogus"])
    assert info.value.code == 1
