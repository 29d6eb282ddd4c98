"""Configuration parsing and text-format persistence.

Everything on disk is CSV (tables) or JSON (nested specs and summaries);
floats are written with 17 significant digits so round trips are exact, and
key/column order is fixed so identical runs produce identical bytes.  Config
files may be TOML or JSON; unknown keys are rejected with a pointer to the
nearest valid key.
"""

from __future__ import annotations

import csv
import difflib
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .interpolation import FitDiagnostics, Interpolant, NodeSet
from .kernels import PROFILES, RadialKernel
from .scalings import (
    AugmentedMap,
    AxisThresholdPartition,
    ConstantScaling,
    ErfUniformizeMap,
    IdentityMap,
    LogPolarMap,
    NodeMap,
    PiecewiseConstantScaling,
    SampledScaling,
    ScalingFunction,
    SGibbsMap,
)

SCHEMA_VERSION = 1

SUBCOMMANDS = ("interp", "metrics", "bench-discontinuous", "image-reconstruct")


class ConfigError(ValueError):
    """Malformed or invalid configuration."""


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


# ---------------------------------------------------------------------------
# tabular persistence
# ---------------------------------------------------------------------------


def write_results(rows, path, columns=None):
    """Write a list of row dicts as CSV with a fixed column order.

    The column order is ``columns`` if given, else the key order of the first
    row.  An empty table produces a header-only file (columns required then).
    """
    rows = list(rows)
    if columns is None:
        if not rows:
            raise ValueError("columns must be given for an empty table")
        columns = list(rows[0].keys())
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_fmt(row[col]) for col in columns])
    except OSError as exc:
        raise OSError(f"failed writing results to {path}: {exc}") from exc


def write_json(payload: dict, path):
    """JSON summary with a schema-version field and stable key order."""
    out = {"schema_version": SCHEMA_VERSION}
    out.update(payload)
    path = Path(path)
    try:
        path.write_text(json.dumps(out, indent=2, sort_keys=False) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing JSON to {path}: {exc}") from exc


def write_nodes_csv(nodes: NodeSet, values, path):
    """One row per node: d coordinates then the data value."""
    d = nodes.dim
    columns = [f"x{i}" for i in range(d)] + ["value"]
    rows = []
    values = np.asarray(values, dtype=float)
    for point, val in zip(nodes.points, values):
        row = {f"x{i}": point[i] for i in range(d)}
        row["value"] = val
        rows.append(row)
    write_results(rows, path, columns)


def read_nodes_csv(path):
    """Read a node table; returns (NodeSet, values)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"failed reading nodes from {path}: {exc}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    if rows and not _is_numeric_row(rows[0]):
        rows = rows[1:]
    if not rows:
        raise ConfigError(f"{path}: node file contains no data rows")
    data = np.array([[float(v) for v in row] for row in rows])
    if data.shape[1] < 2:
        raise ConfigError(f"{path}: need at least one coordinate and a value")
    return NodeSet(data[:, :-1]), data[:, -1]


def write_visibilities_csv(vis, path):
    """Visibility table: u, v, re, im, sigma (0 means sigma unspecified)."""
    sigma = (
        vis.noise_sigma
        if vis.noise_sigma is not None
        else np.zeros(vis.n)
    )
    rows = []
    for point, value, s in zip(vis.geometry.points, vis.values, sigma):
        rows.append(
            {
                "u": point[0],
                "v": point[1],
                "re": value.real,
                "im": value.imag,
                "sigma": s,
            }
        )
    write_results(rows, path, ["u", "v", "re", "im", "sigma"])


def read_visibilities_csv(path):
    """Read a visibility table written by :func:`write_visibilities_csv`."""
    from .imaging import UvGeometry, VisibilitySet

    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"failed reading visibilities from {path}: {exc}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    if rows and not _is_numeric_row(rows[0]):
        rows = rows[1:]
    if not rows:
        raise ConfigError(f"{path}: visibility file contains no data rows")
    data = np.array([[float(v) for v in row] for row in rows])
    if data.shape[1] not in (4, 5):
        raise ConfigError(f"{path}: expected columns u, v, re, im[, sigma]")
    geometry = UvGeometry(data[:, :2])
    values = data[:, 2] + 1j * data[:, 3]
    sigma = None
    if data.shape[1] == 5 and np.all(data[:, 4] > 0):
        sigma = data[:, 4]
    return VisibilitySet(geometry, values, sigma)


def read_geometry_csv(path):
    """Read (u, v) sampling points; reflection symmetry is validated."""
    from .imaging import UvGeometry

    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"failed reading geometry from {path}: {exc}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    if rows and not _is_numeric_row(rows[0]):
        rows = rows[1:]
    data = np.array([[float(v) for v in row[:2]] for row in rows])
    return UvGeometry(data)


def _is_numeric_row(row) -> bool:
    try:
        [float(v) for v in row]
        return True
    except ValueError:
        return False


# ---------------------------------------------------------------------------
# map / scaling specs
# ---------------------------------------------------------------------------

_SCALING_KEYS = {
    "constant": {"kind", "alpha"},
    "piecewise_constant": {"kind", "axis", "thresholds", "values"},
    "sampled": {"kind", "x_axis", "y_axis", "values"},
}

_MAP_KEYS = {
    "identity": {"kind"},
    "s_gibbs": {"kind", "axis", "thresholds", "beta"},
    "erf_uniformize": {"kind", "mean", "variance"},
    "log_polar": {"kind", "normalizer", "r_ref"},
}


def parse_scaling_spec(spec: dict) -> ScalingFunction:
    kind = spec.get("kind")
    if kind not in _SCALING_KEYS:
        raise ConfigError(
            f"unknown scaling kind {kind!r}; valid kinds: {sorted(_SCALING_KEYS)}"
        )
    _check_keys(spec, _SCALING_KEYS[kind], f"scaling spec ({kind})")
    if kind == "constant":
        return ConstantScaling(float(spec.get("alpha", 0.0)))
    if kind == "piecewise_constant":
        partition = AxisThresholdPartition(
            axis=int(spec.get("axis", 0)),
            thresholds=tuple(spec["thresholds"]),
        )
        return PiecewiseConstantScaling(partition, tuple(spec["values"]))
    return SampledScaling(
        np.asarray(spec["x_axis"], dtype=float),
        np.asarray(spec["y_axis"], dtype=float),
        np.asarray(spec["values"], dtype=float),
    )


def parse_map_spec(spec: dict) -> NodeMap:
    kind = spec.get("kind")
    if kind not in _MAP_KEYS:
        raise ConfigError(
            f"unknown map kind {kind!r}; valid kinds: {sorted(_MAP_KEYS)}"
        )
    _check_keys(spec, _MAP_KEYS[kind], f"map spec ({kind})")
    if kind == "identity":
        return IdentityMap()
    if kind == "s_gibbs":
        partition = AxisThresholdPartition(
            axis=int(spec.get("axis", 0)),
            thresholds=tuple(spec["thresholds"]),
        )
        return SGibbsMap(partition, beta=float(spec.get("beta", 1.0)))
    if kind == "erf_uniformize":
        mean = spec.get("mean", 0.0)
        variance = spec.get("variance", 0.1)
        mean = tuple(mean) if isinstance(mean, (list, tuple)) else float(mean)
        variance = (
            tuple(variance) if isinstance(variance, (list, tuple)) else float(variance)
        )
        return ErfUniformizeMap(mean=mean, variance=variance)
    r_ref = spec.get("r_ref")
    return LogPolarMap(
        normalizer=float(spec.get("normalizer", 1.0)),
        r_ref=float(r_ref) if r_ref is not None else None,
    )


def parse_augmented_map(map_spec: Optional[dict], scaling_spec: Optional[dict]):
    node_map = parse_map_spec(map_spec) if map_spec else IdentityMap()
    scaling = parse_scaling_spec(scaling_spec) if scaling_spec else ConstantScaling(0.0)
    return AugmentedMap(node_map, scaling)


# ---------------------------------------------------------------------------
# interpolant persistence
# ---------------------------------------------------------------------------


def interpolant_to_json(interp: Interpolant, path):
    payload = {
        "kernel": {"profile": interp.kernel.profile, "epsilon": interp.kernel.epsilon},
        "map": interp.map.node_map.spec(),
        "scaling": interp.map.scaling.spec(),
        "nodes": interp.nodes.points.tolist(),
        "region_labels": (
            interp.nodes.region_labels.tolist()
            if interp.nodes.region_labels is not None
            else None
        ),
        "coefficients": np.asarray(interp.coefficients).tolist(),
        "diagnostics": {
            "condition_estimate": interp.diagnostics.condition_estimate,
            "residual_at_nodes": interp.diagnostics.residual_at_nodes,
        },
    }
    write_json(payload, path)


def interpolant_from_json(path) -> Interpolant:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"failed reading interpolant from {path}: {exc}") from exc
    kernel = RadialKernel(
        payload["kernel"]["profile"], float(payload["kernel"]["epsilon"])
    )
    amap = AugmentedMap(
        parse_map_spec(payload["map"]), parse_scaling_spec(payload["scaling"])
    )
    nodes = NodeSet(
        np.asarray(payload["nodes"], dtype=float),
        region_labels=(
            np.asarray(payload["region_labels"], dtype=int)
            if payload.get("region_labels") is not None
            else None
        ),
    )
    diag = payload["diagnostics"]
    return Interpolant(
        nodes=nodes,
        kernel=kernel,
        map=amap,
        coefficients=np.asarray(payload["coefficients"], dtype=float),
        diagnostics=FitDiagnostics(
            condition_estimate=float(diag["condition_estimate"]),
            residual_at_nodes=float(diag["residual_at_nodes"]),
        ),
    )


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------


def _check_keys(mapping, valid, context):
    for key in mapping:
        if key not in valid:
            close = difflib.get_close_matches(key, sorted(valid), n=1)
            hint = f"; did you mean {close[0]!r}" if close else ""
            raise ConfigError(
                f"unknown key {key!r} in {context}{hint} "
                f"(valid keys: {sorted(valid)})"
            )


def _positive(name, value):
    if not (isinstance(value, (int, float)) and value > 0):
        raise ConfigError(f"{name} must be a positive number, got {value!r}")
    return float(value)


def _positive_int(name, value, minimum=1):
    if not (isinstance(value, int) and value >= minimum):
        raise ConfigError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return value


def _profile(name, value):
    if value not in PROFILES:
        raise ConfigError(f"{name} must be one of {PROFILES}, got {value!r}")
    return value


# schema: key -> (default, validator or None); None default means optional
_EPS_GRID_KEYS = {"count", "lo", "hi", "log"}

_SCHEMAS = {
    "interp": {
        "nodes": (None, None),
        "queries": (None, None),
        "kernel": ("matern6", _profile),
        "epsilon": (None, _positive),
        "loocv": (False, None),
        "epsilon_grid": (None, None),
        "ridge": (0.0, None),
        "map": (None, None),
        "scaling": (None, None),
        "out": (None, None),
    },
    "metrics": {
        "nodes": (None, None),
        "resolution": (200, lambda n, v: _positive_int(n, v, 2)),
        "lower": ((-1.0, -1.0), None),
        "upper": ((1.0, 1.0), None),
        "partition": (None, None),
        "out": (None, None),
    },
    "bench-discontinuous": {
        "n_values": ((10, 25, 50, 100, 200, 300, 400, 500), None),
        "eval_grid": (80, lambda n, v: _positive_int(n, v, 2)),
        "seed": (1, None),
        "kernels": (("wendland0", "matern6"), None),
        "variants": (("classical", "vsdk", "mvsdk"), None),
        "epsilon_grid": (None, None),
        "sampler_variance": (0.1, _positive),
        "out": (None, None),
    },
    "image-reconstruct": {
        "geometry": ("default", None),
        "source": (None, None),
        "variant": ("mvsk", None),
        "kernel": ("matern6", _profile),
        "epsilon_grid": (None, None),
        "surface_n": (64, lambda n, v: _positive_int(n, v, 2)),
        "image_n": (64, lambda n, v: _positive_int(n, v, 2)),
        "psi_mode": ("magnitude", None),
        "psi_grid_n": (65, lambda n, v: _positive_int(n, v, 3)),
        "max_iters": (500, lambda n, v: _positive_int(n, v, 1)),
        "tol": (1e-9, _positive),
        "tau_safety": (0.9, _positive),
        "noise_sigma": (None, _positive),
        "seed": (1, None),
        "out": (None, None),
    },
}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    settings: dict


def _load_config_file(path) -> dict:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            return json.loads(raw.decode())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}") from exc
    try:
        return tomllib.loads(raw.decode())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: invalid TOML ({exc})") from exc


def parse_config(
    subcommand: str, config_path=None, overrides: Optional[dict] = None
) -> RunConfig:
    """Merge a config file and explicit overrides into a validated RunConfig.

    Unknown keys are rejected (with the nearest valid key suggested), then
    defaults are filled and per-key validators applied.
    """
    if subcommand not in _SCHEMAS:
        raise ConfigError(
            f"unknown subcommand {subcommand!r}; valid: {SUBCOMMANDS}"
        )
    schema = _SCHEMAS[subcommand]
    merged = {}
    if config_path is not None:
        merged.update(_load_config_file(config_path))
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value
    _check_keys(merged, set(schema), f"{subcommand} config")
    if "epsilon_grid" in merged and merged["epsilon_grid"] is not None:
        _check_keys(merged["epsilon_grid"], _EPS_GRID_KEYS, "epsilon_grid")

    settings = {}
    for key, (default, validator) in schema.items():
        value = merged.get(key, default)
        if value is not None and validator is not None:
            value = validator(key, value)
        settings[key] = value
    return RunConfig(subcommand=subcommand, settings=settings)


def epsilon_grid_from_spec(spec: Optional[dict], default):
    """Materialize an epsilon grid from {count, lo, hi, log} or fall back."""
    if spec is None:
        return default
    count = _positive_int("epsilon_grid.count", spec.get("count", 200))
    lo = _positive("epsilon_grid.lo", spec.get("lo", 0.01))
    hi = _positive("epsilon_grid.hi", spec.get("hi", 50.0))
    if hi <= lo:
        raise ConfigError("epsilon_grid.hi must exceed epsilon_grid.lo")
    if spec.get("log", False):
        return tuple(np.geomspace(lo, hi, count))
    return tuple(np.linspace(lo, hi, count))
