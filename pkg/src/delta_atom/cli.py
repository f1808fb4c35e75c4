"""Experiment presets, strict JSON configuration and deterministic CSV output.

Usage::

    delta-atom <experiment> [--config cfg.json] [--out table.csv]
               [--override key=value ...] [--plot]

Experiments: fig5, cat, coherent, selection-rules, fnt-check, spectrum.
Every run writes one CSV table (atomically), prefixed with ``#`` metadata
lines that echo the fully resolved configuration, the package version and
a content hash, so identical configs reproduce byte-identical files.
Exit codes: 0 success, 1 validation error, 2 numeric failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import copy
import dataclasses
import hashlib
import importlib.resources
import json
import math
import os
import sys
import tempfile

import jsonschema
import numpy as np

from . import __version__
from .errors import NumericsError, ValidationError
from .fluxqubit import FluxParams, Grid2D, cyclic_product, spectrum_2d, transition_elements
from .fnt import eliminate, random_test_instance
from .hamiltonians import ModelParams, dressed_params, dressed_params_from_theta
from .numkernel import B, HilbertSpace, hermitian_eig
from .dynamics import (
    branch_amplitudes,
    evolve_and_compare,
    fock_overlap_fock_dim,
    fock_overlap_y,
    generation_rate,
    generation_rate_simple_prefactor,
    minus_branch_photon_number,
    overlap_y,
    photon_number,
)

EXPERIMENTS = ("fig5", "cat", "coherent", "selection-rules", "fnt-check", "spectrum")
_MODEL_EXPERIMENTS = {"fig5", "cat", "coherent"}
_FLUX_EXPERIMENTS = {"selection-rules", "spectrum"}

THETA_SETS = {
    "caption": (math.pi / 2, math.pi / 3, math.pi / 4),
    "text": (math.pi / 2, math.pi / 4, math.pi / 6),
}

_DEFAULTS: dict[str, dict] = {
    "fig5": {
        "units": "lambda",
        "seed": 1234,
        "model": {"delta_e": 3.0, "g": 0.8, "G": 0.9, "lambda": 1.0, "theta_set": "caption"},
        "numerics": {"fock_dim": 32, "time_samples": 2000, "periods": 2.0},
    },
    "cat": {
        "units": "lambda",
        "seed": 1234,
        "model": {"delta_c": 0.0, "g": 0.8, "G": 0.4, "lambda": 1.0, "detuning_ratio": 10.0},
        "numerics": {"fock_dim": 32, "time_samples": 2000, "periods": 1.0},
    },
    "coherent": {
        "units": "lambda",
        "seed": 1234,
        "model": {"delta_e": 3.0, "delta_c": 0.0, "g": 0.8, "G": 0.9, "lambda": 1.0},
        "numerics": {"fock_dim": 64, "time_samples": 2000, "periods": 1.0},
    },
    "selection-rules": {
        "units": "E_J",
        "seed": 1234,
        "flux": {
            "E_J": 1.0,
            "alpha": 0.6,
            "mass_ratio": 8.0,
            "f_start": 0.45,
            "f_stop": 0.55,
            "f_step": 0.005,
            "grid": 64,
            "levels": 3,
        },
    },
    "spectrum": {
        "units": "E_J",
        "seed": 1234,
        "flux": {
            "E_J": 1.0,
            "alpha": 0.6,
            "mass_ratio": 8.0,
            "f_start": 0.45,
            "f_stop": 0.55,
            "f_step": 0.005,
            "grid": 64,
            "levels": 3,
        },
    },
    "fnt-check": {
        "units": "lambda",
        "seed": 1234,
        "numerics": {"fnt_instances": 100, "fnt_dim_max": 12, "fnt_ratio": 0.1},
    },
}


@dataclasses.dataclass(frozen=True)
class ResultTable:
    """One emitted table: column names, numeric rows, metadata block."""

    columns: tuple[str, ...]
    rows: list[tuple]
    metadata: dict


def _schema() -> dict:
    text = importlib.resources.files("delta_atom").joinpath("config_schema.json").read_text()
    return json.loads(text)


def _deep_merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _apply_override(cfg: dict, spec: str) -> None:
    if "=" not in spec:
        raise ValidationError(f"override '{spec}' is not of the form key=value")
    key, _, raw = spec.partition("=")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = cfg
    parts = key.split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ValidationError(f"override '{key}' descends into a non-object value")
    node[parts[-1]] = value


def load_config(
    path: str | None,
    experiment: str | None = None,
    overrides: list[str] | None = None,
) -> dict:
    """Read, merge with defaults and validate one experiment configuration.

    Unknown keys are rejected (strict schema); the resolved config with all
    defaults filled is returned and later echoed into the output metadata.
    """
    if path is not None:
        try:
            with open(path, encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise ValidationError(f"cannot read config file {path}: {exc}") from exc
        try:
            user = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(
                f"config parse error at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
        if not isinstance(user, dict):
            raise ValidationError("config root must be a JSON object")
    else:
        user = {}

    for spec in overrides or ():
        _apply_override(user, spec)

    if experiment is not None:
        declared = user.get("experiment")
        if declared is not None and declared != experiment:
            raise ValidationError(
                f"config declares experiment '{declared}' but '{experiment}' was requested"
            )
        user["experiment"] = experiment
    if "experiment" not in user:
        raise ValidationError("no experiment selected")
    name = user["experiment"]
    if name not in EXPERIMENTS:
        raise ValidationError(f"unknown experiment '{name}'")

    defaults = copy.deepcopy(_DEFAULTS[name])
    user_model = user.get("model", {}) if isinstance(user.get("model", {}), dict) else {}
    # delta_e and detuning_ratio are alternative ways to fix the same knob:
    # a user choice of one displaces the default of the other
    if "delta_e" in user_model and "detuning_ratio" not in user_model:
        defaults.get("model", {}).pop("detuning_ratio", None)
    if "detuning_ratio" in user_model and "delta_e" not in user_model:
        defaults.get("model", {}).pop("delta_e", None)
    cfg = _deep_merge(defaults, user)
    try:
        jsonschema.validate(cfg, _schema())
    except jsonschema.ValidationError as exc:
        key = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"config key '{key}': {exc.message}") from exc

    expected_units = "lambda" if name not in _FLUX_EXPERIMENTS else "E_J"
    if cfg["units"] != expected_units:
        raise ValidationError(
            f"experiment '{name}' uses units '{expected_units}', config says '{cfg['units']}'"
        )
    if name in _FLUX_EXPERIMENTS and "model" in cfg:
        raise ValidationError(f"config key 'model' does not apply to experiment '{name}'")
    if name not in _FLUX_EXPERIMENTS and "flux" in cfg:
        raise ValidationError(f"config key 'flux' does not apply to experiment '{name}'")
    if name == "fnt-check" and "model" in cfg:
        raise ValidationError("config key 'model' does not apply to experiment 'fnt-check'")

    model = cfg.get("model", {})
    if "detuning_ratio" in model and "delta_e" in model:
        raise ValidationError("config keys model.delta_e and model.detuning_ratio are exclusive")
    if name in _FLUX_EXPERIMENTS:
        flux = cfg["flux"]
        if flux["f_start"] >= flux["f_stop"]:
            raise ValidationError("flux.f_start must be below flux.f_stop")
    return cfg


def _resolve_delta_e(model: dict) -> float:
    """delta_e either direct or from the requested detuning ratio."""
    if "delta_e" in model:
        return float(model["delta_e"])
    lam = float(model["lambda"])
    delta_c = float(model.get("delta_c", 0.0))
    ratio = float(model["detuning_ratio"])
    theta = math.atan2(2.0 * lam, delta_c)
    eps_plus = delta_c / 2.0 + math.hypot(lam, delta_c / 2.0)
    coupling = float(model["g"]) * max(math.sin(theta / 2.0), math.cos(theta / 2.0))
    return eps_plus + ratio * coupling


def _model_params(model: dict, delta_c: float | None = None) -> ModelParams:
    return ModelParams.from_detunings(
        delta_e=_resolve_delta_e(model),
        delta_c=float(model.get("delta_c", 0.0)) if delta_c is None else delta_c,
        g=float(model["g"]),
        G=float(model["G"]),
        lam=float(model["lambda"]),
    )


def run_fig5(cfg: dict) -> ResultTable:
    """Overlap exponent y(g t) for each mixing angle, with the Fock oracle.

    The time window spans ``periods`` full cycles of the slowest branch
    frequency among the angles; y columns use the closed form, y_fock
    columns the truncated coherent-state inner product.
    """
    model = cfg["model"]
    numerics = cfg["numerics"]
    thetas = tuple(model["thetas"]) if "thetas" in model else THETA_SETS[model["theta_set"]]
    dps = [
        dressed_params_from_theta(
            theta, float(model["delta_e"]), float(model["g"]), float(model["G"]), float(model["lambda"])
        )
        for theta in thetas
    ]
    t_end = float(numerics["periods"]) * 2.0 * math.pi / min(dp.omega_b for dp in dps)
    times = np.linspace(0.0, t_end, int(numerics["time_samples"]))
    gt = float(model["g"]) * times

    columns = ["gt"]
    series = [gt]
    oracle_dims = []
    for i, dp in enumerate(dps, start=1):
        columns.append(f"y_theta_{i}")
        series.append(overlap_y(dp, times))
    for i, dp in enumerate(dps, start=1):
        columns.append(f"y_fock_theta_{i}")
        series.append(fock_overlap_y(dp, times))
        oracle_dims.append(fock_overlap_fock_dim(dp, times))

    rows = [tuple(float(col[j]) for col in series) for j in range(times.shape[0])]
    return ResultTable(
        columns=tuple(columns),
        rows=rows,
        metadata=_metadata(cfg, thetas=list(thetas), oracle_fock_dims=oracle_dims),
    )


def run_cat(cfg: dict) -> ResultTable:
    """Exact-versus-effective cat generation from |b> and the vacuum."""
    model = cfg["model"]
    numerics = cfg["numerics"]
    params = _model_params(model)
    dp = dressed_params(params)
    space = HilbertSpace(int(numerics["fock_dim"]))
    t_end = float(numerics["periods"]) * 2.0 * math.pi / min(dp.omega_a, dp.omega_b)
    times = np.linspace(0.0, t_end, int(numerics["time_samples"]))

    traj = evolve_and_compare(params, space, space.basis_state(B, 0), times)
    alpha_plus, alpha_minus = branch_amplitudes(dp, times)
    obs = traj.observables
    series = [
        times,
        obs["fidelity"],
        obs["y"],
        obs["pop_b"],
        obs["pop_c"],
        obs["pop_e"],
        np.abs(alpha_plus),
        np.abs(alpha_minus),
    ]
    columns = ("t", "fidelity", "y", "pop_b", "pop_c", "pop_e", "alpha_plus_abs", "alpha_minus_abs")
    rows = [tuple(float(col[j]) for col in series) for j in range(times.shape[0])]
    return ResultTable(columns=columns, rows=rows, metadata=_metadata(cfg, delta_e=dp.delta_e))


def run_coherent(cfg: dict) -> ResultTable:
    """Photon number and generation rate on the |-> branch, exact and analytic."""
    model = cfg["model"]
    numerics = cfg["numerics"]
    dp = dressed_params(_model_params(model))
    fock_dim = int(numerics["fock_dim"])
    base_freq = dp.omega_b if dp.omega_b > 0 else dp.omega_a
    t_end = float(numerics["periods"]) * 2.0 * math.pi / base_freq
    times = np.linspace(0.0, t_end, int(numerics["time_samples"]))

    series = [
        times,
        photon_number(dp, times),
        minus_branch_photon_number(dp, fock_dim, times),
        generation_rate(dp, times),
        generation_rate_simple_prefactor(dp, times),
    ]
    columns = ("t", "N_analytic", "N_exact", "r_derivative", "r_paper")
    rows = [tuple(float(col[j]) for col in series) for j in range(times.shape[0])]
    return ResultTable(columns=columns, rows=rows, metadata=_metadata(cfg))


def _flux_scan(cfg: dict) -> tuple[np.ndarray, FluxParams, Grid2D, int]:
    flux = cfg["flux"]
    start, stop, step = float(flux["f_start"]), float(flux["f_stop"]), float(flux["f_step"])
    count = int(math.floor((stop - start) / step + 1.5))
    fs = start + step * np.arange(count)
    base = FluxParams(
        E_J=float(flux["E_J"]), alpha=float(flux["alpha"]), mass_ratio=float(flux["mass_ratio"])
    )
    grid = Grid2D(int(flux["grid"]), int(flux["grid"]))
    return fs, base, grid, int(flux["levels"])


def run_selection_rules(cfg: dict) -> ResultTable:
    """Flux-drive matrix elements and the cyclic product across the scan."""
    fs, base, grid, levels = _flux_scan(cfg)
    rows = []
    for f in fs:
        params = dataclasses.replace(base, f=float(f))
        lev = spectrum_2d(params, grid, k=levels)
        t = transition_elements(lev, params, grid)
        rows.append(
            (float(f), abs(t[0, 1]), abs(t[1, 2]), abs(t[2, 0]), cyclic_product(t))
        )
    columns = ("f", "|t_bc|", "|t_ce|", "|t_eb|", "|product|")
    return ResultTable(columns=columns, rows=rows, metadata=_metadata(cfg))


def run_spectrum(cfg: dict) -> ResultTable:
    """Lowest three flux-qubit levels across the flux scan."""
    fs, base, grid, levels = _flux_scan(cfg)
    rows = []
    for f in fs:
        params = dataclasses.replace(base, f=float(f))
        lev = spectrum_2d(params, grid, k=levels)
        rows.append((float(f), float(lev.energies[0]), float(lev.energies[1]), float(lev.energies[2])))
    columns = ("f", "E_b", "E_c", "E_e")
    return ResultTable(columns=columns, rows=rows, metadata=_metadata(cfg))


def run_fnt_check(cfg: dict) -> ResultTable:
    """Residual and second-order energy error over a randomized ensemble."""
    numerics = cfg["numerics"]
    rng = np.random.default_rng(int(cfg["seed"]))
    rows = []
    for index in range(int(numerics["fnt_instances"])):
        h, _, h1, gap = random_test_instance(
            rng, int(numerics["fnt_dim_max"]), float(numerics["fnt_ratio"])
        )
        result = eliminate(h, np.eye(h.shape[0], dtype=complex))
        exact = hermitian_eig(h).eigenvalues
        energy_error = float(np.max(np.abs(result.energies_2nd - exact)))
        ratio = float(np.linalg.norm(h1, 2) / gap)
        rows.append((index, ratio, result.residual, energy_error))
    columns = ("instance", "ratio", "residual", "energy_error")
    return ResultTable(columns=columns, rows=rows, metadata=_metadata(cfg))


_RUNNERS = {
    "fig5": run_fig5,
    "cat": run_cat,
    "coherent": run_coherent,
    "selection-rules": run_selection_rules,
    "spectrum": run_spectrum,
    "fnt-check": run_fnt_check,
}


def run_experiment(cfg: dict) -> ResultTable:
    """Dispatch a validated config to its experiment runner."""
    return _RUNNERS[cfg["experiment"]](cfg)


def _canonical_config(cfg: dict) -> str:
    return json.dumps(cfg, sort_keys=True, separators=(",", ":"))


def _metadata(cfg: dict, **extra) -> dict:
    canonical = _canonical_config(cfg)
    meta = {
        "version": __version__,
        "experiment": cfg["experiment"],
        "config": canonical,
        "config_sha256": hashlib.sha256(canonical.encode()).hexdigest(),
    }
    for key, value in extra.items():
        meta[key] = value
    return meta


def _format_value(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


def render_csv(table: ResultTable) -> str:
    lines = [f"# delta-atom {table.metadata['version']}"]
    for key, value in table.metadata.items():
        if key == "version":
            continue
        lines.append(f"# {key}: {json.dumps(value) if not isinstance(value, str) else value}")
    lines.append(",".join(table.columns))
    for row in table.rows:
        lines.append(",".join(_format_value(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(table: ResultTable, path: str) -> None:
    """Atomic write: temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    content = render_csv(table)
    fd, tmp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(content)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.unlink(tmp_path)
        raise


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="delta-atom",
        description="Cyclic three-level atom experiments; emits deterministic CSV tables.",
    )
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", help="JSON config file (defaults used when omitted)")
    parser.add_argument("--out", help="output CSV path (default: <experiment>.csv)")
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config entry, dotted keys allowed (e.g. model.delta_e=4)",
    )
    parser.add_argument(
        "--plot",
        action="store_true",
        help="also render a figure next to the CSV (same name, .png)",
    )
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, experiment=args.experiment, overrides=args.override)
        table = run_experiment(cfg)
        out_path = args.out or cfg.get("output_path") or f"{args.experiment}.csv"
        write_csv(table, out_path)
        if args.plot:
            from . import plotting

            figure_path = os.path.splitext(out_path)[0] + ".png"
            plotting.render(table, figure_path)
            print(f"wrote {figure_path}")
        print(f"wrote {out_path} ({len(table.rows)} rows)")
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericsError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
