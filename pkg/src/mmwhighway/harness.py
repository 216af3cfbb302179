"""Experiment configuration, sweep driver and CSV emission.

Configs are JSON (human-editable, nested keys); dB and degrees at this
boundary only. Unknown keys are rejected so misspellings cannot silently
fall back to defaults.
"""

import csv
import dataclasses
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .coverage import OutageQuery, OutageVariant, outage_probability, rate_coverage
from .association import association_probabilities
from .mcsim import (
    SimConfig,
    estimate_association,
    estimate_outage_grid,
    estimate_rate_coverage,
)
from .numerics import QuadratureSpec
from .scenario import DeploymentConfig, RoadLayout, db_to_linear, make_radio_config

__all__ = [
    "ConfigError",
    "Experiment",
    "ResultRow",
    "emit_csv",
    "load_config",
    "parse_config",
    "read_csv",
    "run_experiment",
    "PRESETS",
]

SWEEP_AXES = ("theta_db", "kappa", "lambda_BS", "psi", "G_TX_db")
CURVES = (
    "P_T_theory",
    "P_T_sim",
    "R_C_theory",
    "R_C_sim",
    "P_L_theory",
    "P_L_sim",
)
CSV_COLUMNS = ("axis_value", "curve", "value", "ci_low", "ci_high", "n")


class ConfigError(ValueError):
    pass


# Table of defaults used throughout the validation campaign: 28 GHz carrier,
# free-space intercepts at 1 m, double-decker-bus blockages, British speed
# caps, 98% confidence intervals.
PRESETS = {
    "paper_defaults": {
        "road": {
            "lane_width": 3.7,
            "n_obstacle_lanes": 1,
            "obstacle_densities": [1e-2],
            "blockage_length": 11.2,
            "blockage_width": 0.0,
        },
        "radio": {
            "carrier_hz": 28e9,
            "alpha_los": 2.8,
            "alpha_nlos": 4.0,
            "nakagami_m": 3,
            "beamwidth_deg": 30.0,
            "g_tx_main_db": 20.0,
            "g_tx_side_db": -10.0,
            "g_rx_main_db": 10.0,
            "g_rx_side_db": -10.0,
            "bandwidth_hz": 100e6,
            "tx_power_dbm": 27.0,
            "temperature_k": 290.0,
        },
        "deployment": {"lambda_bs": 4e-3, "q": 0.5},
        "sim": {
            "half_length_r": 10_000.0,
            "epsilon": 1e-7,
            "n_trials": 50,
            "seed": 1,
            "snapshot_dt": 0.5,
            "snapshots_per_trial": 200,
            "warmup_s": 60.0,
            "lambda_u": 2e-2,
            "user_max_speed": 112.0 / 3.6,
            "blockage_max_speed": 96.0 / 3.6,
            "max_accel": 5.3,
            "max_decel": 5.3,
            "dawdle_sigma": 0.5,
            "mobility_dt": 0.1,
            "user_vehicle_length": 4.8,
            "temperature_k": 290.0,
        },
        "sweep": {"axis": "theta_db", "grid": [-5, 0, 5, 10, 15, 20, 25, 30]},
        "curves": ["P_T_theory"],
        "gates": {},
        "quadrature": {"abs_tol": 1e-9, "rel_tol": 1e-7, "max_subdivisions": 200},
        "variant": "full",
    }
}

_SECTION_KEYS = {
    "preset": None,
    "road": set(PRESETS["paper_defaults"]["road"]),
    "radio": set(PRESETS["paper_defaults"]["radio"]),
    "deployment": {"lambda_bs", "q"},
    "sim": set(PRESETS["paper_defaults"]["sim"]),
    "sweep": {"axis", "grid"},
    "curves": None,
    "gates": {"mse"},
    "quadrature": {"abs_tol", "rel_tol", "max_subdivisions"},
    "variant": None,
}


@dataclass(frozen=True)
class Experiment:
    layout: RoadLayout
    radio_kwargs: dict
    lambda_bs: float
    q: float
    sim: SimConfig
    axis: str
    grid: tuple
    curves: tuple
    gates: dict = field(default_factory=dict)
    quad: QuadratureSpec = QuadratureSpec()
    variant: OutageVariant = OutageVariant.FULL

    def radio(self, **overrides):
        kwargs = dict(self.radio_kwargs)
        kwargs.update(overrides)
        return make_radio_config(**kwargs)

    def deployment(self, lambda_bs=None):
        return DeploymentConfig.from_layout(
            self.lambda_bs if lambda_bs is None else lambda_bs, self.layout, self.q
        )


@dataclass(frozen=True)
class ResultRow:
    axis_value: float  # nan for summary rows
    curve: str
    value: float
    ci_low: float
    ci_high: float
    n: int


def _require_number(section, key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key}: expected a number, got {value!r}")
    return float(value)


def _merge(base, override, path=""):
    out = dict(base)
    for key, value in override.items():
        if key not in base:
            raise ConfigError(f"unknown config key {path}{key!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"{path}{key}: expected an object")
            out[key] = _merge(base[key], value, f"{path}{key}.")
        else:
            out[key] = value
    return out


def parse_config(data):
    """Build an Experiment from a raw (already JSON-decoded) config dict."""
    if not isinstance(data, dict):
        raise ConfigError("top-level config must be an object")
    unknown = set(data) - set(_SECTION_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")

    preset_name = data.get("preset", "paper_defaults")
    if preset_name not in PRESETS:
        raise ConfigError(f"unknown preset {preset_name!r}")
    merged = _merge(
        PRESETS[preset_name], {k: v for k, v in data.items() if k != "preset"}
    )

    road = merged["road"]
    for key in ("lane_width", "blockage_length", "blockage_width"):
        _require_number("road", key, road[key])
    densities = road["obstacle_densities"]
    if not isinstance(densities, (list, tuple)):
        raise ConfigError("road.obstacle_densities: expected a list")
    layout = RoadLayout(
        lane_width=float(road["lane_width"]),
        n_obstacle_lanes=int(road["n_obstacle_lanes"]),
        obstacle_densities=tuple(
            _require_number("road", "obstacle_densities", d) for d in densities
        ),
        blockage_length=float(road["blockage_length"]),
        blockage_width=float(road["blockage_width"]),
    )

    radio_cfg = dict(merged["radio"])
    for key, value in radio_cfg.items():
        if key != "nakagami_m":
            radio_cfg[key] = _require_number("radio", key, value)
    radio_cfg["nakagami_m"] = int(radio_cfg["nakagami_m"])

    dep_cfg = merged["deployment"]
    lambda_bs = _require_number("deployment", "lambda_bs", dep_cfg["lambda_bs"])
    q = _require_number("deployment", "q", dep_cfg["q"])

    sim_cfg = dict(merged["sim"])
    for key, value in sim_cfg.items():
        if key in ("n_trials", "seed", "snapshots_per_trial"):
            sim_cfg[key] = int(value)
        else:
            sim_cfg[key] = _require_number("sim", key, value)
    sim = SimConfig(**sim_cfg)

    sweep = merged["sweep"]
    axis = sweep["axis"]
    if axis not in SWEEP_AXES:
        raise ConfigError(f"sweep.axis must be one of {SWEEP_AXES}, got {axis!r}")
    grid = sweep["grid"]
    if not isinstance(grid, (list, tuple)) or not grid:
        raise ConfigError("sweep.grid must be a non-empty list")
    grid = tuple(_require_number("sweep", "grid", g) for g in grid)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("sweep.grid must be strictly increasing")

    curves = merged["curves"]
    if not isinstance(curves, (list, tuple)) or not curves:
        raise ConfigError("curves must be a non-empty list")
    bad = set(curves) - set(CURVES)
    if bad:
        raise ConfigError(f"unknown curve(s): {sorted(bad)}")

    gates = dict(merged["gates"])
    if "mse" in gates:
        gates["mse"] = _require_number("gates", "mse", gates["mse"])

    quad_cfg = merged["quadrature"]
    quad = QuadratureSpec(
        abs_tol=_require_number("quadrature", "abs_tol", quad_cfg["abs_tol"]),
        rel_tol=_require_number("quadrature", "rel_tol", quad_cfg["rel_tol"]),
        max_subdivisions=int(quad_cfg["max_subdivisions"]),
    )

    try:
        variant = OutageVariant(merged["variant"])
    except ValueError as exc:
        raise ConfigError(f"unknown variant {merged['variant']!r}") from exc

    try:
        experiment = Experiment(
            layout=layout,
            radio_kwargs=radio_cfg,
            lambda_bs=lambda_bs,
            q=q,
            sim=sim,
            axis=axis,
            grid=grid,
            curves=tuple(curves),
            gates=gates,
            quad=quad,
            variant=variant,
        )
        experiment.radio().validate_against(layout)
        experiment.deployment()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return experiment


def load_config(path):
    """Parse a JSON experiment config; errors carry line numbers and keys."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"
            ) from exc
    return parse_config(data)


def experiment_to_dict(e):
    """Round-trippable plain representation of an Experiment."""
    return {
        "road": {
            "lane_width": e.layout.lane_width,
            "n_obstacle_lanes": e.layout.n_obstacle_lanes,
            "obstacle_densities": list(e.layout.obstacle_densities),
            "blockage_length": e.layout.blockage_length,
            "blockage_width": e.layout.blockage_width,
        },
        "radio": dict(e.radio_kwargs),
        "deployment": {"lambda_bs": e.lambda_bs, "q": e.q},
        "sim": dataclasses.asdict(e.sim),
        "sweep": {"axis": e.axis, "grid": list(e.grid)},
        "curves": list(e.curves),
        "gates": dict(e.gates),
        "quadrature": {
            "abs_tol": e.quad.abs_tol,
            "rel_tol": e.quad.rel_tol,
            "max_subdivisions": e.quad.max_subdivisions,
        },
        "variant": e.variant.value,
    }


def _point_scenario(e, axis_value):
    """Radio/deployment/threshold pieces for one grid point."""
    radio_overrides = {}
    lambda_bs = None
    theta = None
    kappa = None
    if e.axis == "theta_db":
        theta = db_to_linear(axis_value)
    elif e.axis == "kappa":
        kappa = axis_value
    elif e.axis == "lambda_BS":
        lambda_bs = axis_value
        theta = 1.0  # callers using theta curves on a density sweep: 0 dB
    elif e.axis == "psi":
        radio_overrides["beamwidth_deg"] = axis_value
        theta = 1.0
    elif e.axis == "G_TX_db":
        radio_overrides["g_tx_main_db"] = axis_value
        theta = 1.0
    radio = e.radio(**radio_overrides)
    dep = e.deployment(lambda_bs)
    return radio, dep, theta, kappa


def _theory_value(curve, e, radio, dep, theta, kappa):
    if curve == "P_T_theory":
        query = OutageQuery(theta=theta, variant=e.variant)
        return outage_probability(query, dep, radio, e.layout, e.quad)
    if curve == "R_C_theory":
        return rate_coverage(kappa, dep, radio, e.layout, e.variant, e.quad)
    if curve == "P_L_theory":
        return association_probabilities(dep, radio, e.layout, e.quad).p_los
    raise ValueError(f"not a theory curve: {curve}")


def run_experiment(e, n_workers=1):
    """Evaluate every requested curve on the grid; returns ResultRow list.

    Simulation curves for a whole theta/kappa sweep share one Monte Carlo
    run. Failed points are recorded as NaN rows and the run continues. When
    theory/sim curve pairs are present, one summary MSE row per pair is
    appended; summary rows carry NaN as their axis value.
    """
    rows = []
    failures = []

    sim_series = {}
    if e.axis == "theta_db" and "P_T_sim" in e.curves:
        thetas = [db_to_linear(g) for g in e.grid]
        ests = estimate_outage_grid(
            thetas, e.layout, e.radio(), e.deployment(), e.sim, n_workers
        )
        sim_series["P_T_sim"] = dict(zip(e.grid, ests))
    if e.axis == "kappa" and "R_C_sim" in e.curves:
        thetas = [2.0 ** (g / e.radio().bandwidth_hz) - 1.0 for g in e.grid]
        ests = estimate_outage_grid(
            thetas, e.layout, e.radio(), e.deployment(), e.sim, n_workers
        )
        sim_series["R_C_sim"] = {
            g: dataclasses.replace(
                est,
                value=1.0 - est.value,
                ci_low=1.0 - est.ci_high,
                ci_high=1.0 - est.ci_low,
            )
            for g, est in zip(e.grid, ests)
        }

    def point_rows(axis_value):
        out = []
        radio, dep, theta, kappa = _point_scenario(e, axis_value)
        for curve in e.curves:
            try:
                if curve in sim_series:
                    est = sim_series[curve][axis_value]
                    out.append(
                        ResultRow(axis_value, curve, est.value, est.ci_low,
                                  est.ci_high, est.n)
                    )
                elif curve.endswith("_theory"):
                    value = _theory_value(curve, e, radio, dep, theta, kappa)
                    out.append(ResultRow(axis_value, curve, value, value, value, 0))
                elif curve == "P_L_sim":
                    est = estimate_association(e.layout, radio, dep, e.sim)
                    out.append(
                        ResultRow(axis_value, curve, est.value, est.ci_low,
                                  est.ci_high, est.n)
                    )
                elif curve == "P_T_sim":
                    ests = estimate_outage_grid(
                        [theta], e.layout, radio, dep, e.sim
                    )
                    est = ests[0]
                    out.append(
                        ResultRow(axis_value, curve, est.value, est.ci_low,
                                  est.ci_high, est.n)
                    )
                elif curve == "R_C_sim":
                    est = estimate_rate_coverage(kappa, e.layout, radio, dep, e.sim)
                    out.append(
                        ResultRow(axis_value, curve, est.value, est.ci_low,
                                  est.ci_high, est.n)
                    )
                else:
                    raise ValueError(f"unknown curve {curve!r}")
            except Exception as exc:  # noqa: BLE001 - per-point isolation
                failures.append((axis_value, curve, exc))
                out.append(
                    ResultRow(axis_value, curve, math.nan, math.nan, math.nan, 0)
                )
        return out

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            for chunk in pool.map(point_rows, e.grid):
                rows.extend(chunk)
    else:
        for axis_value in e.grid:
            rows.extend(point_rows(axis_value))

    for theory, sim_curve in (
        ("P_T_theory", "P_T_sim"),
        ("R_C_theory", "R_C_sim"),
        ("P_L_theory", "P_L_sim"),
    ):
        if theory in e.curves and sim_curve in e.curves:
            pairs = _paired_values(rows, theory, sim_curve)
            if pairs:
                mse = math.fsum((t - s) ** 2 for t, s in pairs) / len(pairs)
                rows.append(
                    ResultRow(math.nan, f"MSE({theory},{sim_curve})", mse,
                              mse, mse, len(pairs))
                )

    if failures:
        import warnings

        for axis_value, curve, exc in failures:
            warnings.warn(f"grid point {axis_value} curve {curve}: {exc}")
    return rows


def _paired_values(rows, theory, sim_curve):
    theory_map = {r.axis_value: r.value for r in rows if r.curve == theory}
    pairs = []
    for r in rows:
        if r.curve == sim_curve and r.axis_value in theory_map:
            t, s = theory_map[r.axis_value], r.value
            if not (math.isnan(t) or math.isnan(s)):
                pairs.append((t, s))
    return pairs


def mse_gate_failures(rows, gates):
    """Summary MSE rows exceeding the configured gate, if any."""
    if "mse" not in gates:
        return []
    limit = gates["mse"]
    return [r for r in rows if r.curve.startswith("MSE(") and r.value > limit]


def _format_cell(value):
    if value is None:
        return ""
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return repr(value) if isinstance(value, float) else str(value)


def emit_csv(rows, path):
    """Write result rows with the fixed column order and a header."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    _format_cell(r.axis_value),
                    r.curve,
                    _format_cell(r.value),
                    _format_cell(r.ci_low),
                    _format_cell(r.ci_high),
                    r.n,
                ]
            )


def read_csv(path):
    """Parse a result CSV back into ResultRow records."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ConfigError(f"unexpected CSV header {header!r}")
        for rec in reader:
            rows.append(
                ResultRow(
                    axis_value=float(rec[0]),
                    curve=rec[1],
                    value=float(rec[2]),
                    ci_low=float(rec[3]),
                    ci_high=float(rec[4]),
                    n=int(rec[5]),
                )
            )
    return rows
