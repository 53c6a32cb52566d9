"""Experiment configuration, orchestration, and output artifacts.

Configs are JSON trees with one experiment per file.  Omitted fields
fall back to the reference deployment parameters (macro power 60 dBm,
small-cell 26 dBm, uplink target 20 dBm, noise -93 dBm, spacing 1 km,
4 rings, 10 small cells per square km, outdoor attenuation 130 dB,
path-loss exponent 3.5).  Unknown keys anywhere in the tree are
rejected so typos cannot silently revert a parameter to its default.
"""

import dataclasses
import json
import math
import os
import subprocess
import time

import numpy as np

from . import hexgrid, macro_analytic, ppp_model, rng, specfun
from .errors import ConfigError
from .params import (
    CoverageCurve,
    MacroNetwork,
    MobilePolar,
    PropagationParams,
    TddMix,
    check_gamma_grid,
)
from .ppp_model import QuadratureControl, SmallCellScenario
from .specfun import SeriesControl

_GEOMETRIES = ("macro", "ppp")
_DIRECTIONS = ("dl", "ul")
_MODES = ("analytic", "mc", "both")
_EXPERIMENTS = ("coverage", "isr", "ase")


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    """One fully resolved experiment: what to compute and with which
    model parameters.  Build instances through load_config or
    config_from_dict so every field is validated."""

    geometry: str = "macro"
    experiment: str = "coverage"
    direction: str = "dl"
    mode: str = "analytic"
    prop: PropagationParams = PropagationParams()
    mix: TddMix = TddMix()
    macro: MacroNetwork = MacroNetwork()
    lam: float = 10.0
    window_radius: float | None = None
    p_small_dbm: float = 26.0
    p_small_star_dbm: float = 20.0
    gamma_grid_db: tuple = tuple(np.arange(-30.0, 30.5, 1.0))
    x_grid: tuple = tuple(np.round(np.arange(0.02, 0.401, 0.02), 10))
    lambda_grid: tuple = (5.0, 10.0, 20.0, 50.0)
    n_draws: int = 20000
    seed: int = 1
    out: str | None = None
    label: str | None = None
    plot_script: bool = False
    series: SeriesControl = SeriesControl()
    quadrature: QuadratureControl = QuadratureControl()

    def scenario(self):
        """SmallCellScenario assembled from the point-process fields."""
        return SmallCellScenario(
            lam=self.lam,
            window_radius=self.window_radius,
            p_small_dbm=self.p_small_dbm,
            p_small_star_dbm=self.p_small_star_dbm,
            prop=self.prop,
            mix=self.mix,
        )


_GROUP_FIELDS = {
    "propagation": (PropagationParams, ("two_b", "a_db", "k", "p_dl_dbm", "p_star_dbm", "p_noise_dbm")),
    "mix": (TddMix, ("alpha_d",)),
    "macro": (MacroNetwork, ("delta", "cell_radius", "rings", "load_eta")),
    "ppp": (None, ("lam", "window_radius", "p_small_dbm", "p_small_star_dbm")),
    "series": (SeriesControl, ("rel_tol", "max_terms")),
    "quadrature": (
        QuadratureControl,
        (
            "inner_abs_tol",
            "outer_abs_tol",
            "n_theta",
            "n_rho",
            "n_x",
            "n_serving",
            "n_ase",
            "ase_panel_width",
            "ase_rel_tol",
            "max_panels",
            "max_refinements",
            "refine",
        ),
    ),
}

_TOP_FIELDS = (
    "geometry",
    "experiment",
    "direction",
    "mode",
    "gamma_grid_db",
    "x_grid",
    "lambda_grid",
    "n_draws",
    "seed",
    "out",
    "label",
    "plot_script",
) + tuple(_GROUP_FIELDS)


def _parse_grid(value, name, errors):
    """Grids are either explicit lists or {start, stop, step} ranges."""
    if isinstance(value, dict):
        unknown = set(value) - {"start", "stop", "step"}
        if unknown:
            errors.append(f"{name}: unknown range keys {sorted(unknown)}")
            return None
        try:
            start, stop, step = float(value["start"]), float(value["stop"]), float(value["step"])
        except (KeyError, TypeError, ValueError):
            errors.append(f"{name}: range needs numeric start, stop, step")
            return None
        if step <= 0:
            errors.append(f"{name}: step must be positive")
            return None
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(np.round(start + step * np.arange(max(n, 0)), 12))
    if isinstance(value, (list, tuple)):
        try:
            return tuple(float(v) for v in value)
        except (TypeError, ValueError):
            errors.append(f"{name}: entries must be numbers")
            return None
    errors.append(f"{name}: expected a list or a start/stop/step object")
    return None


def _build_group(name, cls, fields, data, errors):
    kwargs = {}
    unknown = set(data) - set(fields)
    if unknown:
        errors.append(f"{name}: unknown keys {sorted(unknown)}")
    for key in fields:
        if key in data:
            kwargs[key] = data[key]
    if cls is None:
        return kwargs
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        errors.append(f"{name}: {exc}")
        return cls()


def config_from_dict(data):
    """Validate a config tree and return the resolved ExperimentConfig.

    Every problem found is reported in one ConfigError, one line per
    item, so a bad file surfaces all its mistakes at once.
    """
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    errors = []
    unknown = set(data) - set(_TOP_FIELDS)
    if unknown:
        errors.append(f"unknown top-level keys: {sorted(unknown)}")

    kwargs = {}
    for key, allowed in (
        ("geometry", _GEOMETRIES),
        ("experiment", _EXPERIMENTS),
        ("direction", _DIRECTIONS),
        ("mode", _MODES),
    ):
        if key in data:
            value = str(data[key]).lower()
            if value not in allowed:
                errors.append(f"{key}: must be one of {list(allowed)}, got {data[key]!r}")
            else:
                kwargs[key] = value

    for name, target in (("propagation", "prop"), ("mix", "mix"), ("macro", "macro"),
                         ("series", "series"), ("quadrature", "quadrature")):
        if name in data:
            if not isinstance(data[name], dict):
                errors.append(f"{name}: expected an object")
                continue
            cls, fields = _GROUP_FIELDS[name]
            kwargs[target] = _build_group(name, cls, fields, data[name], errors)

    if "ppp" in data:
        if not isinstance(data["ppp"], dict):
            errors.append("ppp: expected an object")
        else:
            _, fields = _GROUP_FIELDS["ppp"]
            kwargs.update(_build_group("ppp", None, fields, data["ppp"], errors))

    for key in ("gamma_grid_db", "x_grid", "lambda_grid"):
        if key in data:
            grid = _parse_grid(data[key], key, errors)
            if grid is not None:
                kwargs[key] = grid

    for key, kind in (("n_draws", int), ("seed", int)):
        if key in data:
            if isinstance(data[key], bool) or not isinstance(data[key], int):
                errors.append(f"{key}: must be an integer")
            else:
                kwargs[key] = kind(data[key])
    if "n_draws" in kwargs and kwargs["n_draws"] < 1:
        errors.append("n_draws: must be at least 1")
    if "seed" in kwargs and kwargs["seed"] < 0:
        errors.append("seed: must be non-negative")

    for key in ("out", "label"):
        if key in data:
            if data[key] is not None and not isinstance(data[key], str):
                errors.append(f"{key}: must be a string")
            else:
                kwargs[key] = data[key]
    if "plot_script" in data:
        if not isinstance(data["plot_script"], bool):
            errors.append("plot_script: must be true or false")
        else:
            kwargs["plot_script"] = data["plot_script"]

    if errors:
        raise ConfigError("invalid config:\n  " + "\n  ".join(errors))

    cfg = ExperimentConfig(**kwargs)
    _check_semantics(cfg, errors)
    if errors:
        raise ConfigError("invalid config:\n  " + "\n  ".join(errors))
    return cfg


def _check_semantics(cfg, errors):
    if cfg.experiment == "coverage":
        try:
            check_gamma_grid(np.asarray(cfg.gamma_grid_db))
        except ConfigError as exc:
            errors.append(str(exc))
    if cfg.experiment == "isr":
        if cfg.geometry != "macro":
            errors.append("isr experiments require geometry=macro")
        if cfg.mode != "analytic":
            errors.append("isr experiments are analytic only")
        if any(x <= 0 for x in cfg.x_grid):
            errors.append("x_grid: distances must be positive")
        if list(cfg.x_grid) != sorted(set(cfg.x_grid)):
            errors.append("x_grid: must be strictly increasing")
    if cfg.experiment == "ase":
        if cfg.geometry != "ppp":
            errors.append("ase experiments require geometry=ppp")
        if any(l <= 0 for l in cfg.lambda_grid):
            errors.append("lambda_grid: densities must be positive")
        if list(cfg.lambda_grid) != sorted(set(cfg.lambda_grid)):
            errors.append("lambda_grid: must be strictly increasing")
    if cfg.lam <= 0:
        errors.append("ppp.lam: density must be positive")
    if cfg.window_radius is not None and cfg.window_radius <= 0:
        errors.append("ppp.window_radius: must be positive when given")


def load_config(path):
    """Read a JSON config file; an empty file means all defaults."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not text.strip():
        return ExperimentConfig()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def dump_config(cfg):
    """Normalized dict form of a config: every field materialized, in
    schema order, so dump(load(x)) is the canonical form of x."""
    return {
        "geometry": cfg.geometry,
        "experiment": cfg.experiment,
        "direction": cfg.direction,
        "mode": cfg.mode,
        "propagation": dataclasses.asdict(cfg.prop),
        "mix": dataclasses.asdict(cfg.mix),
        "macro": dataclasses.asdict(cfg.macro),
        "ppp": {
            "lam": cfg.lam,
            "window_radius": cfg.window_radius,
            "p_small_dbm": cfg.p_small_dbm,
            "p_small_star_dbm": cfg.p_small_star_dbm,
        },
        "series": dataclasses.asdict(cfg.series),
        "quadrature": dataclasses.asdict(cfg.quadrature),
        "gamma_grid_db": list(cfg.gamma_grid_db),
        "x_grid": list(cfg.x_grid),
        "lambda_grid": list(cfg.lambda_grid),
        "n_draws": cfg.n_draws,
        "seed": cfg.seed,
        "out": cfg.out,
        "label": cfg.label,
        "plot_script": cfg.plot_script,
    }


def _format_value(x):
    if isinstance(x, float):
        return repr(float(x))
    return str(x)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_format_value(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _version_string():
    from . import __version__

    root = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
    try:
        described = subprocess.run(
            ["git", "-C", root, "describe", "--always", "--dirty"],
            capture_output=True, text=True, timeout=5,
        )
        if described.returncode == 0:
            return f"{__version__}+g{described.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def _coverage_rows(cfg):
    grid = np.asarray(cfg.gamma_grid_db)
    columns = {}
    if cfg.mode in ("analytic", "both"):
        if cfg.geometry == "macro":
            values = np.array([
                macro_analytic.coverage_macro(
                    g, cfg.direction, cfg.macro, cfg.prop, cfg.mix, ctrl=cfg.series)
                for g in grid
            ])
        else:
            fn = ppp_model.coverage_ppp_dl if cfg.direction == "dl" else ppp_model.coverage_ppp_ul
            values = np.array([fn(g, cfg.scenario(), cfg.quadrature) for g in grid])
        columns["analytic"] = CoverageCurve(grid, values, np.zeros_like(values))
    if cfg.mode in ("mc", "both"):
        if cfg.geometry == "macro":
            curve = hexgrid.mc_coverage_macro(
                cfg.macro, cfg.prop, cfg.mix, cfg.direction, grid, cfg.n_draws, cfg.seed)
        else:
            curve = ppp_model.mc_coverage_ppp(
                cfg.scenario(), cfg.direction, grid, cfg.n_draws, cfg.seed)
        columns["mc"] = curve

    if cfg.mode == "both":
        header = ["gamma_db", "value_analytic", "ci_halfwidth_analytic", "value_mc", "ci_halfwidth_mc"]
        rows = [
            (g, columns["analytic"].value[i], 0.0, columns["mc"].value[i], columns["mc"].ci_halfwidth[i])
            for i, g in enumerate(grid)
        ]
    else:
        curve = columns["analytic" if cfg.mode == "analytic" else "mc"]
        header = ["gamma_db", "value", "ci_halfwidth"]
        rows = [(g, curve.value[i], curve.ci_halfwidth[i]) for i, g in enumerate(grid)]
    return header, rows


def _isr_rows(cfg):
    rows = []
    for x in cfg.x_grid:
        m = MobilePolar(r=float(x))
        parts = macro_analytic.isr_total(m, cfg.macro, cfg.prop, cfg.mix, ctrl=cfg.series)
        if cfg.direction == "dl":
            components = (
                ("dl_to_dl", parts.dl_to_dl),
                ("ul_to_dl", parts.ul_to_dl),
                ("total", parts.total_dl),
            )
        else:
            components = (
                ("ul_to_ul", parts.ul_to_ul),
                ("dl_to_ul", parts.dl_to_ul),
                ("total", parts.total_ul),
            )
        for name, value in components:
            rows.append((float(x), name, value))
    return ["x", "isr_component", "value"], rows


def _ase_rows(cfg):
    rows = []
    for lam in cfg.lambda_grid:
        scenario = SmallCellScenario(
            lam=float(lam),
            window_radius=cfg.window_radius,
            p_small_dbm=cfg.p_small_dbm,
            p_small_star_dbm=cfg.p_small_star_dbm,
            prop=cfg.prop,
            mix=cfg.mix,
        )
        if cfg.mode in ("analytic", "both"):
            value = ppp_model.ase(scenario, cfg.direction, cfg.quadrature)
        if cfg.mode in ("mc", "both"):
            sinr = ppp_model.mc_sinr_ppp(scenario, cfg.direction, cfg.n_draws, cfg.seed)
            eff = np.log2(1.0 + sinr)
            mc_value = float(eff.mean())
            mc_ci = float(1.96 * eff.std(ddof=1) / math.sqrt(len(eff)))
        if cfg.mode == "analytic":
            rows.append((float(lam), value, 0.0))
        elif cfg.mode == "mc":
            rows.append((float(lam), mc_value, mc_ci))
        else:
            rows.append((float(lam), value, 0.0, mc_value, mc_ci))
    if cfg.mode == "both":
        return ["lambda", "ase_analytic", "ci_halfwidth_analytic", "ase_mc", "ci_halfwidth_mc"], rows
    return ["lambda", "ase", "ci_halfwidth"], rows


_PLOT_TEMPLATE = """set datafile separator ","
set key autotitle columnhead
set grid
set xlabel "{xlabel}"
set ylabel "{ylabel}"
plot {plots}
"""


def _plot_script_text(csv_name, header):
    value_cols = [i + 1 for i, name in enumerate(header[1:], start=1) if "ci_" not in name and name != "isr_component"]
    plots = ", ".join(f'"{csv_name}" using 1:{c} with lines' for c in value_cols)
    if not plots:
        plots = f'"{csv_name}" using 1:2 with lines'
    ylabel = {"gamma_db": "coverage probability", "x": "interference to signal ratio", "lambda": "ASE (bit/s/Hz)"}
    return _PLOT_TEMPLATE.format(xlabel=header[0], ylabel=ylabel.get(header[0], "value"), plots=plots)


def run(cfg, out_dir=None, label=None):
    """Execute one experiment and write its CSV plus metadata sidecar.

    Returns the CSV path.  The output directory resolves in order:
    explicit argument, config field, TDDGEOM_OUT, current directory.
    """
    out = out_dir or cfg.out or os.environ.get("TDDGEOM_OUT") or "."
    os.makedirs(out, exist_ok=True)
    name = label or cfg.label or f"{cfg.geometry}-{cfg.experiment}-{cfg.direction}"

    start = time.time()
    if cfg.experiment == "coverage":
        header, rows = _coverage_rows(cfg)
    elif cfg.experiment == "isr":
        header, rows = _isr_rows(cfg)
    else:
        header, rows = _ase_rows(cfg)
    wall = time.time() - start

    csv_path = os.path.join(out, f"{name}.csv")
    _write_csv(csv_path, header, rows)
    meta = {
        "config": dump_config(cfg),
        "seed": cfg.seed,
        "version": _version_string(),
        "wall_time_s": round(wall, 3),
    }
    with open(os.path.join(out, f"{name}.meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=False)
        fh.write("\n")
    if cfg.plot_script:
        with open(os.path.join(out, f"{name}.gp"), "w", encoding="utf-8") as fh:
            fh.write(_plot_script_text(os.path.basename(csv_path), header))
    return csv_path


def _recipe_entries():
    """Built-in experiments named after the figures they mirror; each
    name maps to a list of (label, config dict) pairs."""
    fast_quad = {"n_theta": 16, "n_rho": 32, "n_x": 24, "n_serving": 24,
                 "inner_abs_tol": 1e-5, "outer_abs_tol": 1e-4, "ase_rel_tol": 1e-3}
    recipes = {}
    recipes["fig1-isr-dl"] = [(
        "fig1-isr-dl",
        {"geometry": "macro", "experiment": "isr", "direction": "dl",
         "mix": {"alpha_d": 0.5}, "series": {"max_terms": 600}},
    )]
    recipes["fig2-isr-ul"] = [(
        "fig2-isr-ul",
        {"geometry": "macro", "experiment": "isr", "direction": "ul",
         "mix": {"alpha_d": 0.5}, "series": {"max_terms": 600}},
    )]
    recipes["fig4-cov-dl-macro"] = [(
        "fig4-cov-dl-macro",
        {"geometry": "macro", "experiment": "coverage", "direction": "dl",
         "mode": "both", "mix": {"alpha_d": 0.5}},
    )]
    recipes["fig5-cov-ul-macro"] = [(
        "fig5-cov-ul-macro",
        {"geometry": "macro", "experiment": "coverage", "direction": "ul",
         "mode": "both", "mix": {"alpha_d": 0.5}, "propagation": {"k": 0.0}},
    )]
    recipes["fig6-fpc"] = [
        (
            f"fig6-fpc-{direction}-k{str(k).replace('.', '')}",
            {"geometry": "macro", "experiment": "coverage", "direction": direction,
             "mode": "analytic", "mix": {"alpha_d": 0.5}, "propagation": {"k": k},
             "gamma_grid_db": {"start": -20.0, "stop": 10.0, "step": 1.0}},
        )
        for direction in ("dl", "ul")
        for k in (0.0, 0.4, 0.8, 1.0)
    ]
    for fig, direction in (("fig7-cov-dl-ppp", "dl"), ("fig8-cov-ul-ppp", "ul")):
        recipes[fig] = [
            (
                f"{fig}-{env}-{tdd}",
                {"geometry": "ppp", "experiment": "coverage", "direction": direction,
                 "mode": "both", "mix": {"alpha_d": alpha},
                 "propagation": {"a_db": a_db},
                 "gamma_grid_db": {"start": -20.0, "stop": 20.0, "step": 2.0},
                 "quadrature": fast_quad},
            )
            for env, a_db in (("outdoor", 130.0), ("indoor", 160.0))
            for tdd, alpha in (("stdd", 1.0), ("dtdd", 0.5))
        ]
    for fig, direction in (("fig9-ase-dl", "dl"), ("fig10-ase-ul", "ul")):
        recipes[fig] = [
            (
                f"{fig}-{env}-{tdd}",
                {"geometry": "ppp", "experiment": "ase", "direction": direction,
                 "mix": {"alpha_d": alpha}, "propagation": {"a_db": a_db},
                 "quadrature": fast_quad},
            )
            for env, a_db in (("outdoor", 130.0), ("indoor", 160.0))
            for tdd, alpha in (("stdd", 1.0), ("dtdd", 0.5))
        ]
    return recipes


RECIPES = _recipe_entries()


def run_recipe(name, out_dir=None, seed=None):
    """Run every experiment of a built-in recipe; returns CSV paths."""
    if name not in RECIPES:
        known = ", ".join(sorted(RECIPES))
        raise ConfigError(f"unknown recipe {name!r}; available: {known}")
    paths = []
    for label, data in RECIPES[name]:
        if seed is not None:
            data = dict(data, seed=seed)
        cfg = config_from_dict(data)
        paths.append(run(cfg, out_dir=out_dir, label=label))
    return paths


class _Check:
    def __init__(self, name, achieved, required, passed, comparison="<="):
        self.name = name
        self.achieved = achieved
        self.required = required
        self.passed = passed
        self.comparison = comparison

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"{self.name}: achieved={self.achieved:.3e} "
                f"required{self.comparison}{self.required:.3e} -> {status}")


def _check_lattice_omega():
    net = MacroNetwork(rings=500)
    out = []
    for two_b, tol in ((3.5, 1e-6), (2.5, 1e-3)):
        total = hexgrid.lattice_sum(net, two_b)
        target = 6.0 * specfun.omega(two_b / 2.0)
        rel = abs(total - target) / target
        out.append(_Check(f"lattice-omega-2b{two_b}", rel, tol, rel <= tol))
    return out

def _check_a1_identity():
    worst = 0.0
    for b in (1.25, 1.75):
        for k in (0.0, 0.4, 1.0):
            for xr in (0.3, 1.0 / math.sqrt(3.0)):
                lhs = 6.0 * xr ** (2.0 * b * k) * macro_analytic.beta_h(0, b, k, xr)
                rhs = macro_analytic.a1(b, k, xr)
                worst = max(worst, abs(lhs - rhs) / rhs)
    return [_Check("edge-interference-identity", worst, 1e-10, worst <= 1e-10)]

def _check_inverses():
    net = MacroNetwork()
    prop = PropagationParams()
    mix = TddMix(alpha_d=0.5)
    params = macro_analytic.SinrParams.from_model(net, prop)
    worst_u = 0.0
    for x in (0.05, 0.2, 0.4, 0.55):
        y = macro_analytic.uplink_inverse_sinr(x, net, prop, mix, params)
        worst_u = max(worst_u, abs(macro_analytic.inv_u(y, prop.b, prop.k, mix, params) - x) / x)
    worst_d = 0.0
    worst_series = 0.0
    for x in (0.05, 0.2, 0.4, 0.5):
        y = macro_analytic.downlink_inverse_sinr(x, net, prop, mix, params)
        xb = macro_analytic.inv_d(y, net, prop, mix, params, method="bisection")
        yb = macro_analytic.downlink_inverse_sinr(xb, net, prop, mix, params)
        worst_d = max(worst_d, abs(yb - y) / y)
        xs = macro_analytic.inv_d(y, net, prop, mix, params, method="series")
        worst_series = max(worst_series, abs(xs - xb) / xb)
    return [
        _Check("uplink-inverse-roundtrip", worst_u, 1e-12, worst_u <= 1e-12),
        _Check("downlink-bisection-roundtrip", worst_d, 1e-10, worst_d <= 1e-10),
        _Check("downlink-series-vs-bisection", worst_series, 0.05, worst_series <= 0.05),
    ]

def _check_ppp_anchor():
    prop = PropagationParams(two_b=4.0, p_noise_dbm=-math.inf)
    scenario = SmallCellScenario(lam=10.0, prop=prop, mix=TddMix(alpha_d=1.0))
    worst = 0.0
    for gamma_db in (0.0, 5.0):
        gamma = 10.0 ** (gamma_db / 10.0)
        rg = math.sqrt(gamma)
        closed = 1.0 / (1.0 + rg * (math.pi / 2.0 - math.atan(1.0 / rg)))
        mine = ppp_model.coverage_ppp_dl(gamma_db, scenario)
        worst = max(worst, abs(mine - closed))
    return [_Check("ppp-closed-form-anchor", worst, 0.01, worst <= 0.01)]

def _check_series_vs_integral():
    prop = PropagationParams()
    net = MacroNetwork()
    ctrl = SeriesControl(max_terms=600)
    series = macro_analytic.isr_ul_dl(
        0.4, prop.b, prop.k, net.cell_radius / net.delta, prop.p_star_over_p, ctrl)
    # positional sums carry a six-fold angular harmonic that the circular
    # series averages away, so the oracle averages over angles too
    n_angles = 24
    per_angle = 1_000_000 // n_angles
    estimates = np.empty(n_angles)
    variances = np.empty(n_angles)
    for i, theta in enumerate(np.arange(n_angles) * (2.0 * math.pi / n_angles)):
        est, se = hexgrid.bruteforce_isr_ul_dl(
            MobilePolar(0.4, theta), net, prop, n_samples=per_angle, seed=1000 + i)
        estimates[i] = est
        variances[i] = se * se
    mc = float(estimates.mean())
    se = math.sqrt(float(variances.sum())) / n_angles
    sigma = abs(mc - series) / se
    return [_Check("cross-isr-series-vs-integral", sigma, 3.0, sigma <= 3.0)]

def _check_determinism():
    net = MacroNetwork()
    prop = PropagationParams()
    mix = TddMix(alpha_d=0.5)
    grid = np.array([-10.0, 0.0])
    a = hexgrid.mc_coverage_macro(net, prop, mix, "dl", grid, 400, seed=9)
    b = hexgrid.mc_coverage_macro(net, prop, mix, "dl", grid, 400, seed=9)
    scenario = SmallCellScenario()
    c = ppp_model.mc_coverage_ppp(scenario, "ul", grid, 300, seed=9)
    d = ppp_model.mc_coverage_ppp(scenario, "ul", grid, 300, seed=9)
    same = (np.array_equal(a.value, b.value) and np.array_equal(c.value, d.value))
    worst = 0.0 if same else 1.0
    return [_Check("mc-determinism", worst, 0.0, same, comparison="==")]


def validate(quick=False):
    """Run the numerical cross-check suite; returns (report, all_passed).

    quick=True skips the long Monte Carlo series-vs-integral check.
    """
    checks = []
    checks += _check_lattice_omega()
    checks += _check_a1_identity()
    checks += _check_inverses()
    checks += _check_ppp_anchor()
    if not quick:
        checks += _check_series_vs_integral()
    checks += _check_determinism()
    lines = [c.line() for c in checks]
    passed = all(c.passed for c in checks)
    lines.append("all checks passed" if passed else "validation FAILED")
    return "\n".join(lines), passed
