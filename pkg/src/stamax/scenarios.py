"""
Named scenarios and verification suites behind the command-line front end.

A scenario bundles a catalog field (or propagation experiment) with a default
grid and the checks that make sense for it; the config file can override any
of it. Checks return one CheckResult each, and a suite is just an ordered
list of them. Residual checks against sampled fields use the 'auto'
tolerance tol_factor * h_max^2 * max|F|, matching their second-order
convergence; algebraic identities use the fixed acceptance bounds.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from stamax import algebra as al
from stamax import extensor as ex
from stamax import fields as fl
from stamax import grids as gr
from stamax import photon as ph
from stamax import propagation as pr


class ConfigError(ValueError):
    """Configuration failure; `path` names the offending entry."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class CheckResult:
    name: str
    status: str          # pass | fail | diagnostic
    value: float
    tolerance: float | None
    runtime: float

    def as_dict(self):
        return {
            "name": self.name,
            "status": self.status,
            "value": self.value,
            "tolerance": self.tolerance,
            "runtime_sec": round(self.runtime, 6),
        }


@dataclass
class SuiteReport:
    scenario: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def as_dict(self):
        return {
            "scenario": self.scenario,
            "passed": self.passed,
            "checks": [c.as_dict() for c in self.checks],
        }


# ---------------------------------------------------------------------------
# Config schema
# ---------------------------------------------------------------------------

_DEFAULT_GRIDS = {
    "plane_wave": {"origin": [-0.6, -0.6, -0.6, -0.6], "spacing": [0.15] * 4, "dims": [9, 9, 9, 9]},
    "corrupted_plane_wave": {"origin": [-0.6, -0.6, -0.6, -0.6], "spacing": [0.15] * 4, "dims": [9, 9, 9, 9]},
    "xwave": {"origin": [0.1, -0.2, -0.2, 0.1], "spacing": [0.05] * 4, "dims": [7, 7, 7, 7]},
    "fwm": {"origin": [0.2, 0.05, -0.1, 0.3], "spacing": [0.03] * 4, "dims": [7, 7, 7, 7]},
    "dipole": {"origin": [0.0, 1.0, 1.0, 1.0], "spacing": [1.0, 0.05, 0.05, 0.05], "dims": [1, 9, 9, 9]},
    "localized_photon": {"origin": [0.2, 0.8, 0.7, 0.6], "spacing": [0.05] * 4, "dims": [7, 7, 7, 7]},
}

_DEFAULT_FIELDS = {
    "plane_wave": {"kind": "plane_wave", "omega": 1.0, "direction": [0.0, 0.0, 1.0], "helicity": 1, "phase0": 0.0},
    "corrupted_plane_wave": {"kind": "plane_wave", "omega": 1.0, "direction": [0.0, 0.0, 1.0], "helicity": 1, "phase0": 0.0},
    "xwave": {"kind": "xwave", "eta": math.pi / 4, "a0": 1.0},
    "fwm": {"kind": "fwm", "beta": 1.0, "z0": 1.0},
    "dipole": {"kind": "dipole", "Q": 1.0, "C": 1.0, "R": 0.5},
    "localized_photon": {"kind": "localized_photon", "l": 1.0},
}

_DEFAULT_SUITES = {
    "plane_wave": ["maxwell", "nullity", "extensor_symmetry", "conservation", "poynting"],
    "corrupted_plane_wave": ["maxwell", "conservation"],
    "xwave": ["maxwell", "conservation", "poynting", "extensor_symmetry", "timelike_t0"],
    "fwm": ["maxwell", "conservation", "poynting"],
    "dipole": ["maxwell", "poynting", "flux", "speed_bound"],
    "localized_photon": ["maxwell"],
}

KNOWN_CHECKS = (
    "maxwell", "conservation", "poynting", "nullity", "extensor_symmetry",
    "flux", "speed_bound", "timelike_t0",
)


@dataclass
class RunConfig:
    scenario: str
    field: dict
    grid: gr.Grid
    suites: list[str]
    tolerance_factor: float = 100.0
    tolerance_scale: float = 1.0
    seed: int = 1234
    threads: int | None = None
    propagation: dict = field(default_factory=dict)
    photon: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "scenario": self.scenario,
            "field": self.field,
            "grid": {
                "origin": list(self.grid.origin),
                "spacing": list(self.grid.spacing),
                "dims": list(self.grid.dims),
            },
            "suites": self.suites,
            "tolerance_factor": self.tolerance_factor,
            "tolerance_scale": self.tolerance_scale,
            "seed": self.seed,
            "threads": self.threads,
            "propagation": self.propagation,
            "photon": self.photon,
        }


def _expect_mapping(obj, path):
    if not isinstance(obj, dict):
        raise ConfigError(path, f"expected a mapping, got {type(obj).__name__}")
    return obj


def _expect_number(obj, path):
    if not isinstance(obj, (int, float)) or isinstance(obj, bool):
        raise ConfigError(path, f"expected a number, got {obj!r}")
    return float(obj)


def _expect_vec(obj, n, path):
    if not isinstance(obj, (list, tuple)) or len(obj) != n:
        raise ConfigError(path, f"expected a list of {n} numbers")
    return [_expect_number(v, f"{path}[{i}]") for i, v in enumerate(obj)]


def validate_config(raw: dict) -> RunConfig:
    raw = _expect_mapping(raw, "config")
    unknown = set(raw) - {
        "scenario", "field", "grid", "suites", "tolerance_factor",
        "tolerance_scale", "seed", "threads", "propagation", "photon",
    }
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown configuration key")
    scenario = raw.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError("scenario", f"must be one of {sorted(SCENARIOS)}, got {scenario!r}")
    field_cfg = dict(_DEFAULT_FIELDS.get(scenario, {}))
    field_cfg.update(_expect_mapping(raw.get("field", {}), "field"))
    grid_cfg = dict(_DEFAULT_GRIDS.get(scenario, _DEFAULT_GRIDS["plane_wave"]))
    grid_cfg.update(_expect_mapping(raw.get("grid", {}), "grid"))
    origin = _expect_vec(grid_cfg.get("origin"), 4, "grid.origin")
    spacing = _expect_vec(grid_cfg.get("spacing"), 4, "grid.spacing")
    dims_raw = grid_cfg.get("dims")
    if not isinstance(dims_raw, (list, tuple)) or len(dims_raw) != 4:
        raise ConfigError("grid.dims", "expected a list of 4 integers")
    dims = []
    for i, v in enumerate(dims_raw):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise ConfigError(f"grid.dims[{i}]", f"expected a positive integer, got {v!r}")
        dims.append(v)
    try:
        grid = gr.Grid(tuple(origin), tuple(spacing), tuple(dims))
    except ValueError as exc:
        raise ConfigError("grid", str(exc)) from exc
    suites = raw.get("suites", _DEFAULT_SUITES.get(scenario, ["maxwell"]))
    if not isinstance(suites, list) or not all(isinstance(s, str) for s in suites):
        raise ConfigError("suites", "expected a list of check names")
    for s in suites:
        if s not in KNOWN_CHECKS:
            raise ConfigError(f"suites.{s}", f"unknown check; have {sorted(KNOWN_CHECKS)}")
    cfg = RunConfig(
        scenario=scenario,
        field=field_cfg,
        grid=grid,
        suites=list(suites),
        tolerance_factor=_expect_number(raw.get("tolerance_factor", 100.0), "tolerance_factor"),
        tolerance_scale=_expect_number(raw.get("tolerance_scale", 1.0), "tolerance_scale"),
        seed=int(_expect_number(raw.get("seed", 1234), "seed")),
        threads=raw.get("threads"),
        propagation=_expect_mapping(raw.get("propagation", {}), "propagation"),
        photon=_expect_mapping(raw.get("photon", {}), "photon"),
    )
    if cfg.threads is not None and (not isinstance(cfg.threads, int) or cfg.threads < 1):
        raise ConfigError("threads", "expected a positive integer")
    try:
        build_field(cfg)
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError("field", str(exc)) from exc
    return cfg


def build_field(cfg: RunConfig):
    """Instantiate the scenario's field closure from the config mapping."""
    params = {k: v for k, v in cfg.field.items() if k != "kind"}
    kind = cfg.field.get("kind")
    if kind == "plane_wave":
        if "direction" in params:
            params["direction"] = tuple(params["direction"])
        return fl.PlaneWaveField(fl.PlaneWaveParams(**params))
    return fl.make_field(kind, **params)


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------

def _timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, time.perf_counter() - start


def _auto_tol(cfg: RunConfig, sampled: gr.SampledField) -> float:
    h_max = max(sampled.grid.spacing[i] for i in sampled.grid.diff_axes)
    scale = sampled.max_norm() or 1.0
    return cfg.tolerance_factor * h_max**2 * scale * cfg.tolerance_scale


def _sample(cfg: RunConfig, field_obj) -> gr.SampledField:
    sampled = gr.SampledField.from_closure(field_obj, cfg.grid)
    if cfg.scenario == "corrupted_plane_wave":
        sampled = gr.corrupt_field(sampled)
    return sampled


def check_maxwell(cfg, field_obj, sampled) -> CheckResult:
    value, dt = _timed(lambda: gr.maxwell_residual(sampled))
    tol = _auto_tol(cfg, sampled)
    return CheckResult("maxwell", "pass" if value <= tol else "fail", value, tol, dt)


def check_conservation(cfg, field_obj, sampled) -> CheckResult:
    value, dt = _timed(lambda: ex.conservation_residual(sampled))
    tol = _auto_tol(cfg, sampled) * max(1.0, sampled.max_norm())
    return CheckResult("conservation", "pass" if value <= tol else "fail", value, tol, dt)


def check_poynting(cfg, field_obj, sampled) -> CheckResult:
    value, dt = _timed(lambda: ex.poynting_theorem_residual(sampled))
    tol = _auto_tol(cfg, sampled) * max(1.0, sampled.max_norm())
    return CheckResult("poynting", "pass" if value <= tol else "fail", value, tol, dt)


def check_nullity(cfg, field_obj, sampled) -> CheckResult:
    def run():
        sq = al.gp(sampled.values, sampled.values)
        return float(np.max(np.abs(sq[..., al.SCALAR])) + np.max(np.abs(sq[..., al.G5])))

    value, dt = _timed(run)
    tol = 1e-10 * max(1.0, sampled.max_norm() ** 2) * cfg.tolerance_scale
    return CheckResult("nullity", "pass" if value <= tol else "fail", value, tol, dt)


def check_timelike_t0(cfg, field_obj, sampled) -> CheckResult:
    def run():
        d = ex.extensor_fields(sampled.values)
        return float(np.min(d["t0_norm"]))

    value, dt = _timed(run)
    return CheckResult("timelike_t0", "pass" if value > 0 else "fail", value, 0.0, dt)


def check_extensor_symmetry(cfg, field_obj, sampled) -> CheckResult:
    def run():
        rng = np.random.default_rng(cfg.seed)
        worst = 0.0
        for _ in range(1000):
            F = rng.standard_normal(16) * al.GRADE_MASKS[2]
            n = rng.standard_normal(16) * al.GRADE_MASKS[1]
            m = rng.standard_normal(16) * al.GRADE_MASKS[1]
            lhs = al.minkowski_dot(ex.extensor_T(F, n, check=False), m)
            rhs = al.minkowski_dot(ex.extensor_T(F, m, check=False), n)
            worst = max(worst, abs(lhs - rhs) / (al.norm(F) ** 2 * al.norm(n) * al.norm(m)))
        return worst

    value, dt = _timed(run)
    tol = 1e-12 * cfg.tolerance_scale
    return CheckResult("extensor_symmetry", "pass" if value <= tol else "fail", value, tol, dt)


def check_flux(cfg, field_obj, sampled) -> CheckResult:
    if cfg.field.get("kind") != "dipole":
        return CheckResult("flux", "diagnostic", float("nan"), None, 0.0)
    params = fl.DipoleParams(Q=cfg.field["Q"], C=cfg.field["C"], R=cfg.field["R"])

    def run():
        return max(
            abs(ex.surface_flux(lambda x, y, z: fl.dipole_poynting(x, y, z, params),
                                (0.0, 0.0, 0.0), radius, order=24))
            for radius in (2 * params.R, 5 * params.R)
        )

    value, dt = _timed(run)
    tol = 1e-10 * cfg.tolerance_scale
    return CheckResult("flux", "pass" if value <= tol else "fail", value, tol, dt)


def check_speed_bound(cfg, field_obj, sampled) -> CheckResult:
    def run():
        d = ex.extensor_fields(sampled.values)
        v = d["v_energy"][d["v_defined"]]
        return float(np.max(v)) if v.size else 0.0

    value, dt = _timed(run)
    tol = 1.0 + 1e-12
    return CheckResult("speed_bound", "pass" if value <= tol else "fail", value, tol, dt)


CHECKS = {
    "maxwell": check_maxwell,
    "conservation": check_conservation,
    "poynting": check_poynting,
    "nullity": check_nullity,
    "extensor_symmetry": check_extensor_symmetry,
    "flux": check_flux,
    "speed_bound": check_speed_bound,
    "timelike_t0": check_timelike_t0,
}

SCENARIOS = (
    "plane_wave", "corrupted_plane_wave", "xwave", "fwm", "dipole", "localized_photon",
)


def run_verify(cfg: RunConfig) -> SuiteReport:
    field_obj = build_field(cfg)
    sampled = _sample(cfg, field_obj)
    report = SuiteReport(scenario=cfg.scenario)
    for name in cfg.suites:
        report.checks.append(CHECKS[name](cfg, field_obj, sampled))
    return report


# ---------------------------------------------------------------------------
# Energy / extensor reports
# ---------------------------------------------------------------------------

def run_energy(cfg: RunConfig):
    field_obj = build_field(cfg)
    sampled = _sample(cfg, field_obj)
    T, X, Y, Z = cfg.grid.meshgrid()
    coords = np.stack([T, X, Y, Z], axis=-1).reshape(-1, 4)
    rows = ex.extensor_report(coords, sampled.values)
    v = np.array([r["v_energy"] for r in rows if r["v_energy"] is not None])
    I1 = np.array([r["I1"] for r in rows])
    L = np.array([r["L"] for r in rows])
    hist_I1, edges_I1 = np.histogram(I1, bins=16)
    hist_L, edges_L = np.histogram(L, bins=16)
    summary = {
        "points": len(rows),
        "v_energy_min": float(np.min(v)) if v.size else None,
        "v_energy_max": float(np.max(v)) if v.size else None,
        "undefined_v_energy": int(sum(1 for r in rows if r["v_energy"] is None)),
        "I1_histogram": {"counts": hist_I1.tolist(), "edges": edges_I1.tolist()},
        "L_histogram": {"counts": hist_L.tolist(), "edges": edges_L.tolist()},
    }
    return rows, summary


# ---------------------------------------------------------------------------
# Propagation scenarios
# ---------------------------------------------------------------------------

def _prop_opt(cfg, key, default):
    return cfg.propagation.get(key, default)


def run_propagation(cfg: RunConfig):
    """Execute the configured propagation experiment.

    Kinds: xwave_kirchhoff (untruncated Cauchy data, compared against the
    analytic solution), xwave_truncated (compact-support data: the reshaping
    demonstration), xwave_aperture (finite-aperture scan), zero_data
    (flat-profile diagnostic path).
    """
    kind = _prop_opt(cfg, "kind", "xwave_kirchhoff")
    eta = float(_prop_opt(cfg, "eta", math.pi / 4))
    a0 = float(_prop_opt(cfg, "a0", 1.0))
    order = int(_prop_opt(cfg, "order", 32))
    threshold = _prop_opt(cfg, "threshold", None)
    params = fl.XWaveParams(eta=eta, a0=a0)
    scalar = fl.xwave_scalar_closure(params)
    times = np.asarray(_prop_opt(cfg, "times", np.linspace(0.25, 2.0, 8).tolist()), dtype=float)
    zspec = _prop_opt(cfg, "z", {"start": -1.0, "stop": 6.0, "num": 351})
    z_values = np.linspace(float(zspec["start"]), float(zspec["stop"]), int(zspec["num"]))
    extras: dict = {"kind": kind}

    if kind == "zero_data":
        data = pr.CauchyData(
            lambda x, y, z: np.zeros(np.broadcast(x, y, z).shape, dtype=complex),
            lambda x, y, z: np.zeros(np.broadcast(x, y, z).shape, dtype=complex),
        )
        profiles = pr.kirchhoff_on_axis(data, times, z_values, order=order, threads=cfg.threads)
        try:
            report = pr.track_kinematics(times, z_values, profiles, threshold)
        except pr.FlatProfileError as exc:
            return times, z_values, profiles, None, {**extras, "diagnostic": str(exc)}
        return times, z_values, profiles, report, extras

    if kind == "xwave_aperture":
        b = float(_prop_opt(cfg, "aperture_radius", 4.0))
        duration = float(_prop_opt(cfg, "duration", np.inf))
        spec = pr.ApertureSpec(
            radius=b,
            n_radial=int(_prop_opt(cfg, "n_radial", 48)),
            n_phi=int(_prop_opt(cfg, "n_phi", 48)),
            duration=duration,
        )
        boundary = pr.BoundaryField.from_scalar(scalar)
        profiles = pr.rs_on_axis_scan(boundary, spec, times, z_values, threads=cfg.threads)
        report = pr.track_kinematics(times, z_values, profiles, threshold)
        extras["aperture"] = {"radius": b, "duration": duration}
        return times, z_values, profiles, report, extras

    window = None
    if kind == "xwave_truncated":
        wcfg = _prop_opt(cfg, "window", {"b": 4.0, "delta": 2.0})
        window = fl.WindowParams(b=float(wcfg["b"]), delta=float(wcfg["delta"]))
        extras["window"] = {"b": window.b, "delta": window.delta}
    elif kind != "xwave_kirchhoff":
        raise ConfigError("propagation.kind", f"unknown propagation kind {kind!r}")

    data = pr.CauchyData.from_scalar(scalar, window=window)
    profiles = pr.kirchhoff_on_axis(data, times, z_values, order=order, threads=cfg.threads)
    report = pr.track_kinematics(times, z_values, profiles, threshold)
    if kind == "xwave_kirchhoff":
        T, Zg = np.meshgrid(times, z_values, indexing="ij")
        analytic = np.abs(fl.xwave_scalar(T, 0.0, 0.0, Zg, params))
        extras["analytic_max_error"] = float(np.max(np.abs(np.abs(profiles) - analytic)))
        extras["peak_speed_fit"] = pr.fit_speed(times, report.peak_positions)
        extras["expected_peak_speed"] = params.peak_speed
    return times, z_values, profiles, report, extras


# ---------------------------------------------------------------------------
# Photon / quantum-potential reports
# ---------------------------------------------------------------------------

def run_photon(cfg: RunConfig):
    """HJ factorization and quantum-potential report for the configured field."""
    kind = cfg.field.get("kind")
    points = cfg.photon.get("points") or [[0.2, 0.3, -0.1, 0.4]]
    if kind == "plane_wave":
        field_obj = build_field(cfg)
        omega = float(cfg.field["omega"])
        d = np.asarray(cfg.field.get("direction", [0, 0, 1]), dtype=float)
        d = d / np.linalg.norm(d)
        h = int(cfg.field.get("helicity", 1))

        def S_fn(t, x, y, z, _w=omega, _d=d, _h=h):
            return _h * (_w * (t - _d[0] * x - _d[1] * y - _d[2] * z) + float(cfg.field.get("phase0", 0.0)))

        def S_grad(t, x, y, z, _w=omega, _d=d, _h=h):
            return (_h * _w, -_h * _w * _d[0], -_h * _w * _d[1], -_h * _w * _d[2])

        fact = ph.HJFactorization(field_obj, S_fn, S_grad)
    elif kind == "fwm":
        field_obj = build_field(cfg)
        beta = float(cfg.field["beta"])
        fact = ph.HJFactorization(
            field_obj,
            lambda t, x, y, z: beta * (z + t),
            lambda t, x, y, z: (beta, 0.0, 0.0, beta),
        )
    else:
        field_obj = build_field(cfg)
        ref = tuple(cfg.photon.get("reference", (0.0, 0.0, 0.0, 0.0)))
        fact = ph.action_from_T0(field_obj, reference=ref, probe_points=points)
    rows = []
    for q in points:
        try:
            ev = ph.quantum_potential(fact, q)
            rows.append(
                {
                    "point": [float(v) for v in q],
                    "Q_F": ev.Q_F,
                    "dS_squared": ev.dS_squared,
                    "hje_residual": ev.hje_residual,
                    "constraint_grade2": ev.constraint_grade2,
                    "constraint_grade4": ev.constraint_grade4,
                    "degenerate": ev.degenerate,
                    "linearized_Q": None if ev.linearized_Q is None else al.to_row(ev.linearized_Q),
                }
            )
        except ph.DegenerateAmplitudeError as exc:
            rows.append({"point": [float(v) for v in q], "degenerate_report": str(exc)})
    summary = {"exactness_residual": fact.exactness_residual}
    return rows, summary
