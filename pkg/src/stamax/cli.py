"""
Scenario-driven command-line front end.

Subcommands: catalog, sample, verify, energy, propagate, photon. Scenarios
live in a YAML config (the reproducibility unit); every run writes a manifest
echoing the fully resolved configuration next to its outputs.

Exit codes: 0 all checks pass, 1 a check failed (the report is still
written), 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np
import yaml

from stamax import extensor as ex
from stamax import fields as fl
from stamax import grids as gr
from stamax import scenarios as sc

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2


def _load_config(path: str) -> sc.RunConfig:
    p = Path(path)
    if not p.exists():
        raise sc.ConfigError("config", f"no such file: {path}")
    try:
        raw = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        raise sc.ConfigError("config", f"invalid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    return sc.validate_config(raw)


def _apply_flags(cfg: sc.RunConfig, args) -> sc.RunConfig:
    if args.tolerance_scale is not None:
        cfg.tolerance_scale = args.tolerance_scale
    if args.threads is not None:
        cfg.threads = args.threads
    return cfg


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_manifest(out: Path, cfg: sc.RunConfig, command: str, extras=None) -> None:
    manifest = {"command": command, "config": cfg.as_dict()}
    if extras:
        manifest.update(extras)
    _write_json(out / "run_manifest.json", manifest)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def cmd_catalog(args) -> int:
    listing = {}
    for name, (params_cls, _) in fl.CATALOG.items():
        listing[name] = sorted(params_cls.__dataclass_fields__)
    print(json.dumps(listing, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_sample(args) -> int:
    cfg = _apply_flags(_load_config(args.config), args)
    out = _out_dir(args)
    field_obj = sc.build_field(cfg)
    sampled = gr.SampledField.from_closure(field_obj, cfg.grid)
    if cfg.scenario == "corrupted_plane_wave":
        sampled = gr.corrupt_field(sampled)
    if args.format == "csv":
        gr.save_sampled_field(sampled, out / "field.csv")
    else:
        T, X, Y, Z = cfg.grid.meshgrid()
        coords = np.stack([T, X, Y, Z], axis=-1).reshape(-1, 4)
        flat = sampled.values.reshape(-1, 16)
        _write_json(
            out / "field.json",
            [{"coords": c.tolist(), "coeffs": v.tolist()} for c, v in zip(coords, flat)],
        )
    _write_manifest(out, cfg, "sample")
    print(f"sampled {cfg.scenario} on {sampled.grid.point_count()} points -> {out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _apply_flags(_load_config(args.config), args)
    out = _out_dir(args)
    report = sc.run_verify(cfg)
    _write_json(out / "suite_report.json", report.as_dict())
    _write_manifest(out, cfg, "verify")
    for check in report.checks:
        tol = "-" if check.tolerance is None else f"{check.tolerance:.3e}"
        print(f"[{check.status:>10}] {check.name:<18} value={check.value:.3e} tol={tol}")
    print(f"suite {'PASSED' if report.passed else 'FAILED'} -> {out / 'suite_report.json'}")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_energy(args) -> int:
    cfg = _apply_flags(_load_config(args.config), args)
    out = _out_dir(args)
    rows, summary = sc.run_energy(cfg)
    _write_json(out / "extensor_summary.json", summary)
    if args.format == "json":
        _write_json(out / "extensor_report.json", rows)
    else:
        with (out / "extensor_report.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["t", "x", "y", "z", "u", "Px", "Py", "Pz", "I1", "L", "t0_norm", "v_energy"]
            )
            for r in rows:
                writer.writerow(
                    [_fmt(v) for v in r["coords"]]
                    + [_fmt(r["u"])]
                    + [_fmt(v) for v in r["P"]]
                    + [_fmt(r["I1"]), _fmt(r["L"]), _fmt(r["t0_norm"])]
                    + ["" if r["v_energy"] is None else _fmt(r["v_energy"])]
                )
    _write_manifest(out, cfg, "energy")
    vmax = summary["v_energy_max"]
    print(f"energy report: {summary['points']} points, max v_energy = {vmax} -> {out}")
    return EXIT_OK


def cmd_propagate(args) -> int:
    cfg = _apply_flags(_load_config(args.config), args)
    out = _out_dir(args)
    times, z_values, profiles, report, extras = sc.run_propagation(cfg)
    with (out / "profiles.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [_fmt(z) for z in z_values])
        for i, t in enumerate(times):
            writer.writerow([_fmt(t)] + [_fmt(abs(v)) for v in profiles[i]])
    payload = dict(extras)
    if report is not None:
        payload["kinematics"] = report.as_dict()
    _write_json(out / "kinematics.json", payload)
    _write_manifest(out, cfg, "propagate", extras={"propagation": extras})
    if report is None:
        print(f"propagation diagnostic: {extras.get('diagnostic')} -> {out}")
    else:
        print(f"propagation run {extras['kind']}: {len(times)} slices -> {out}")
    return EXIT_OK


def cmd_photon(args) -> int:
    cfg = _apply_flags(_load_config(args.config), args)
    out = _out_dir(args)
    rows, summary = sc.run_photon(cfg)
    _write_json(out / "photon_report.json", {"summary": summary, "points": rows})
    _write_manifest(out, cfg, "photon")
    print(f"photon report: {len(rows)} points -> {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stamax",
        description="Spacetime-algebra Maxwell toolkit: verification suites, "
        "energy-extensor reports, and vacuum propagation experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="YAML scenario config")
        p.add_argument("--out", default="stamax_out", help="output directory")
        p.add_argument("--format", choices=["csv", "json"], default="csv")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--tolerance-scale", dest="tolerance_scale", type=float, default=None)

    p = sub.add_parser("catalog", help="list catalog fields and their parameters")
    p.set_defaults(fn=cmd_catalog)
    for name, fn, help_text in (
        ("sample", cmd_sample, "evaluate the configured field on its grid"),
        ("verify", cmd_verify, "run the scenario's verification suite"),
        ("energy", cmd_energy, "emit per-point extensor reports and summaries"),
        ("propagate", cmd_propagate, "run a Cauchy/aperture propagation experiment"),
        ("photon", cmd_photon, "HJ factorization and quantum-potential report"),
    ):
        p = sub.add_parser(name, help=help_text)
        add_common(p)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except sc.ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
