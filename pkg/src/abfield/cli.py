"""Scenario-driving command line interface.

Subcommands (one per report): field-map, phase, stokes, trajectory,
convergence, screen-profile. Scenario files are strict JSON (see
config.py); outputs are CSV/JSON with deterministic formatting, plus
optional matplotlib figures rendered next to the data with --plot.

Exit codes: 0 success, 2 configuration/validation error, 3 numerical
validation failure (an 'expect' clause in the config was not met).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .circulation import ab_phase, loop_integral
from .config import ConfigError, ScenarioConfig, convergence_rows, load_config, \
    trajectory_params
from .dynamics import DynamicsError, ParticleState, RampSchedule, integrate_trajectory
from .geometry import GeometryError
from .modes import FieldEvaluationError, VectorField, longitudinal_from_current, \
    solenoid_longitudinal_analytic
from .screening import ScreeningError, london_profile_fd, screened_solenoid_profile
from .sources import SourceError, surface_current_samples
from .stokes import demonstrate_misuse, verify_generalized_stokes

_CONFIG_ERRORS = (ConfigError, GeometryError, SourceError, ScreeningError,
                  DynamicsError, FieldEvaluationError, ValueError, KeyError)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDATION = 3


def _worker_count() -> int:
    raw = os.environ.get("ABFIELD_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _evaluate_chunked(f: VectorField, pts: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Evaluate a field over many points, optionally across worker threads.

    Chunks are fixed-size and reassembled in order, so the result is
    identical for any ABFIELD_THREADS setting.
    """
    blocks = [pts[i:i + chunk] for i in range(0, pts.shape[0], chunk)]
    workers = _worker_count()
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(f, blocks))
    else:
        results = [f(b) for b in blocks]
    return np.vstack(results)


def _write_table(outdir: Path, stem: str, fmt: str, columns: list[str],
                 rows: list[tuple]) -> Path:
    """Delimited table with shortest-roundtrip float formatting."""
    if fmt == "json":
        path = outdir / f"{stem}.json"
        payload = {"columns": columns,
                   "rows": [[float(v) for v in row] for row in rows]}
        path.write_text(json.dumps(payload, sort_keys=True) + "\n")
        return path
    path = outdir / f"{stem}.csv"
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return path


def _write_json(outdir: Path, stem: str, payload: dict) -> Path:
    path = outdir / f"{stem}.json"
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return path


def _check_loop_clear_of_forbidden(cfg: ScenarioConfig, loop, scenario) -> None:
    pts = loop.sample_points(256)
    rho_min = float(np.min(np.hypot(pts[:, 0], pts[:, 1])))
    if rho_min < scenario.forbidden_outer_radius:
        raise ConfigError(
            f"loop dips to rho = {rho_min:.4e} m inside the forbidden region "
            f"(radius {scenario.forbidden_outer_radius:.4e} m)")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_field_map(cfg: ScenarioConfig, outdir: Path, fmt: str, plot: bool) -> int:
    fm = cfg.field_map_raw
    if not fm:
        raise ConfigError("field-map needs a 'field_map' section")
    n = int(fm.get("n", 41))
    if n < 2:
        raise ConfigError("field_map.n must be >= 2")
    half = float(fm.get("half_extent_m", 0.05))
    if half <= 0:
        raise ConfigError("field_map.half_extent_m must be > 0")
    z = float(fm.get("z_m", 0.0))

    scenario = cfg.scenario()
    xs = np.linspace(-half, half, n)
    ys = np.linspace(-half, half, n)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([gx.ravel(), gy.ravel(), np.full(n * n, z)], axis=1)

    a_vals = _evaluate_chunked(scenario.a_field, pts)
    b_vals = _evaluate_chunked(scenario.b_field, pts)

    columns = ["x_m", "y_m", "z_m", "Ax_Tm", "Ay_Tm", "Az_Tm", "Bx_T", "By_T", "Bz_T"]
    rows = [(pts[i, 0], pts[i, 1], pts[i, 2], *a_vals[i], *b_vals[i])
            for i in range(pts.shape[0])]
    path = _write_table(outdir, "field_map", fmt, columns, rows)
    print(f"field map: {pts.shape[0]} points -> {path}")

    if plot:
        from . import plotting
        a_mag = np.linalg.norm(a_vals, axis=1).reshape(n, n)
        b_mag = np.linalg.norm(b_vals, axis=1).reshape(n, n)
        plotting.render_field_map(xs, ys, a_mag, b_mag, outdir / "field_map.png")
    return EXIT_OK


def cmd_phase(cfg: ScenarioConfig, outdir: Path, fmt: str, plot: bool) -> int:
    scenario = cfg.scenario()
    loop = cfg.loop()
    _check_loop_clear_of_forbidden(cfg, loop, scenario)

    result = ab_phase(scenario.a_field, loop, charge=cfg.charge, hbar=cfg.hbar)
    payload = result.to_json_dict()
    payload["scenario"] = scenario.scenario_tag
    path = _write_json(outdir, "phase", payload)
    print(json.dumps(payload, sort_keys=True))
    print(f"phase report -> {path}")

    if plot:
        from . import plotting
        plotting.render_phase(result.circulation, result.phase, outdir / "phase.png")
    return EXIT_OK


def cmd_stokes(cfg: ScenarioConfig, outdir: Path, fmt: str, plot: bool) -> int:
    scenario = cfg.scenario()
    mesh = cfg.annulus_mesh()
    disk = cfg.disk_mesh()
    loop = cfg.loop()
    _check_loop_clear_of_forbidden(cfg, loop, scenario)

    report = verify_generalized_stokes(scenario.a_field, mesh)
    misuse = demonstrate_misuse(scenario, disk, loop)

    print("generalized Stokes (annular region):")
    print(report.format_table())
    print("naive simply-connected bookkeeping over D0+D:")
    print(f"{'LHS flux':>14} {'RHS circ':>14} {'GAP':>14} {'TOLERANCE':>14}")
    print(f"{misuse.lhs: .6e} {misuse.rhs: .6e} {misuse.gap: .6e} {misuse.tolerance: .6e}")

    _write_json(outdir, "stokes", report.to_json_dict())
    _write_json(outdir, "misuse", misuse.to_json_dict())

    if plot:
        from . import plotting
        plotting.render_stokes({"flux": report.flux, "C1": report.c1_circulation,
                                "C2": report.c2_circulation or 0.0,
                                "residual": report.residual,
                                "misuse gap": misuse.gap}, outdir / "stokes.png")

    expected = cfg.expect_verdict()
    if expected is not None and report.verdict != expected:
        print(f"expectation failed: verdict {report.verdict!r} != {expected!r}",
              file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_trajectory(cfg: ScenarioConfig, outdir: Path, fmt: str, plot: bool) -> int:
    params = trajectory_params(cfg)
    spec = cfg.solenoid()
    state = ParticleState(t=0.0, position=params["x0"], velocity=params["v0"],
                          mass=params["mass"], charge=params["charge"])
    ramp = RampSchedule(i_final=spec.current, t_ramp=params["t_ramp"],
                        shape=params["ramp_shape"])

    record = integrate_trajectory(state, spec, ramp, dt=params["dt"],
                                  t_end=params["t_end"],
                                  record_every=params["record_every"],
                                  force_model=params["force_model"])

    columns = ["t_s", "x_m", "y_m", "z_m", "vx_mps", "vy_mps", "vz_mps",
               "px_kgmps", "py_kgmps", "pz_kgmps", "p_drift_rel"]
    path = _write_table(outdir, "trajectory", fmt, columns, list(record.csv_rows()))

    conv = float(np.max(record.convective_mag)) if record.convective_mag.size else 0.0
    dadt = float(np.max(record.dadt_mag)) if record.dadt_mag.size else 0.0
    print(f"conservation: max |p - p0|/|p0| = {record.max_drift():.6e} "
          f"({record.force_model} force, {record.times.size} samples"
          f"{', BREACH' if record.breach else ''}); "
          f"max |(v.grad)A| = {conv:.3e} T m/s vs max |dA/dt| = {dadt:.3e} T m/s; "
          f"exterior curl check max = {record.max_curl_check:.3e} T")
    print(f"trajectory -> {path}")

    if plot:
        from . import plotting
        plotting.render_trajectory(record.times, record.positions, record.drift,
                                   spec.a, outdir / "trajectory.png")
    return EXIT_OK


def cmd_convergence(cfg: ScenarioConfig, outdir: Path, fmt: str, plot: bool) -> int:
    rho, z, rows = convergence_rows(cfg)
    spec = cfg.solenoid()
    point = np.array([rho, 0.0, z])
    exact = solenoid_longitudinal_analytic(spec, point)
    exact_norm = float(np.linalg.norm(exact))
    if exact_norm == 0.0:
        raise ConfigError("convergence point has zero analytic field")

    out_rows = []
    errors = []
    labels = []
    for row in rows:
        src = surface_current_samples(spec, row["n_phi"], row["n_z"],
                                      row["z_extent_m"])
        approx = longitudinal_from_current(src, point)
        rel = float(np.linalg.norm(approx - exact)) / exact_norm
        out_rows.append((row["z_extent_m"], row["n_phi"], row["n_z"], rel))
        errors.append(rel)
        labels.append(f"z={row['z_extent_m']:g}, {row['n_phi']}x{row['n_z']}")

    path = _write_table(outdir, "convergence", fmt,
                        ["z_extent_m", "n_phi", "n_z", "rel_error"], out_rows)
    print(f"{'z_extent_m':>12} {'n_phi':>7} {'n_z':>7} {'rel_error':>12}")
    for r in out_rows:
        print(f"{r[0]:>12g} {r[1]:>7d} {r[2]:>7d} {r[3]:>12.4e}")
    print(f"convergence table -> {path}")

    if plot:
        from . import plotting
        plotting.render_convergence(labels, errors, outdir / "convergence.png")

    if cfg.expect_monotone() and any(b >= a for a, b in zip(errors, errors[1:])):
        print("expectation failed: convergence errors are not strictly decreasing",
              file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_screen_profile(cfg: ScenarioConfig, outdir: Path, fmt: str, plot: bool) -> int:
    spec = cfg.solenoid()
    shield = cfg.shield()
    if shield is None:
        raise ConfigError("screen-profile needs a 'shield' section")
    sp = cfg.screen_profile_raw
    n_points = int(sp.get("n_points", 301))
    span = float(sp.get("rho_max_lambdas", 30.0))
    if n_points < 8 or span <= 0:
        raise ConfigError("screen_profile needs n_points >= 8 and rho_max_lambdas > 0")

    rho = np.linspace(shield.inner_radius,
                      shield.inner_radius + span * shield.lambda_p, n_points)
    a_phi = screened_solenoid_profile(spec, shield, rho)
    log_slope = np.gradient(np.log(a_phi), rho)

    rows = [(rho[i], a_phi[i], log_slope[i]) for i in range(n_points)]
    path = _write_table(outdir, "screen_profile", fmt,
                        ["rho_m", "A_phi_Tm", "log_slope_per_m"], rows)
    print(f"lambda_p = {shield.lambda_p:.6e} m; far log-slope = {log_slope[-2]:.6e} "
          f"per m (target {-1.0 / shield.lambda_p:.6e})")
    print(f"screen profile -> {path}")

    if plot:
        from . import plotting
        plotting.render_screen_profile(rho, a_phi, shield.lambda_p,
                                       outdir / "screen_profile.png")
    return EXIT_OK


_COMMANDS = {
    "field-map": cmd_field_map,
    "phase": cmd_phase,
    "stokes": cmd_stokes,
    "trajectory": cmd_trajectory,
    "convergence": cmd_convergence,
    "screen-profile": cmd_screen_profile,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abfield",
        description="Solenoid vector-potential scenarios: field maps, loop "
                    "phases, Stokes checks, ramp trajectories, screening profiles.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON scenario file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv",
                       help="tabular output format")
        p.add_argument("--seed", type=int, default=None,
                       help="reserved; all computations are deterministic")
        p.add_argument("--plot", action="store_true",
                       help="render matplotlib figures next to the data")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except _CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, outdir, args.format, args.plot)
    except _CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
