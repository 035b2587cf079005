"""Strict JSON scenario configuration for the CLI.

Unknown keys are rejected at every nesting level and every module
precondition is checked while building objects, before any computation
starts or any output file is created. Key names carry units
(``a_m``, ``I_A``, ...) to keep scenario files self-describing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constants import E_CHARGE, ELECTRON_MASS, HBAR
from .geometry import AnnularMesh, ParametricLoop, Point3, mesh_annulus, mesh_disk
from .modes import ScalarGauge
from .screening import SCENARIO_ORIGINAL, SCENARIO_TONOMURA, ScenarioField, \
    ShieldSpec, build_scenario
from .sources import SolenoidSpec


class ConfigError(ValueError):
    """Malformed or invalid scenario configuration."""


def _section(raw: dict, name: str, allowed: dict[str, type | tuple]) -> dict:
    """Pop ``name`` from raw, type-check fields, reject unknown keys."""
    data = raw.pop(name, None)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"section {name!r} must be an object")
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")
    for key, typ in allowed.items():
        if key in data and not isinstance(data[key], typ):
            raise ConfigError(f"{name}.{key} has wrong type: expected {typ}")
    return data


def _need(data: dict, section: str, *keys: str):
    for key in keys:
        if key not in data:
            raise ConfigError(f"missing required key {section}.{key}")


def _vec3(value, where: str) -> tuple[float, float, float]:
    if (not isinstance(value, list) or len(value) != 3
            or not all(isinstance(v, (int, float)) for v in value)):
        raise ConfigError(f"{where} must be a 3-element number list")
    return (float(value[0]), float(value[1]), float(value[2]))


_NUM = (int, float)


@dataclass
class ScenarioConfig:
    """Parsed scenario file; builder methods construct validated objects."""

    scenario_tag: str
    solenoid_raw: dict
    shield_raw: dict = field(default_factory=dict)
    gauge_raw: dict = field(default_factory=dict)
    loop_raw: dict = field(default_factory=dict)
    mesh_raw: dict = field(default_factory=dict)
    disk_raw: dict = field(default_factory=dict)
    field_map_raw: dict = field(default_factory=dict)
    trajectory_raw: dict = field(default_factory=dict)
    convergence_raw: dict = field(default_factory=dict)
    screen_profile_raw: dict = field(default_factory=dict)
    expect_raw: dict = field(default_factory=dict)
    charge: float = -E_CHARGE
    hbar: float = HBAR

    # ---------------- builders ----------------

    def solenoid(self) -> SolenoidSpec:
        s = self.solenoid_raw
        return SolenoidSpec(a=float(s["a_m"]), n=float(s["n_per_m"]),
                            current=float(s["I_A"]))

    def z_extent(self) -> float:
        return float(self.solenoid_raw.get("z_extent_m", 2.0))

    def shield(self) -> ShieldSpec | None:
        s = self.shield_raw
        if not s:
            return None
        kwargs = dict(inner_radius=float(s["inner_r_m"]),
                      outer_radius=float(s["outer_r_m"]))
        if "lambda_p_m" in s:
            kwargs["lambda_p"] = float(s["lambda_p_m"])
        if "m_carrier_kg" in s:
            kwargs["m_carrier"] = float(s["m_carrier_kg"])
        if "e_star_C" in s:
            kwargs["e_star"] = float(s["e_star_C"])
        if "psi_inf" in s:
            kwargs["psi_inf"] = float(s["psi_inf"])
        return ShieldSpec(**kwargs)

    def gauge(self) -> ScalarGauge | None:
        g = self.gauge_raw
        if not g:
            return None
        kind = g.get("kind", "zero")
        if kind == "zero":
            return ScalarGauge(theta=lambda p: np.zeros(p.shape[0]), scale=0.0)
        if kind == "linear":
            c = np.array(_vec3(g.get("coeffs", [0.0, 0.0, 0.0]), "gauge.coeffs"))
            return ScalarGauge(theta=lambda p: p @ c,
                               scale=max(1e-30, float(np.max(np.abs(c)))))
        if kind == "sinusoidal":
            amp = float(g.get("amplitude", 1.0))
            k = np.array(_vec3(g.get("k_per_m", [1.0, 0.0, 0.0]), "gauge.k_per_m"))
            phase = float(g.get("phase_rad", 0.0))
            return ScalarGauge(theta=lambda p: amp * np.sin(p @ k + phase),
                               scale=abs(amp))
        raise ConfigError(f"unknown gauge kind {kind!r}")

    def scenario(self) -> ScenarioField:
        return build_scenario(self.scenario_tag, self.solenoid(),
                              shield=self.shield(), gauge_choice=self.gauge())

    def loop(self) -> ParametricLoop:
        lp = self.loop_raw
        if not lp:
            raise ConfigError("this subcommand needs a 'loop' section")
        _need(lp, "loop", "radius_m")
        center = Point3(*_vec3(lp.get("center_m", [0.0, 0.0, 0.0]), "loop.center_m"))
        normal = np.array(_vec3(lp.get("normal", [0.0, 0.0, 1.0]), "loop.normal"))
        nrm = np.linalg.norm(normal)
        if nrm == 0.0:
            raise ConfigError("loop.normal must be nonzero")
        from .geometry import make_circle_loop
        return make_circle_loop(center, float(lp["radius_m"]), normal / nrm,
                                orientation=int(lp.get("orientation", 1)),
                                samples=int(lp.get("samples_per_segment", 64)) * 4)

    def annulus_mesh(self) -> AnnularMesh:
        m = self.mesh_raw
        if not m:
            raise ConfigError("this subcommand needs a 'mesh' section")
        _need(m, "mesh", "inner_r_m", "outer_r_m")
        return mesh_annulus(float(m["inner_r_m"]), float(m["outer_r_m"]),
                            float(m.get("z_m", 0.0)),
                            int(m.get("radial_cells", 32)),
                            int(m.get("angular_cells", 128)))

    def disk_mesh(self) -> AnnularMesh:
        d = self.disk_raw
        if not d:
            raise ConfigError("this subcommand needs a 'disk' section")
        _need(d, "disk", "radius_m")
        return mesh_disk(float(d["radius_m"]), float(d.get("z_m", 0.0)),
                         int(d.get("radial_cells", 40)),
                         int(d.get("angular_cells", 256)))

    def expect_verdict(self) -> str | None:
        return self.expect_raw.get("stokes_verdict")

    def expect_monotone(self) -> bool:
        return bool(self.expect_raw.get("monotone_convergence", False))


_SOLENOID_KEYS = {"a_m": _NUM, "n_per_m": _NUM, "I_A": _NUM, "z_extent_m": _NUM}
_SHIELD_KEYS = {"inner_r_m": _NUM, "outer_r_m": _NUM, "lambda_p_m": _NUM,
                "m_carrier_kg": _NUM, "e_star_C": _NUM, "psi_inf": _NUM}
_GAUGE_KEYS = {"kind": str, "coeffs": list, "amplitude": _NUM,
               "k_per_m": list, "phase_rad": _NUM}
_LOOP_KEYS = {"center_m": list, "radius_m": _NUM, "normal": list,
              "orientation": int, "samples_per_segment": int}
_MESH_KEYS = {"inner_r_m": _NUM, "outer_r_m": _NUM, "z_m": _NUM,
              "radial_cells": int, "angular_cells": int}
_DISK_KEYS = {"radius_m": _NUM, "z_m": _NUM, "radial_cells": int,
              "angular_cells": int}
_FIELD_MAP_KEYS = {"z_m": _NUM, "half_extent_m": _NUM, "n": int}
_TRAJECTORY_KEYS = {"x0_m": list, "v0_mps": list, "mass_kg": _NUM,
                    "charge_C": _NUM, "t_ramp_s": _NUM, "ramp_shape": str,
                    "dt_s": _NUM, "t_end_s": _NUM, "record_every": int,
                    "force_model": str}
_CONVERGENCE_KEYS = {"rho_m": _NUM, "z_m": _NUM, "rows": list}
_SCREEN_KEYS = {"n_points": int, "rho_max_lambdas": _NUM}
_EXPECT_KEYS = {"stokes_verdict": str, "monotone_convergence": bool}


def load_config(path: str | Path) -> ScenarioConfig:
    """Parse and validate a scenario file; raises ConfigError on any defect."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    return parse_config(raw)


def parse_config(raw: dict) -> ScenarioConfig:
    raw = dict(raw)  # consumed destructively by _section
    tag = raw.pop("scenario", None)
    if tag not in (SCENARIO_ORIGINAL, SCENARIO_TONOMURA):
        raise ConfigError(
            f"scenario must be {SCENARIO_ORIGINAL!r} or {SCENARIO_TONOMURA!r}, got {tag!r}")

    solenoid = _section(raw, "solenoid", _SOLENOID_KEYS)
    _need(solenoid, "solenoid", "a_m", "n_per_m", "I_A")

    cfg = ScenarioConfig(
        scenario_tag=tag,
        solenoid_raw=solenoid,
        shield_raw=_section(raw, "shield", _SHIELD_KEYS),
        gauge_raw=_section(raw, "gauge", _GAUGE_KEYS),
        loop_raw=_section(raw, "loop", _LOOP_KEYS),
        mesh_raw=_section(raw, "mesh", _MESH_KEYS),
        disk_raw=_section(raw, "disk", _DISK_KEYS),
        field_map_raw=_section(raw, "field_map", _FIELD_MAP_KEYS),
        trajectory_raw=_section(raw, "trajectory", _TRAJECTORY_KEYS),
        convergence_raw=_section(raw, "convergence", _CONVERGENCE_KEYS),
        screen_profile_raw=_section(raw, "screen_profile", _SCREEN_KEYS),
        expect_raw=_section(raw, "expect", _EXPECT_KEYS),
    )
    if "charge_C" in raw:
        val = raw.pop("charge_C")
        if not isinstance(val, _NUM):
            raise ConfigError("charge_C must be a number")
        cfg.charge = float(val)
    if "hbar_Js" in raw:
        val = raw.pop("hbar_Js")
        if not isinstance(val, _NUM) or val <= 0:
            raise ConfigError("hbar_Js must be a positive number")
        cfg.hbar = float(val)
    if raw:
        raise ConfigError(f"unknown top-level keys: {sorted(raw)}")

    for key in ("a_m", "n_per_m"):
        if solenoid[key] <= 0:
            raise ConfigError(f"solenoid.{key} must be > 0")
    if "z_extent_m" in solenoid and solenoid["z_extent_m"] <= 0:
        raise ConfigError("solenoid.z_extent_m must be > 0")
    if not math.isfinite(solenoid["I_A"]):
        raise ConfigError("solenoid.I_A must be finite")
    return cfg


def trajectory_params(cfg: ScenarioConfig) -> dict:
    """Validated trajectory settings with electron defaults."""
    t = cfg.trajectory_raw
    if not t:
        raise ConfigError("this subcommand needs a 'trajectory' section")
    _need(t, "trajectory", "t_ramp_s", "dt_s", "t_end_s")
    x0 = _vec3(t.get("x0_m", [0.05, 0.0, 0.0]), "trajectory.x0_m")
    v0 = _vec3(t.get("v0_mps", [0.0, 0.0, 0.0]), "trajectory.v0_mps")
    params = {
        "x0": x0,
        "v0": v0,
        "mass": float(t.get("mass_kg", ELECTRON_MASS)),
        "charge": float(t.get("charge_C", -E_CHARGE)),
        "t_ramp": float(t["t_ramp_s"]),
        "ramp_shape": t.get("ramp_shape", "smoothstep"),
        "dt": float(t["dt_s"]),
        "t_end": float(t["t_end_s"]),
        "record_every": int(t.get("record_every", 1)),
        "force_model": t.get("force_model", "induction"),
    }
    if params["dt"] <= 0 or params["t_end"] <= 0 or params["t_ramp"] <= 0:
        raise ConfigError("trajectory times must be > 0")
    if params["record_every"] < 1:
        raise ConfigError("trajectory.record_every must be >= 1")
    return params


def convergence_rows(cfg: ScenarioConfig) -> tuple[float, float, list[dict]]:
    c = cfg.convergence_raw
    if not c:
        raise ConfigError("this subcommand needs a 'convergence' section")
    _need(c, "convergence", "rho_m", "rows")
    rows = c["rows"]
    if not rows:
        raise ConfigError("convergence.rows must be non-empty")
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, dict):
            raise ConfigError(f"convergence.rows[{i}] must be an object")
        unknown = set(row) - {"z_extent_m", "n_phi", "n_z"}
        if unknown:
            raise ConfigError(f"unknown keys in convergence.rows[{i}]: {sorted(unknown)}")
        for key in ("z_extent_m", "n_phi", "n_z"):
            if key not in row:
                raise ConfigError(f"missing convergence.rows[{i}].{key}")
        out.append({"z_extent_m": float(row["z_extent_m"]),
                    "n_phi": int(row["n_phi"]), "n_z": int(row["n_z"])})
    return float(c["rho_m"]), float(c.get("z_m", 0.0)), out
