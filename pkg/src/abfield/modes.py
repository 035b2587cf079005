"""Vector-potential modes: sheet-current quadrature, the analytic solenoid
solution, pure-gauge gradient fields, cylindrical curl stencils, and the
spectral Helmholtz projector.

Naming note: the divergence-free part of the potential is called the
"longitudinal" mode throughout this package (and its projector written as
P_ij = delta_ij - k_i k_j / |k|^2), even though that operator is
conventionally known as the transverse projector. The Coulomb-gauge
solution sourced by the current integral is indeed divergence-free; the
API keeps the nonstandard name deliberately.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .constants import MU_0
from .geometry import Point3
from .sources import SolenoidSpec, SurfaceCurrent

_EPS = float(np.finfo(float).eps)

GRAD_STEP = 1e-6        # m, central-difference step for gradient fields
CURL_STEP_FRACTION = 1e-5  # default curl stencil step = fraction * local rho


class FieldEvaluationError(ValueError):
    """Field requested where its numerics are invalid (singular set, axis)."""


def _as_points(x) -> tuple[np.ndarray, bool]:
    """Normalize input to (N, 3); second value tells if input was a single point."""
    if isinstance(x, Point3):
        return x.as_array()[None, :], True
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        if arr.shape != (3,):
            raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
        return arr[None, :], True
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ValueError(f"expected (N, 3) points, got shape {arr.shape}")
    return arr, False


@dataclass(frozen=True)
class VectorField:
    """Evaluatable 3-vector field with a declared gauge-mode tag.

    ``evaluator`` maps (N, 3) Cartesian points to (N, 3) values (T*m for
    potentials, T for magnetic fields). ``eval_noise`` is the absolute
    per-component evaluation uncertainty (zero for closed-form fields,
    nonzero for finite-difference constructions); quadrature error
    estimates fold it in.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    mode_tag: str
    metadata: str = ""
    eval_noise: float = 0.0

    _TAGS = ("longitudinal", "scalar", "total", "magnetic")

    def __post_init__(self):
        if self.mode_tag not in self._TAGS:
            raise ValueError(f"mode_tag must be one of {self._TAGS}, got {self.mode_tag!r}")

    def __call__(self, x) -> np.ndarray:
        pts, single = _as_points(x)
        if not np.all(np.isfinite(pts)):
            raise FieldEvaluationError("non-finite evaluation point")
        out = np.asarray(self.evaluator(pts), dtype=float)
        if out.shape != pts.shape:
            raise FieldEvaluationError(
                f"evaluator returned shape {out.shape}, expected {pts.shape}")
        return out[0] if single else out


# ---------------------------------------------------------------------------
# Sheet-current quadrature for the divergence-free mode
# ---------------------------------------------------------------------------

_CHUNK = 16  # eval points per distance-matrix chunk; fixed for determinism


def longitudinal_from_current(src: SurfaceCurrent, x) -> np.ndarray:
    """Divergence-free potential from the sampled sheet current.

    Returns (mu0 / 4 pi) * sum_k w_k K phihat_k / |x - x'_k| at each
    requested point. Points closer to the sheet samples than one sample
    spacing are rejected: the midpoint quadrature is not valid there.
    """
    pts, single = _as_points(x)
    coeff = MU_0 / (4.0 * math.pi) * src.density
    moments = src.directions * src.weights[:, None]          # (M, 3)
    out = np.empty_like(pts)
    for start in range(0, pts.shape[0], _CHUNK):
        chunk = pts[start:start + _CHUNK]                    # (C, 3)
        diff = chunk[:, None, :] - src.points[None, :, :]    # (C, M, 3)
        r = np.sqrt(np.sum(diff * diff, axis=2))             # (C, M)
        rmin = r.min(axis=1)
        if np.any(rmin < src.spacing):
            bad = int(np.argmin(rmin))
            raise FieldEvaluationError(
                f"evaluation point {chunk[bad]} is {rmin[bad]:.3e} m from the "
                f"current sheet; quadrature requires > {src.spacing:.3e} m")
        out[start:start + _CHUNK] = (1.0 / r) @ moments
    out *= coeff
    return out[0] if single else out


def quadrature_a_field(src: SurfaceCurrent) -> VectorField:
    """Wrap the sheet-current quadrature as a VectorField."""
    return VectorField(evaluator=lambda p: longitudinal_from_current(src, p),
                       mode_tag="longitudinal",
                       metadata=f"sheet-current quadrature, {src.points.shape[0]} samples")


# ---------------------------------------------------------------------------
# Analytic infinite-solenoid potential and bore field
# ---------------------------------------------------------------------------

def solenoid_longitudinal_analytic(spec: SolenoidSpec, x) -> np.ndarray:
    """Closed-form Coulomb-gauge potential of the infinite solenoid.

    Exterior (rho >= a): A_phi = mu0 n I a^2 / (2 rho); interior:
    A_phi = mu0 n I rho / 2; A_rho = A_z = 0 everywhere; continuous at
    rho = a and regular (zero) on the axis. Returned in Cartesian
    components; general axis via the spec's frame.
    """
    if not spec.is_infinite:
        raise FieldEvaluationError("closed form requires an infinite solenoid")
    pts, single = _as_points(x)
    rho, phi, _ = spec.local_cyl(pts)
    c = MU_0 * spec.n * spec.current
    a_phi = np.where(rho >= spec.a,
                     0.5 * c * spec.a * spec.a / np.where(rho > 0.0, rho, 1.0),
                     0.5 * c * rho)
    a_phi = np.where(rho > 0.0, a_phi, 0.0)
    u, v, _ = spec.frame()
    azimuth = -np.outer(np.sin(phi), u) + np.outer(np.cos(phi), v)
    out = a_phi[:, None] * azimuth
    return out[0] if single else out


def solenoid_a_field(spec: SolenoidSpec) -> VectorField:
    return VectorField(evaluator=lambda p: solenoid_longitudinal_analytic(spec, p),
                       mode_tag="longitudinal",
                       metadata=f"analytic solenoid potential, a={spec.a}, "
                                f"n={spec.n}, I={spec.current}")


def solenoid_bore_b_field(spec: SolenoidSpec) -> VectorField:
    """Uniform bore field mu0 n I along the axis inside rho < a, zero outside."""
    if not spec.is_infinite:
        raise FieldEvaluationError("bore field closed form requires an infinite solenoid")
    b0 = MU_0 * spec.n * spec.current
    _, _, w = spec.frame()

    def evaluator(pts):
        rho, _, _ = spec.local_cyl(pts)
        return np.where(rho[:, None] < spec.a, b0 * w, 0.0)

    return VectorField(evaluator=evaluator, mode_tag="magnetic",
                       metadata=f"solenoid bore field, B0={b0}")


# ---------------------------------------------------------------------------
# Pure-gauge (scalar) mode
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarGauge:
    """Single-valued gauge function theta (T*m^2) on a declared domain.

    ``theta`` maps (N, 3) points to (N,) values; ``scale`` is its typical
    magnitude, used to size the finite-difference noise floor; ``domain``
    (optional) returns a boolean mask of valid points.
    """

    theta: Callable[[np.ndarray], np.ndarray]
    scale: float = 1.0
    domain: Callable[[np.ndarray], np.ndarray] | None = None

    def values(self, pts: np.ndarray) -> np.ndarray:
        vals = np.asarray(self.theta(pts), dtype=float)
        if vals.shape != (pts.shape[0],):
            raise FieldEvaluationError(
                f"gauge function returned shape {vals.shape}, expected ({pts.shape[0]},)")
        return vals


def scalar_mode(g: ScalarGauge, x=None, h_grad: float = GRAD_STEP):
    """Pure-gauge field grad(theta) by central differences.

    With points given, returns the gradient there; without, returns a
    VectorField tagged "scalar". The field's eval_noise records the
    rounding floor eps*scale/h plus the O(h^2) truncation scale, so loop
    integrals of this field report honest error estimates.
    """
    def evaluator(pts):
        if g.domain is not None:
            ok = np.asarray(g.domain(pts), dtype=bool)
            if not np.all(ok):
                bad = pts[~ok][0]
                raise FieldEvaluationError(f"point {bad} outside gauge domain")
        out = np.empty_like(pts)
        for i in range(3):
            dp = np.zeros(3)
            dp[i] = h_grad
            out[:, i] = (g.values(pts + dp) - g.values(pts - dp)) / (2.0 * h_grad)
        return out

    noise = g.scale * (2.0 * _EPS / h_grad + h_grad * h_grad)
    field = VectorField(evaluator=evaluator, mode_tag="scalar",
                        metadata="central-difference gradient of gauge function",
                        eval_noise=noise)
    if x is None:
        return field
    return field(x)


# ---------------------------------------------------------------------------
# Cylindrical curl stencil
# ---------------------------------------------------------------------------

def _cyl_components(values: np.ndarray, phi: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Project Cartesian vectors onto (rhohat, phihat, zhat) at azimuth phi."""
    c, s = np.cos(phi), np.sin(phi)
    v_rho = values[:, 0] * c + values[:, 1] * s
    v_phi = -values[:, 0] * s + values[:, 1] * c
    return v_rho, v_phi, values[:, 2]


def curl_cylindrical(f: VectorField, x, h: float | np.ndarray | None = None) -> np.ndarray:
    """Central-difference curl in cylindrical components about the z-axis.

    Returns (B_rho, B_phi, B_z) per point, where
      B_rho = (1/rho) dA_z/dphi - dA_phi/dz
      B_phi = dA_rho/dz - dA_z/drho
      B_z   = (1/rho) d(rho A_phi)/drho - (1/rho) dA_rho/dphi
    O(h^2) accurate; the default step is CURL_STEP_FRACTION * rho per point.
    """
    pts, single = _as_points(x)
    rho = np.hypot(pts[:, 0], pts[:, 1])
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    z = pts[:, 2]
    if h is None:
        h = CURL_STEP_FRACTION * rho
    h = np.broadcast_to(np.asarray(h, dtype=float), rho.shape).copy()
    if np.any(rho <= 2.0 * h):
        bad = int(np.argmin(rho - 2.0 * h))
        raise FieldEvaluationError(
            f"stencil too close to the axis: rho={rho[bad]:.3e} m needs > 2h={2*h[bad]:.3e} m")

    def at(rho_s, phi_s, z_s):
        p = np.stack([rho_s * np.cos(phi_s), rho_s * np.sin(phi_s), z_s], axis=1)
        return _cyl_components(f(p), phi_s)

    dphi = h / rho  # angular step subtending arc length h

    r_p = at(rho + h, phi, z)
    r_m = at(rho - h, phi, z)
    p_p = at(rho, phi + dphi, z)
    p_m = at(rho, phi - dphi, z)
    z_p = at(rho, phi, z + h)
    z_m = at(rho, phi, z - h)

    d_phi = 2.0 * dphi
    d_lin = 2.0 * h

    b_rho = (p_p[2] - p_m[2]) / (rho * d_phi) - (z_p[1] - z_m[1]) / d_lin
    b_phi = (z_p[0] - z_m[0]) / d_lin - (r_p[2] - r_m[2]) / d_lin
    b_z = (((rho + h) * r_p[1] - (rho - h) * r_m[1]) / d_lin
           - (p_p[0] - p_m[0]) / d_phi) / rho

    out = np.stack([b_rho, b_phi, b_z], axis=1)
    return out[0] if single else out


def curl_field(f: VectorField, h: float | None = None) -> VectorField:
    """Curl of ``f`` as a Cartesian VectorField (magnetic mode)."""
    def evaluator(pts):
        cyl = curl_cylindrical(f, pts, h)
        phi = np.arctan2(pts[:, 1], pts[:, 0])
        c, s = np.cos(phi), np.sin(phi)
        bx = cyl[:, 0] * c - cyl[:, 1] * s
        by = cyl[:, 0] * s + cyl[:, 1] * c
        return np.stack([bx, by, cyl[:, 2]], axis=1)

    return VectorField(evaluator=evaluator, mode_tag="magnetic",
                       metadata=f"stencil curl of [{f.metadata}]",
                       eval_noise=0.0)


# ---------------------------------------------------------------------------
# Spectral Helmholtz projector on a periodic grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridField:
    """Periodic N^3 sampling of a 3-vector field on a cube of side box_size."""

    box_size: float
    samples: np.ndarray  # (N, N, N, 3)

    def __post_init__(self):
        s = self.samples
        if s.ndim != 4 or s.shape[3] != 3 or len({s.shape[0], s.shape[1], s.shape[2]}) != 1:
            raise ValueError(f"samples must be (N, N, N, 3), got {s.shape}")
        n = s.shape[0]
        if n < 8 or n % 2 != 0:
            raise ValueError(f"grid size must be even and >= 8, got {n}")
        if not np.all(np.isfinite(s)):
            raise ValueError("grid samples must be finite")
        if self.box_size <= 0.0:
            raise ValueError("box_size must be > 0")

    @property
    def n(self) -> int:
        return int(self.samples.shape[0])

    @property
    def spacing(self) -> float:
        return self.box_size / self.n


def _wavevectors(grid: GridField) -> np.ndarray:
    k1d = 2.0 * math.pi * np.fft.fftfreq(grid.n, d=grid.spacing)
    # Zero the Nyquist wavenumber: its sign is ambiguous on an even grid and
    # keeping it breaks the projector's conjugate symmetry (complex output).
    # Those modes pass through unprojected, like k = 0.
    k1d[grid.n // 2] = 0.0
    kx, ky, kz = np.meshgrid(k1d, k1d, k1d, indexing="ij")
    return np.stack([kx, ky, kz], axis=-1)


def helmholtz_project(grid: GridField) -> tuple[GridField, GridField]:
    """Split a periodic grid field with P_ij(k) = delta_ij - k_i k_j / |k|^2.

    Returns (longitudinal_part, remainder): the first is the projected
    (divergence-free) part, the second the pure-gradient rest, and their
    sum reconstructs the input exactly. The k = 0 mode passes through
    unchanged (a uniform field is divergence-free; the projector is
    singular there), and so do the Nyquist planes of an even grid, whose
    wavenumber sign is ambiguous; smooth band-limited inputs have no
    content there.
    """
    fhat = np.fft.fftn(grid.samples, axes=(0, 1, 2))
    k = _wavevectors(grid)
    k2 = np.sum(k * k, axis=-1)
    # k2 = 0 on the k = 0 mode and the pure-Nyquist modes; k is the zero
    # vector there, so the gradient part vanishes on its own once the
    # denominator is made safe.
    k2[k2 == 0.0] = 1.0
    kdotf = np.sum(k * fhat, axis=-1)
    grad_hat = k * (kdotf / k2)[..., None]
    proj = np.real(np.fft.ifftn(fhat - grad_hat, axes=(0, 1, 2)))
    return (GridField(grid.box_size, proj),
            GridField(grid.box_size, grid.samples - proj))


def spectral_divergence(grid: GridField) -> float:
    """Relative spectral divergence: |k . Fhat| over |k||Fhat|, L2 norms."""
    fhat = np.fft.fftn(grid.samples, axes=(0, 1, 2))
    k = _wavevectors(grid)
    num = np.linalg.norm(np.sum(k * fhat, axis=-1))
    den = np.linalg.norm(np.linalg.norm(k, axis=-1)[..., None] * fhat)
    return float(num / den) if den > 0.0 else 0.0


# ---------------------------------------------------------------------------
# Grid import/export (JSON header + flat binary, or CSV)
# ---------------------------------------------------------------------------

def write_grid_field(grid: GridField, path: str | Path, fmt: str = "csv") -> list[Path]:
    """Write a grid field as CSV rows or a JSON header plus raw float64 blob.

    CSV columns are i,j,k,Fx,Fy,Fz in row-major index order. The binary
    format writes ``<path>.json`` describing ``<path>.bin`` (C-order
    float64, shape (N, N, N, 3)).
    """
    path = Path(path)
    if fmt == "csv":
        n = grid.n
        idx = np.indices((n, n, n)).reshape(3, -1).T
        flat = grid.samples.reshape(-1, 3)
        with open(path, "w", newline="") as fh:
            fh.write("i,j,k,Fx,Fy,Fz\n")
            for (i, j, kk), v in zip(idx, flat):
                fh.write(f"{i},{j},{kk},{v[0]!r},{v[1]!r},{v[2]!r}\n")
        return [path]
    if fmt == "json+bin":
        bin_path = path.with_suffix(".bin")
        header = {"box_size_m": grid.box_size, "n": grid.n, "dtype": "float64",
                  "order": "C", "shape": [grid.n, grid.n, grid.n, 3],
                  "bin_file": bin_path.name}
        path.with_suffix(".json").write_text(json.dumps(header, sort_keys=True))
        grid.samples.astype("<f8").tofile(bin_path)
        return [path.with_suffix(".json"), bin_path]
    raise ValueError(f"unknown grid format {fmt!r}")


def read_grid_field(json_path: str | Path) -> GridField:
    json_path = Path(json_path)
    header = json.loads(json_path.read_text())
    data = np.fromfile(json_path.parent / header["bin_file"], dtype="<f8")
    return GridField(header["box_size_m"], data.reshape(header["shape"]))
