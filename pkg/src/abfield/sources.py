"""Prescribed current distributions: the ideal solenoid sheet current.

A tightly wound solenoid of radius ``a`` with ``n`` turns per meter
carrying current ``I`` is modeled as the azimuthal surface current
K = n*I (A/m) on the cylinder rho = a. The infinite solenoid is truncated
at +-z_extent when discretized for quadrature; convergence toward the
infinite-solenoid analytic exterior potential is part of the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GeometryError, Point3


class SourceError(ValueError):
    """Invalid source specification or discretization."""


@dataclass(frozen=True)
class SolenoidSpec:
    """Idealized solenoid source.

    Args:
        a: coil radius (m), > 0
        n: turns per unit length (1/m), > 0
        current: steady current I (A); sign sets the field direction
        axis_point: a point on the axis (default origin)
        axis_dir: unit axis direction (default +z)
        half_length: half the coil length (m), or None for infinite
    """

    a: float
    n: float
    current: float
    axis_point: Point3 = Point3(0.0, 0.0, 0.0)
    axis_dir: tuple[float, float, float] = (0.0, 0.0, 1.0)
    half_length: float | None = None

    def __post_init__(self):
        if self.a <= 0.0:
            raise SourceError(f"solenoid radius must be > 0, got {self.a}")
        if self.n <= 0.0:
            raise SourceError(f"turns density must be > 0, got {self.n}")
        if not math.isfinite(self.current):
            raise SourceError("current must be finite")
        d = np.asarray(self.axis_dir, dtype=float)
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise SourceError(f"axis_dir must be a unit vector, |d| = {np.linalg.norm(d):.6f}")
        if self.half_length is not None and self.half_length <= 0.0:
            raise SourceError("half_length must be > 0 when finite")

    @property
    def is_infinite(self) -> bool:
        return self.half_length is None

    @property
    def sheet_current(self) -> float:
        """Surface current density K = n*I (A/m)."""
        return self.n * self.current

    def frame(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Right-handed orthonormal frame (u, v, w) with w along the axis."""
        w = np.asarray(self.axis_dir, dtype=float)
        seed = np.array([1.0, 0.0, 0.0]) if abs(w[0]) <= 0.9 else np.array([0.0, 1.0, 0.0])
        u = seed - np.dot(seed, w) * w
        u /= np.linalg.norm(u)
        v = np.cross(w, u)
        return u, v, w

    def with_current(self, current: float) -> "SolenoidSpec":
        return SolenoidSpec(self.a, self.n, current, self.axis_point,
                            self.axis_dir, self.half_length)

    def local_cyl(self, points: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(rho, phi, z) of Cartesian points in the solenoid's own frame."""
        u, v, w = self.frame()
        rel = np.atleast_2d(points) - self.axis_point.as_array()
        xu = rel @ u
        xv = rel @ v
        z = rel @ w
        rho = np.hypot(xu, xv)
        phi = np.arctan2(xv, xu)
        return rho, phi, z


@dataclass(frozen=True)
class SurfaceCurrent:
    """Quadrature sampling of the solenoid sheet current.

    ``points`` lie on the cylinder rho = a; ``directions`` are the local
    azimuthal unit vectors; each sample carries current density K (A/m)
    and an area weight (m^2). spacing is the coarser of the two grid
    pitches and bounds where the 1/|x - x'| quadrature is trustworthy.
    """

    points: np.ndarray       # (M, 3)
    directions: np.ndarray   # (M, 3), unit azimuthal
    density: float           # K = n*I (A/m)
    weights: np.ndarray      # (M,) area weights (m^2)
    spacing: float           # m
    spec: SolenoidSpec
    z_extent: float

    def total_weight(self) -> float:
        return float(math.fsum(self.weights.tolist()))

    def sampled_area(self) -> float:
        """Analytic area of the truncated cylinder, 2*pi*a * 2*z_extent."""
        return 2.0 * math.pi * self.spec.a * 2.0 * self.z_extent


def surface_current_samples(spec: SolenoidSpec, n_phi: int, n_z: int,
                            z_extent: float) -> SurfaceCurrent:
    """Discretize the solenoid sheet for the vector-potential integral.

    Samples are uniform in phi (periodic, includes phi = 0) and at z
    midpoints symmetric about the axis point, each weighted by
    (2*pi*a/n_phi) * (2*z_extent/n_z).
    """
    if n_phi < 16 or n_z < 16:
        raise SourceError(f"need n_phi >= 16 and n_z >= 16, got {n_phi}, {n_z}")
    if not (z_extent > 0.0 and math.isfinite(z_extent)):
        raise SourceError(f"z_extent must be finite and > 0, got {z_extent}")

    u, v, w = spec.frame()
    origin = spec.axis_point.as_array()
    phi = (2.0 * math.pi / n_phi) * np.arange(n_phi)
    dz = 2.0 * z_extent / n_z
    z = -z_extent + dz * (np.arange(n_z) + 0.5)

    cos_p, sin_p = np.cos(phi), np.sin(phi)
    radial = np.outer(cos_p, u) + np.outer(sin_p, v)          # (n_phi, 3)
    azimuth = -np.outer(sin_p, u) + np.outer(cos_p, v)        # (n_phi, 3)

    pts = (origin + spec.a * radial)[None, :, :] + z[:, None, None] * w
    dirs = np.broadcast_to(azimuth, (n_z, n_phi, 3))

    weight = (2.0 * math.pi * spec.a / n_phi) * dz
    weights = np.full(n_z * n_phi, weight)
    spacing = max(2.0 * math.pi * spec.a / n_phi, dz)

    return SurfaceCurrent(points=pts.reshape(-1, 3),
                          directions=np.ascontiguousarray(dirs.reshape(-1, 3)),
                          density=spec.sheet_current, weights=weights,
                          spacing=spacing, spec=spec, z_extent=z_extent)
