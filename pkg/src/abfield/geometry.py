"""Curves, loop composition, coordinate conversions, and surface meshes.

Everything here is geometry only: oriented closed curves built from
parametric arcs (for circulation integrals) and planar polygon meshes of
annuli and disks (for flux integrals). All objects are immutable after
construction and safe for concurrent reads.

Conventions:
  * closure/continuity tolerance is CLOSURE_TOL (absolute, meters);
    geometry is desk-scale, so 1e-9 m is far below any physical scale.
  * induced orientation for an annulus with normal +z: outer boundary
    counterclockwise, inner boundary clockwise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

CLOSURE_TOL = 1e-9  # m, absolute endpoint-matching tolerance

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """Invalid geometric construction (open curve, bad mesh, ...)."""


@dataclass(frozen=True)
class Point3:
    """Cartesian point, components in meters."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for c in (self.x, self.y, self.z):
            if not math.isfinite(c):
                raise GeometryError(f"non-finite Point3 component: {c!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class CylPoint:
    """Cylindrical point: rho >= 0 (m), phi in [0, 2pi), z (m)."""

    rho: float
    phi: float
    z: float

    def __post_init__(self):
        if not (math.isfinite(self.rho) and math.isfinite(self.phi) and math.isfinite(self.z)):
            raise GeometryError("non-finite CylPoint component")
        if self.rho < 0.0:
            raise GeometryError(f"rho must be >= 0, got {self.rho}")
        if not (0.0 <= self.phi < TWO_PI):
            raise GeometryError(f"phi must lie in [0, 2pi), got {self.phi}")


def cyl_from_cart(p: Point3) -> CylPoint:
    """Convert Cartesian to cylindrical; rho = 0 maps to phi = 0."""
    rho = math.hypot(p.x, p.y)
    if rho == 0.0:
        return CylPoint(0.0, 0.0, p.z)
    phi = math.atan2(p.y, p.x) % TWO_PI
    if phi >= TWO_PI:  # atan2 can round -eps to 2pi after the modulo
        phi = 0.0
    return CylPoint(rho, phi, p.z)


def cart_from_cyl(c: CylPoint) -> Point3:
    return Point3(c.rho * math.cos(c.phi), c.rho * math.sin(c.phi), c.z)


# ---------------------------------------------------------------------------
# Parametric arcs and closed loops
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Arc:
    """One parametric arc t in [0, 1] -> R^3.

    ``point`` must accept a 1-D float array of parameters and return an
    (n, 3) array. ``velocity`` is the analytic derivative d(point)/dt when
    available; otherwise a central difference is used (adequate for the
    interior quadrature nodes, which never sit on t = 0 or 1).
    """

    point: Callable[[np.ndarray], np.ndarray]
    velocity: Callable[[np.ndarray], np.ndarray] | None = None

    def points(self, t: np.ndarray) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        p = np.asarray(self.point(t), dtype=float)
        if p.shape != (t.size, 3):
            raise GeometryError(f"arc map returned shape {p.shape}, expected {(t.size, 3)}")
        return p

    def velocities(self, t: np.ndarray, h: float = 1e-7) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.velocity is not None:
            v = np.asarray(self.velocity(t), dtype=float)
            if v.shape != (t.size, 3):
                raise GeometryError(f"arc velocity returned shape {v.shape}")
            return v
        tp = np.clip(t + h, 0.0, 1.0)
        tm = np.clip(t - h, 0.0, 1.0)
        return (self.points(tp) - self.points(tm)) / (tp - tm)[:, None]

    def start(self) -> np.ndarray:
        return self.points(np.array([0.0]))[0]

    def end(self) -> np.ndarray:
        return self.points(np.array([1.0]))[0]

    def reversed(self) -> "Arc":
        fwd_p, fwd_v = self.point, self.velocity
        rev_v = None
        if fwd_v is not None:
            rev_v = lambda t: -np.asarray(fwd_v(1.0 - np.asarray(t, dtype=float)))
        return Arc(point=lambda t: np.asarray(fwd_p(1.0 - np.asarray(t, dtype=float))),
                   velocity=rev_v)


def line_arc(p0: Point3 | np.ndarray, p1: Point3 | np.ndarray) -> Arc:
    """Straight segment from p0 to p1 (the default bridge shape)."""
    a = p0.as_array() if isinstance(p0, Point3) else np.asarray(p0, dtype=float)
    b = p1.as_array() if isinstance(p1, Point3) else np.asarray(p1, dtype=float)
    d = b - a
    return Arc(point=lambda t: a + np.outer(np.asarray(t, dtype=float), d),
               velocity=lambda t: np.broadcast_to(d, (np.size(t), 3)).copy())


def _orthonormal_frame(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right-handed frame (u, v, n) with n the given unit normal."""
    n = np.asarray(normal, dtype=float)
    seed = np.array([1.0, 0.0, 0.0]) if abs(n[0]) <= 0.9 else np.array([0.0, 1.0, 0.0])
    u = seed - np.dot(seed, n) * n
    u /= np.linalg.norm(u)
    v = np.cross(n, u)
    return u, v, n


def circle_arc(center: np.ndarray, radius: float, normal: np.ndarray,
               angle0: float, angle1: float) -> Arc:
    """Circular arc about ``normal`` from angle0 to angle1 (radians).

    Angles are measured in the (u, v) plane of the right-handed frame built
    on ``normal``; increasing angle is counterclockwise seen from the
    normal's tip.
    """
    u, v, _ = _orthonormal_frame(normal)
    c = np.asarray(center, dtype=float)
    span = angle1 - angle0

    def pt(t):
        ang = angle0 + span * np.asarray(t, dtype=float)
        return c + radius * (np.outer(np.cos(ang), u) + np.outer(np.sin(ang), v))

    def vel(t):
        ang = angle0 + span * np.asarray(t, dtype=float)
        return radius * span * (-np.outer(np.sin(ang), u) + np.outer(np.cos(ang), v))

    return Arc(point=pt, velocity=vel)


@dataclass(frozen=True)
class ParametricLoop:
    """Oriented closed curve made of parametric arcs.

    Invariants (checked at construction): consecutive arcs share endpoints
    and the last arc closes back onto the first, both within CLOSURE_TOL.
    ``orientation`` records the traversal sense (+1 counterclockwise with
    respect to the declared normal); the sense is baked into the arc
    parametrizations, the tag is bookkeeping for mesh/boundary conventions.
    """

    segments: tuple[Arc, ...]
    orientation: int = +1
    samples_per_segment: int = 64
    normal_hint: tuple[float, float, float] = (0.0, 0.0, 1.0)

    def __post_init__(self):
        if not self.segments:
            raise GeometryError("loop needs at least one segment")
        if self.orientation not in (+1, -1):
            raise GeometryError(f"orientation must be +1 or -1, got {self.orientation}")
        if self.samples_per_segment < 1:
            raise GeometryError("samples_per_segment must be positive")
        ends = [seg.end() for seg in self.segments]
        starts = [seg.start() for seg in self.segments]
        for k in range(len(self.segments)):
            nxt = (k + 1) % len(self.segments)
            gap = float(np.linalg.norm(ends[k] - starts[nxt]))
            if gap > CLOSURE_TOL:
                raise GeometryError(
                    f"segment {k} ends {gap:.3e} m away from segment {nxt} start "
                    f"(closure tolerance {CLOSURE_TOL:.0e} m)")

    def closure_defect(self) -> float:
        """Max endpoint gap over all junctions (m); < CLOSURE_TOL by construction."""
        gaps = []
        for k, seg in enumerate(self.segments):
            nxt = self.segments[(k + 1) % len(self.segments)]
            gaps.append(float(np.linalg.norm(seg.end() - nxt.start())))
        return max(gaps)

    def sample_points(self, per_segment: int | None = None) -> np.ndarray:
        """Polyline sampling, per-segment uniform, including the closing point."""
        n = per_segment or self.samples_per_segment
        pts = [seg.points(np.linspace(0.0, 1.0, n, endpoint=False)) for seg in self.segments]
        pts.append(self.segments[0].points(np.array([0.0])))
        return np.vstack(pts)

    def polyline_length(self, per_segment: int | None = None) -> float:
        pts = self.sample_points(per_segment)
        return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))

    def reversed(self) -> "ParametricLoop":
        """Same point set traversed the opposite way; negates loop integrals."""
        segs = tuple(seg.reversed() for seg in reversed(self.segments))
        return ParametricLoop(segments=segs, orientation=-self.orientation,
                              samples_per_segment=self.samples_per_segment,
                              normal_hint=self.normal_hint)

    def to_json(self, per_segment: int | None = None) -> str:
        pts = self.sample_points(per_segment)
        return json.dumps({
            "type": "loop",
            "orientation": self.orientation,
            "samples_per_segment": per_segment or self.samples_per_segment,
            "points": [[float(c) for c in p] for p in pts],
        }, sort_keys=True)


def make_circle_loop(center: Point3, radius: float, normal: np.ndarray,
                     orientation: int = +1, samples: int = 64,
                     start_angle: float = 0.0, n_segments: int = 4,
                     windings: int = 1) -> ParametricLoop:
    """Planar circle, split into ``n_segments`` arcs for composite quadrature.

    ``orientation`` +1 traverses counterclockwise around ``normal``, -1
    clockwise; ``start_angle`` places the start point (useful for attaching
    bridges); ``windings`` > 1 wraps the circle that many times.
    """
    if radius <= 0.0:
        raise GeometryError(f"radius must be > 0, got {radius}")
    if samples < 8:
        raise GeometryError(f"need samples >= 8, got {samples}")
    if windings < 1:
        raise GeometryError("windings must be >= 1")
    n = np.asarray(normal, dtype=float)
    if abs(np.linalg.norm(n) - 1.0) > 1e-9:
        raise GeometryError(f"normal must be a unit vector, |n| = {np.linalg.norm(n):.6f}")
    c = center.as_array()
    total = TWO_PI * windings * orientation
    n_arcs = n_segments * windings
    angles = start_angle + total * np.linspace(0.0, 1.0, n_arcs + 1)
    segs = tuple(circle_arc(c, radius, n, angles[k], angles[k + 1]) for k in range(n_arcs))
    return ParametricLoop(segments=segs, orientation=orientation,
                          samples_per_segment=max(1, samples // n_segments),
                          normal_hint=tuple(float(v) for v in n))


def compose_loops(outer: ParametricLoop, inner: ParametricLoop,
                  bridge_out: Arc, bridge_back: Arc) -> ParametricLoop:
    """Join two loops into one closed curve via a bridge traversed both ways.

    The composed curve runs: outer, bridge_out, inner, bridge_back. For a
    continuous field the two bridge traversals cancel, so the composed loop
    integral equals the sum of the two separate loop integrals. The caller
    is responsible for giving ``inner`` the induced (opposite) orientation.
    """
    def _require(a: np.ndarray, b: np.ndarray, what: str):
        gap = float(np.linalg.norm(a - b))
        if gap > CLOSURE_TOL:
            raise GeometryError(f"{what} misses by {gap:.3e} m (tolerance {CLOSURE_TOL:.0e})")

    _require(outer.segments[-1].end(), bridge_out.start(), "bridge_out start vs outer")
    _require(bridge_out.end(), inner.segments[0].start(), "bridge_out end vs inner")
    _require(inner.segments[-1].end(), bridge_back.start(), "bridge_back start vs inner")
    _require(bridge_back.end(), outer.segments[0].start(), "bridge_back end vs outer")
    _require(bridge_back.start(), bridge_out.end(), "bridge_back reversal (start)")
    _require(bridge_back.end(), bridge_out.start(), "bridge_back reversal (end)")

    segs = outer.segments + (bridge_out,) + inner.segments + (bridge_back,)
    return ParametricLoop(segments=segs, orientation=outer.orientation,
                          samples_per_segment=max(outer.samples_per_segment,
                                                  inner.samples_per_segment),
                          normal_hint=outer.normal_hint)


# ---------------------------------------------------------------------------
# Planar polygon meshes (annulus / disk at constant z, normal +z)
# ---------------------------------------------------------------------------

def _polygon_area_centroid(verts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized shoelace area and centroid for planar polygons.

    ``verts`` has shape (F, V, 3) with all z equal per face and vertices
    ordered counterclockwise. Degenerate edges (repeated vertices) are fine,
    which is how disk-center triangles are encoded as quads.
    """
    x = verts[..., 0]
    y = verts[..., 1]
    xn = np.roll(x, -1, axis=1)
    yn = np.roll(y, -1, axis=1)
    cross = x * yn - xn * y
    area = 0.5 * np.sum(cross, axis=1)
    cx = np.sum((x + xn) * cross, axis=1) / (6.0 * area)
    cy = np.sum((y + yn) * cross, axis=1) / (6.0 * area)
    cz = verts[:, 0, 2]
    return area, np.stack([cx, cy, cz], axis=1)


@dataclass(frozen=True)
class AnnularMesh:
    """Planar polygon mesh of an annulus or disk at constant z, normal +z.

    ``area_vectors`` are (normal * area); boundary loops carry the induced
    orientations (outer CCW, inner CW for normal +z). ``params`` records the
    generator arguments so refinement-based error estimates can re-mesh.
    """

    vertices: np.ndarray            # (F, 4, 3) quad corners, CCW
    centroids: np.ndarray           # (F, 3)
    areas: np.ndarray               # (F,)
    area_vectors: np.ndarray        # (F, 3)
    outer_boundary: ParametricLoop
    inner_boundary: ParametricLoop | None
    region_tag: str                 # "annular" | "simply_connected"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.region_tag not in ("annular", "simply_connected"):
            raise GeometryError(f"unknown region_tag {self.region_tag!r}")
        if np.any(self.areas <= 0.0):
            raise GeometryError("every mesh face must have positive area")
        if self.region_tag == "annular" and self.inner_boundary is None:
            raise GeometryError("annular mesh requires an inner boundary loop")

    @property
    def n_faces(self) -> int:
        return int(self.areas.size)

    def total_area(self) -> float:
        return float(math.fsum(self.areas.tolist()))

    def boundary_loops(self) -> tuple[ParametricLoop, ...]:
        if self.inner_boundary is None:
            return (self.outer_boundary,)
        return (self.outer_boundary, self.inner_boundary)

    def to_json(self) -> str:
        return json.dumps({
            "type": "mesh",
            "region_tag": self.region_tag,
            "n_faces": self.n_faces,
            "total_area_m2": self.total_area(),
            "faces": [[[float(c) for c in v] for v in f] for f in self.vertices],
        }, sort_keys=True)


def _polar_quads(r_edges: np.ndarray, n_ang: int, z: float) -> np.ndarray:
    """Quad vertices for a polar grid; returns (F, 4, 3)."""
    ang = np.linspace(0.0, TWO_PI, n_ang + 1)
    ca, sa = np.cos(ang), np.sin(ang)
    faces = []
    for k in range(len(r_edges) - 1):
        r0, r1 = r_edges[k], r_edges[k + 1]
        # CCW order: (r0,a0) -> (r1,a0) -> (r1,a1) -> (r0,a1)
        v0 = np.stack([r0 * ca[:-1], r0 * sa[:-1]], axis=1)
        v1 = np.stack([r1 * ca[:-1], r1 * sa[:-1]], axis=1)
        v2 = np.stack([r1 * ca[1:], r1 * sa[1:]], axis=1)
        v3 = np.stack([r0 * ca[1:], r0 * sa[1:]], axis=1)
        quad = np.stack([v0, v1, v2, v3], axis=1)        # (n_ang, 4, 2)
        faces.append(quad)
    xy = np.concatenate(faces, axis=0)
    verts = np.concatenate([xy, np.full((*xy.shape[:2], 1), z)], axis=2)
    return verts


def _build_planar_mesh(r_edges: np.ndarray, n_ang: int, z: float,
                       inner_r: float | None, region_tag: str,
                       params: dict) -> AnnularMesh:
    verts = _polar_quads(r_edges, n_ang, z)
    areas, centroids = _polygon_area_centroid(verts)
    area_vectors = np.zeros_like(centroids)
    area_vectors[:, 2] = areas
    outer_r = float(r_edges[-1])
    zc = Point3(0.0, 0.0, z)
    samples = max(64, n_ang)
    outer = make_circle_loop(zc, outer_r, np.array([0.0, 0.0, 1.0]),
                             orientation=+1, samples=samples)
    inner = None
    if inner_r is not None:
        inner = make_circle_loop(zc, inner_r, np.array([0.0, 0.0, 1.0]),
                                 orientation=-1, samples=samples)
    return AnnularMesh(vertices=verts, centroids=centroids, areas=areas,
                       area_vectors=area_vectors, outer_boundary=outer,
                       inner_boundary=inner, region_tag=region_tag, params=params)


def mesh_annulus(inner_r: float, outer_r: float, z: float,
                 radial_cells: int, angular_cells: int) -> AnnularMesh:
    """Polar-quad mesh of the annulus inner_r <= rho <= outer_r at height z.

    Total area converges to pi*(outer_r^2 - inner_r^2) at second order in
    the angular cell size (inscribed chords). Boundary loops are attached
    with induced orientations.
    """
    if not (0.0 < inner_r < outer_r):
        raise GeometryError(f"need 0 < inner_r < outer_r, got {inner_r}, {outer_r}")
    if radial_cells < 4 or angular_cells < 4:
        raise GeometryError("need at least 4 cells in each direction")
    r_edges = np.linspace(inner_r, outer_r, radial_cells + 1)
    params = {"kind": "annulus", "inner_r": inner_r, "outer_r": outer_r, "z": z,
              "radial_cells": radial_cells, "angular_cells": angular_cells}
    return _build_planar_mesh(r_edges, angular_cells, z, inner_r, "annular", params)


def mesh_disk(radius: float, z: float, radial_cells: int,
              angular_cells: int) -> AnnularMesh:
    """Polar mesh of the full disk rho <= radius (simply connected).

    The innermost ring degenerates to triangles (quads with a repeated
    vertex at the center), which the shoelace formulas handle exactly.
    """
    if radius <= 0.0:
        raise GeometryError(f"radius must be > 0, got {radius}")
    if radial_cells < 4 or angular_cells < 4:
        raise GeometryError("need at least 4 cells in each direction")
    r_edges = np.linspace(0.0, radius, radial_cells + 1)
    params = {"kind": "disk", "radius": radius, "z": z,
              "radial_cells": radial_cells, "angular_cells": angular_cells}
    return _build_planar_mesh(r_edges, angular_cells, z, None,
                              "simply_connected", params)
