import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abfield import (Point3, cart_from_cyl, compose_loops, cyl_from_cart, line_arc,
                     loop_integral, make_circle_loop, mesh_annulus, mesh_disk,
                     scalar_mode, solenoid_a_field)
from abfield.geometry import CLOSURE_TOL, GeometryError
from abfield.modes import ScalarGauge
from tests.conftest import CIRCULATION, ZHAT

finite_coord = st.floats(min_value=-10.0, max_value=10.0,
                         allow_nan=False, allow_infinity=False)


class TestCoordinates:
    def test_axis_aligned_point(self):
        c = cyl_from_cart(Point3(1.0, 0.0, 5.0))
        assert (c.rho, c.phi, c.z) == (1.0, 0.0, 5.0)

    def test_axis_point_phi_convention(self):
        c = cyl_from_cart(Point3(0.0, 0.0, 3.0))
        assert (c.rho, c.phi, c.z) == (0.0, 0.0, 3.0)

    def test_third_quadrant(self):
        # atan2(-1, -1) = -3pi/4, normalized to 5pi/4
        c = cyl_from_cart(Point3(-1.0, -1.0, 0.0))
        assert c.rho == pytest.approx(math.sqrt(2.0), rel=1e-15)
        assert c.phi == pytest.approx(5.0 * math.pi / 4.0, rel=1e-15)
        assert c.z == 0.0

    @given(x=finite_coord, y=finite_coord, z=finite_coord)
    @settings(max_examples=200, deadline=None)
    def test_round_trip(self, x, y, z):
        p = Point3(x, y, z)
        q = cart_from_cyl(cyl_from_cart(p))
        scale = max(1.0, abs(x), abs(y), abs(z))
        assert abs(q.x - x) <= 1e-12 * scale
        assert abs(q.y - y) <= 1e-12 * scale
        assert abs(q.z - z) <= 1e-12 * scale

    def test_rejects_non_finite(self):
        with pytest.raises(GeometryError):
            Point3(math.nan, 0.0, 0.0)
        with pytest.raises(GeometryError):
            Point3(0.0, math.inf, 0.0)


class TestCircleLoop:
    def test_circumference(self):
        loop = make_circle_loop(Point3(0, 0, 0), 1.0, ZHAT, +1, 360)
        length = loop.polyline_length(per_segment=90)
        assert 2 * math.pi * (1 - 1e-4) <= length <= 2 * math.pi

    def test_closure_defect(self):
        loop = make_circle_loop(Point3(0.3, -0.2, 1.0), 0.02, ZHAT, +1, 64)
        assert loop.closure_defect() < 1e-12

    def test_orientation_reverses_integral(self, spec):
        f = solenoid_a_field(spec)
        ccw = make_circle_loop(Point3(0, 0, 0), 0.02, ZHAT, +1, 64)
        cw = make_circle_loop(Point3(0, 0, 0), 0.02, ZHAT, -1, 64)
        assert loop_integral(f, ccw).value == pytest.approx(
            -loop_integral(f, cw).value, rel=1e-14)

    def test_reversed_negates_exactly_to_roundoff(self, spec):
        f = solenoid_a_field(spec)
        loop = make_circle_loop(Point3(0.01, 0.002, 0), 0.05, ZHAT, +1, 64)
        fwd = loop_integral(f, loop).value
        bwd = loop_integral(f, loop.reversed()).value
        assert bwd == pytest.approx(-fwd, rel=5e-15)

    def test_rejects_bad_inputs(self):
        with pytest.raises(GeometryError):
            make_circle_loop(Point3(0, 0, 0), -1.0, ZHAT, +1, 64)
        with pytest.raises(GeometryError):
            make_circle_loop(Point3(0, 0, 0), 1.0, np.array([0.0, 0.0, 2.0]), +1, 64)
        with pytest.raises(GeometryError):
            make_circle_loop(Point3(0, 0, 0), 1.0, ZHAT, +1, 4)

    @given(radius=st.floats(min_value=0.01, max_value=1.0),
           cx=finite_coord, cy=finite_coord)
    @settings(max_examples=50, deadline=None)
    def test_always_closed(self, radius, cx, cy):
        loop = make_circle_loop(Point3(cx, cy, 0.0), radius, ZHAT, +1, 64)
        assert loop.closure_defect() < CLOSURE_TOL


class TestComposeLoops:
    @staticmethod
    def _composed(spec):
        outer = make_circle_loop(Point3(0, 0, 0), 0.03, ZHAT, +1, 64)
        inner = make_circle_loop(Point3(0, 0, 0), 0.02, ZHAT, -1, 64)
        bridge_out = line_arc(np.array([0.03, 0.0, 0.0]), np.array([0.02, 0.0, 0.0]))
        bridge_back = line_arc(np.array([0.02, 0.0, 0.0]), np.array([0.03, 0.0, 0.0]))
        return outer, inner, compose_loops(outer, inner, bridge_out, bridge_back)

    def test_gradient_field_vanishes(self, spec):
        _, _, composed = self._composed(spec)
        gauge = ScalarGauge(theta=lambda p: p[:, 0] ** 2 - 0.5 * p[:, 1] * p[:, 2],
                            scale=0.01)
        res = loop_integral(scalar_mode(gauge), composed)
        assert abs(res.value) <= max(1e-12, 5.0 * res.error_estimate)

    def test_opposite_enclosures_cancel(self, spec):
        # Outer CCW encloses the flux once (+), inner CW once (-): net zero.
        _, _, composed = self._composed(spec)
        res = loop_integral(solenoid_a_field(spec), composed)
        assert abs(res.value) <= max(1e-12, 10.0 * res.error_estimate)
        assert abs(res.value) < 1e-9 * CIRCULATION

    def test_equals_sum_of_parts(self, spec):
        f = solenoid_a_field(spec)
        outer, inner, composed = self._composed(spec)
        total = loop_integral(f, outer).value + loop_integral(f, inner).value
        got = loop_integral(f, composed).value
        assert got == pytest.approx(total, abs=1e-9 * CIRCULATION + abs(total) * 1e-9)

    def test_rejects_detached_bridge(self):
        outer = make_circle_loop(Point3(0, 0, 0), 0.03, ZHAT, +1, 64)
        inner = make_circle_loop(Point3(0, 0, 0), 0.02, ZHAT, -1, 64)
        bad = line_arc(np.array([0.031, 0.0, 0.0]), np.array([0.02, 0.0, 0.0]))
        back = line_arc(np.array([0.02, 0.0, 0.0]), np.array([0.03, 0.0, 0.0]))
        with pytest.raises(GeometryError):
            compose_loops(outer, inner, bad, back)


class TestMeshes:
    def test_annulus_area(self):
        mesh = mesh_annulus(1.0, 2.0, 0.0, 64, 256)
        assert mesh.total_area() == pytest.approx(3.0 * math.pi, rel=1e-3)

    def test_refinement_is_second_order(self):
        exact = 3.0 * math.pi
        err1 = abs(mesh_annulus(1.0, 2.0, 0.0, 16, 64).total_area() - exact)
        err2 = abs(mesh_annulus(1.0, 2.0, 0.0, 32, 128).total_area() - exact)
        assert err1 / err2 >= 2.0

    def test_disk_area_and_tag(self):
        disk = mesh_disk(0.02, 0.0, 40, 256)
        assert disk.total_area() == pytest.approx(math.pi * 0.02 ** 2, rel=1e-3)
        assert disk.region_tag == "simply_connected"
        assert disk.inner_boundary is None

    def test_annulus_rejects_degenerate(self):
        with pytest.raises(GeometryError):
            mesh_annulus(0.0, 1.0, 0.0, 8, 8)
        with pytest.raises(GeometryError):
            mesh_annulus(2.0, 1.0, 0.0, 8, 8)

    def test_boundary_orientations(self, spec):
        # Induced convention: outer CCW gives +flux-equivalent, inner CW gives -.
        mesh = mesh_annulus(0.02, 0.04, 0.0, 8, 64)
        f = solenoid_a_field(spec)
        outer = loop_integral(f, mesh.outer_boundary).value
        inner = loop_integral(f, mesh.inner_boundary).value
        assert outer == pytest.approx(CIRCULATION, rel=1e-12)
        assert inner == pytest.approx(-CIRCULATION, rel=1e-12)

    def test_positive_face_areas(self):
        mesh = mesh_annulus(0.5, 1.5, 0.2, 8, 16)
        assert np.all(mesh.areas > 0.0)
        assert np.allclose(mesh.area_vectors[:, 2], mesh.areas)


class TestSerialization:
    def test_loop_json(self):
        loop = make_circle_loop(Point3(0, 0, 0), 1.0, ZHAT, +1, 16)
        data = json.loads(loop.to_json(per_segment=4))
        assert data["type"] == "loop"
        assert len(data["points"]) == 17  # 4 segments x 4 + closing point
        first, last = data["points"][0], data["points"][-1]
        assert np.allclose(first, last)

    def test_mesh_json(self):
        mesh = mesh_annulus(1.0, 2.0, 0.0, 4, 8)
        data = json.loads(mesh.to_json())
        assert data["region_tag"] == "annular"
        assert data["n_faces"] == 32
        assert len(data["faces"]) == 32
