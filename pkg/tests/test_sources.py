import math

import numpy as np
import pytest

from abfield import Point3, SolenoidSpec, surface_current_samples
from abfield.sources import SourceError


def test_sheet_current_density(spec):
    src = surface_current_samples(spec, 32, 32, 0.5)
    assert src.density == pytest.approx(1e4, rel=1e-15)  # K = n I


def test_total_weight_matches_cylinder_area(spec):
    src = surface_current_samples(spec, 48, 64, 2.0)
    assert src.total_weight() == pytest.approx(src.sampled_area(), rel=1e-12)
    assert src.sampled_area() == pytest.approx(2 * math.pi * 0.01 * 4.0, rel=1e-15)


def test_azimuthal_direction_at_phi_zero(spec):
    src = surface_current_samples(spec, 32, 16, 1.0)
    # the phi = 0 sample sits at (a, 0, z); its direction is +y
    on_x = np.isclose(src.points[:, 0], spec.a) & np.isclose(src.points[:, 1], 0.0)
    assert np.any(on_x)
    assert np.allclose(src.directions[on_x], [0.0, 1.0, 0.0], atol=1e-14)


def test_directions_tangent_to_cylinder(spec):
    src = surface_current_samples(spec, 32, 16, 1.0)
    radial = src.points.copy()
    radial[:, 2] = 0.0
    # purely azimuthal: no radial and no axial component
    assert np.max(np.abs(np.einsum("ij,ij->i", radial, src.directions))) < 1e-16
    assert np.max(np.abs(src.directions[:, 2])) == 0.0


def test_half_plane_current_per_unit_length(spec):
    # crossing any half-plane phi = const: current per unit z is K = n I
    src = surface_current_samples(spec, 64, 32, 1.0)
    dz = 2.0 * 1.0 / 32
    on_x = np.isclose(src.points[:, 0], spec.a) & np.isclose(src.points[:, 1], 0.0)
    crossing = src.density * np.sum(on_x) * dz / (2.0 * 1.0)
    assert crossing == pytest.approx(spec.n * spec.current, rel=1e-12)


def test_samples_symmetric_about_midplane(spec):
    src = surface_current_samples(spec, 16, 64, 1.5)
    zs = np.sort(np.unique(np.round(src.points[:, 2], 12)))
    assert np.allclose(zs, -zs[::-1])


def test_tilted_axis_lies_on_cylinder():
    d = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
    spec = SolenoidSpec(a=0.02, n=500.0, current=2.0,
                        axis_point=Point3(0.1, -0.2, 0.3), axis_dir=tuple(d))
    src = surface_current_samples(spec, 16, 16, 0.4)
    rel = src.points - np.array([0.1, -0.2, 0.3])
    axial = rel @ d
    perp = rel - np.outer(axial, d)
    assert np.allclose(np.linalg.norm(perp, axis=1), 0.02, rtol=1e-12)


def test_precondition_rejections(spec):
    with pytest.raises(SourceError):
        surface_current_samples(spec, 8, 32, 1.0)
    with pytest.raises(SourceError):
        surface_current_samples(spec, 32, 32, -1.0)
    with pytest.raises(SourceError):
        surface_current_samples(spec, 32, 32, math.inf)


def test_spec_invariants():
    with pytest.raises(SourceError):
        SolenoidSpec(a=-0.01, n=1e4, current=1.0)
    with pytest.raises(SourceError):
        SolenoidSpec(a=0.01, n=0.0, current=1.0)
    with pytest.raises(SourceError):
        SolenoidSpec(a=0.01, n=1e4, current=1.0, half_length=-2.0)
