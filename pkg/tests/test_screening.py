import math

import numpy as np
import pytest

from abfield import (E_CHARGE, MU_0, Point3, ScalarGauge, ShieldSpec, SolenoidSpec,
                     ab_phase, build_scenario, london_profile_fd, loop_integral,
                     make_circle_loop, penetration_length, screened_solenoid_profile)
from abfield.screening import ScreeningError
from tests.conftest import CIRCULATION, ZHAT

PHASE_MINUS_E = -5997827479.680858


class TestPenetrationLength:
    BASE = dict(m_carrier=9.1e-31, e_star=2 * E_CHARGE, psi_inf=1e20)

    def test_formula_verbatim(self):
        lam = penetration_length(**self.BASE)
        m, es, psi = self.BASE["m_carrier"], self.BASE["e_star"], self.BASE["psi_inf"]
        assert lam == math.sqrt(m / (4.0 * MU_0 * es * es * psi))

    def test_quadrupling_psi_halves_lambda(self):
        lam = penetration_length(**self.BASE)
        lam4 = penetration_length(self.BASE["m_carrier"], self.BASE["e_star"],
                                  4.0 * self.BASE["psi_inf"])
        assert lam4 == lam / 2.0

    def test_doubling_charge_halves_lambda(self):
        lam = penetration_length(**self.BASE)
        lam2 = penetration_length(self.BASE["m_carrier"], 2.0 * self.BASE["e_star"],
                                  self.BASE["psi_inf"])
        assert lam2 == lam / 2.0

    def test_quadrupling_mass_doubles_lambda(self):
        lam = penetration_length(**self.BASE)
        lam4 = penetration_length(4.0 * self.BASE["m_carrier"], self.BASE["e_star"],
                                  self.BASE["psi_inf"])
        assert lam4 == 2.0 * lam

    def test_rejects_nonpositive(self):
        with pytest.raises(ScreeningError):
            penetration_length(-1.0, 1.0, 1.0)
        with pytest.raises(ScreeningError):
            penetration_length(1.0, 0.0, 1.0)

    def test_shield_derives_lambda(self):
        shield = ShieldSpec(inner_radius=0.011, outer_radius=0.013, **self.BASE)
        assert shield.lambda_p == penetration_length(**self.BASE)

    def test_shield_requires_lambda_or_carrier(self):
        with pytest.raises(ScreeningError):
            ShieldSpec(inner_radius=0.011, outer_radius=0.013)


class TestScreenedProfile:
    def test_continuous_at_inner_surface(self, spec, shield):
        boundary = 0.5 * MU_0 * spec.n * spec.current * spec.a ** 2 / shield.inner_radius
        got = screened_solenoid_profile(spec, shield, shield.inner_radius)
        assert got == pytest.approx(boundary, rel=1e-14)

    def test_strong_decay_over_ten_lambdas(self, spec, shield):
        lam = shield.lambda_p
        outer = screened_solenoid_profile(spec, shield, shield.inner_radius + 10 * lam)
        inner = screened_solenoid_profile(spec, shield, shield.inner_radius)
        assert outer / inner < math.exp(-9.0)

    def test_asymptotic_log_slope(self, spec, shield):
        lam = shield.lambda_p
        r0 = shield.inner_radius + 20 * lam
        h = 1e-8
        slope = (math.log(screened_solenoid_profile(spec, shield, r0 + h))
                 - math.log(screened_solenoid_profile(spec, shield, r0 - h))) / (2 * h)
        assert abs(slope + 1.0 / lam) * lam < 0.02

    def test_monotone_decreasing(self, spec, shield):
        rho = np.linspace(shield.inner_radius, shield.inner_radius + 30 * shield.lambda_p, 500)
        vals = screened_solenoid_profile(spec, shield, rho)
        assert np.all(np.diff(vals) < 0.0)

    def test_rejects_rho_below_shield(self, spec, shield):
        with pytest.raises(ScreeningError):
            screened_solenoid_profile(spec, shield, shield.inner_radius * 0.5)

    def test_deep_evaluation_stays_finite(self, spec, shield):
        # exponentially scaled Bessel path: no under/overflow 200 lambdas deep
        val = screened_solenoid_profile(spec, shield,
                                        shield.inner_radius + 200 * shield.lambda_p)
        assert 0.0 <= val < 1.0
        assert math.isfinite(val)

    def test_bessel_matches_ode_oracle(self, spec, shield):
        rho, a_fd = london_profile_fd(spec, shield)
        mask = rho <= shield.inner_radius + 30 * shield.lambda_p
        closed = screened_solenoid_profile(spec, shield, rho[mask])
        rel = np.max(np.abs(closed - a_fd[mask]) / closed)
        assert rel < 1e-3

    def test_ode_oracle_refinement_converges(self, spec, shield):
        rho1, a1 = london_profile_fd(spec, shield, n_cells=3000)
        rho2, a2 = london_profile_fd(spec, shield, n_cells=6000)
        probe = shield.inner_radius + 15 * shield.lambda_p
        v1 = np.interp(probe, rho1, a1)
        v2 = np.interp(probe, rho2, a2)
        closed = screened_solenoid_profile(spec, shield, probe)
        assert abs(v2 - closed) < abs(v1 - closed)


class TestScenarios:
    def test_tonomura_circulations_vanish(self, spec, shield):
        scen = build_scenario("tonomura_shielded", spec, shield)
        for radius, z in [(0.02, 0.0), (0.05, 0.1), (0.11, -0.2)]:
            loop = make_circle_loop(Point3(0, 0, z), radius, ZHAT, +1, 64)
            res = loop_integral(scen.a_field, loop)
            assert abs(res.value) <= max(1e-12, 5.0 * res.error_estimate)

    def test_original_circulation(self, spec, axis_loop):
        scen = build_scenario("original_ab", spec)
        res = loop_integral(scen.a_field, axis_loop)
        assert res.value == pytest.approx(CIRCULATION, rel=1e-12)

    def test_tonomura_phase_zero(self, spec, shield, axis_loop):
        scen = build_scenario("tonomura_shielded", spec, shield)
        res = ab_phase(scen.a_field, axis_loop)
        assert abs(res.phase) < 1e-12

    def test_scenario_contrast(self, spec, shield, axis_loop):
        original = ab_phase(build_scenario("original_ab", spec).a_field, axis_loop)
        shielded = ab_phase(
            build_scenario("tonomura_shielded", spec, shield).a_field, axis_loop)
        contrast = original.phase - shielded.phase
        assert contrast == pytest.approx(PHASE_MINUS_E, rel=1e-9)

    def test_nontrivial_gauge_keeps_observables(self, spec, shield, axis_loop):
        # A single-valued gauge changes A pointwise but no closed-loop
        # observable: the phase prediction is gauge-independent.
        gauge = ScalarGauge(theta=lambda p: 0.2 * p[:, 0] + 0.05 * np.sin(3.0 * p[:, 1]),
                            scale=1.0)
        scen = build_scenario("tonomura_shielded", spec, shield, gauge_choice=gauge)
        sample = scen.a_field(np.array([0.05, 0.01, 0.0]))
        assert np.linalg.norm(sample) > 0.0  # the potential itself is nonzero
        res = ab_phase(scen.a_field, axis_loop)
        assert abs(res.circulation) <= max(1e-12, 5.0 * res.error_estimate)

    def test_tonomura_b_field_zero(self, spec, shield):
        scen = build_scenario("tonomura_shielded", spec, shield)
        pts = np.array([[0.05, 0.0, 0.0], [0.0, -0.08, 0.3]])
        assert np.array_equal(scen.b_field(pts), np.zeros((2, 3)))
        assert scen.forbidden_outer_radius == shield.outer_radius

    def test_shield_required_for_tonomura(self, spec):
        with pytest.raises(ScreeningError):
            build_scenario("tonomura_shielded", spec, None)

    def test_inconsistent_radii_rejected(self, spec):
        bad = ShieldSpec(inner_radius=0.005, outer_radius=0.02, lambda_p=1e-4)
        with pytest.raises(ScreeningError):
            build_scenario("tonomura_shielded", spec, bad)

    def test_unknown_tag_rejected(self, spec):
        with pytest.raises(ScreeningError):
            build_scenario("both_at_once", spec)


def test_shield_radius_ordering():
    with pytest.raises(ScreeningError):
        ShieldSpec(inner_radius=0.02, outer_radius=0.01, lambda_p=1e-4)
    with pytest.raises(ScreeningError):
        ShieldSpec(inner_radius=0.01, outer_radius=0.02, lambda_p=-1.0)
