"""
Unit tests for the boundary elastica service.
"""

import math

import numpy as np
import pytest
from scipy.special import ellipk

from app.core.exceptions import (
    GcdError,
    NoOscillationError,
    PreconditionError,
    SingularTorsionError,
)
from app.schemas.params import CurveParams, EnergyParams, FirstIntegrals
from app.services.elastica_curves import kabsch_gap


def curve_params(mu: float = 0.0, lam: float = 1.0) -> CurveParams:
    return CurveParams(mu=mu, lam=lam)


class TestFirstIntegrals:
    """Radicand and torsion as closed-form functions of kappa."""

    @pytest.mark.parametrize(
        "kappa, d, e, expected",
        [
            (1.0, 0.0, 0.0, 0.0),
            (0.0, 4.0, 0.0, 3.0),
            (1.0, 1.0, 1.0, 0.75),
        ],
    )
    def test_radicand(self, curve_service, kappa, d, e, expected):
        value = curve_service.radicand(kappa, curve_params(), FirstIntegrals(d=d, e=e))

        assert value == pytest.approx(expected, abs=1e-15)

    def test_radicand_singular_at_minus_mu(self, curve_service):
        with pytest.raises(SingularTorsionError):
            curve_service.radicand(-0.5, curve_params(mu=0.5), FirstIntegrals(d=1.0, e=1.0))

    @pytest.mark.parametrize(
        "kappa, mu, e, expected",
        [
            (0.3, 0.0, 0.0, 0.0),
            (1.0, 0.0, 4.0, 1.0),
            (0.5, 0.5, 1.0, 0.25),
        ],
    )
    def test_torsion(self, curve_service, kappa, mu, e, expected):
        integrals = FirstIntegrals(d=1.0, e=e)
        tau = curve_service.torsion_from_curvature(kappa, curve_params(mu=mu), integrals)

        assert tau == pytest.approx(expected, abs=1e-15)

    def test_torsion_singular(self, curve_service):
        with pytest.raises(SingularTorsionError):
            curve_service.torsion_from_curvature(
                -1.0, curve_params(mu=1.0), FirstIntegrals(d=1.0, e=1.0)
            )

    def test_zero_d_forces_zero_e(self):
        from pydantic import ValidationError

        with pytest.raises(ValidationError):
            FirstIntegrals(d=0.0, e=1.0)


class TestCircles:
    @pytest.mark.parametrize(
        "mu, lam, kappa, radius",
        [
            (0.0, 1.0, 1.0, 1.0),
            (0.0, 0.25, 0.5, 2.0),
            (1.0, 3.0, 2.0, 0.5),
        ],
    )
    def test_circle_solution(self, curve_service, mu, lam, kappa, radius):
        k, r = curve_service.circle_solution(curve_params(mu, lam))

        assert k == pytest.approx(kappa)
        assert r == pytest.approx(radius)

    def test_circle_is_critical(self, curve_service):
        params = curve_params()
        curve = curve_service.circle_curve(params, n_samples=256)

        assert curve_service.el_residual_curve(curve, params) < 1e-8

    def test_wrong_circle_is_not_critical(self, curve_service):
        curve = curve_service.circle_curve(curve_params(lam=0.25), n_samples=256)

        assert curve_service.el_residual_curve(curve, curve_params()) > 0.1

    def test_circle_energy(self, curve_service):
        params = curve_params()
        curve = curve_service.circle_curve(params, n_samples=256)

        assert curve_service.curve_energy(curve, params) == pytest.approx(4.0 * math.pi, rel=1e-12)

    def test_nonpositive_circle_curvature_rejected(self):
        from pydantic import ValidationError

        with pytest.raises(ValidationError):
            CurveParams(mu=0.0, lam=-1.0)

    def test_contact_angle_parameters(self, curve_service, unit_params):
        plus = curve_service.contact_angle_parameters(unit_params, 1)
        minus = curve_service.contact_angle_parameters(unit_params, -1)

        assert (plus.mu, plus.lam) == pytest.approx((0.5, 0.75))
        assert minus.mu == pytest.approx(-0.5)
        assert plus.circle_kappa_sq == pytest.approx(unit_params.beta / unit_params.alpha)


class TestCurvatureProfile:
    @pytest.fixture
    def planar_profile(self, curve_service):
        return curve_service.curvature_profile(curve_params(), FirstIntegrals(d=0.25, e=0.0))

    def test_oscillation_roots(self, planar_profile):
        assert planar_profile.kappa_min == pytest.approx(math.sqrt(0.5), abs=1e-10)
        assert planar_profile.kappa_max == pytest.approx(math.sqrt(1.5), abs=1e-10)
        assert planar_profile.kappa.min() >= planar_profile.kappa_min - 1e-12

    def test_period_matches_elliptic_integral(self, planar_profile):
        a, b = math.sqrt(1.5), math.sqrt(0.5)
        expected = 4.0 / a * ellipk(1.0 - b**2 / a**2)

        assert planar_profile.period == pytest.approx(expected, rel=1e-10)

    def test_period_symmetry(self, planar_profile):
        assert np.allclose(planar_profile.kappa, planar_profile.kappa[::-1], atol=1e-10)

    def test_radicand_nonnegative_on_profile(self, curve_service, planar_profile):
        Q = curve_service.radicand(planar_profile.kappa, curve_params(), planar_profile.integrals)

        assert Q.min() > -1e-9

    @pytest.mark.parametrize("d", [0.0, 1.21])
    def test_no_oscillation(self, curve_service, d):
        with pytest.raises(NoOscillationError):
            curve_service.curvature_profile(curve_params(), FirstIntegrals(d=d, e=0.0))

    def test_planar_profile_has_no_angular_defect(self, curve_service, planar_profile):
        assert curve_service.closure_defects(planar_profile).delta_theta == 0.0


class TestReconstruction:
    @pytest.fixture
    def planar_profile(self, curve_service):
        return curve_service.curvature_profile(curve_params(), FirstIntegrals(d=0.25, e=0.0))

    @pytest.fixture
    def twisted_profile(self, curve_service):
        return curve_service.curvature_profile(curve_params(), FirstIntegrals(d=0.5, e=0.3))

    def test_axial_offset_is_defect_over_sqrt_d(self, curve_service, twisted_profile):
        curve = curve_service.reconstruct_curve(twisted_profile, periods=1)
        defects = curve_service.closure_defects(twisted_profile)
        offset = curve.points[-1, 2] - curve.points[0, 2]

        assert math.sqrt(0.5) * offset == pytest.approx(defects.delta_z, abs=1e-9)

    def test_turn_about_axis_equals_angular_defect(self, curve_service, twisted_profile):
        curve = curve_service.reconstruct_curve(twisted_profile, periods=1)
        defects = curve_service.closure_defects(twisted_profile)
        start, end = curve.points[0], curve.points[-1]

        turn = math.atan2(end[1], end[0]) - math.atan2(start[1], start[0])

        assert abs(defects.delta_theta) > 0.1
        assert turn == pytest.approx(defects.delta_theta, abs=1e-8)

    def test_mirrored_first_integral_turns_the_other_way(self, curve_service):
        mirrored = curve_service.curvature_profile(curve_params(), FirstIntegrals(d=0.5, e=-0.3))
        twisted = curve_service.curvature_profile(curve_params(), FirstIntegrals(d=0.5, e=0.3))

        assert curve_service.closure_defects(mirrored).delta_theta == pytest.approx(
            -curve_service.closure_defects(twisted).delta_theta, abs=1e-12
        )

    def test_planar_curve_lies_in_a_plane(self, curve_service, planar_profile):
        curve = curve_service.reconstruct_curve(planar_profile, periods=2)

        assert np.all(curve.tau == 0.0)
        assert np.max(np.abs(curve.points[:, 1])) < 1e-8 * curve.length

    def test_frenet_integration_agrees(self, curve_service, twisted_profile):
        curve = curve_service.reconstruct_curve(twisted_profile, periods=1)

        assert curve.reconstruction_gap < 1e-6 * twisted_profile.period

    def test_frenet_integration_starts_from_curve_frame(self, curve_service, planar_profile):
        curve = curve_service.reconstruct_curve(planar_profile, periods=1, cross_check=False)

        points = curve_service.frenet_integrate(planar_profile, 1, curve)

        assert points.shape == curve.points.shape
        assert np.allclose(points[0], curve.points[0])
        assert kabsch_gap(curve.points, points) < 1e-6 * planar_profile.period

    def test_first_integrals_conserved(self, curve_service, twisted_profile):
        curve = curve_service.reconstruct_curve(twisted_profile, periods=1, cross_check=False)
        d_drift, e_drift = curve_service.first_integral_drift(
            curve, twisted_profile.params, twisted_profile.integrals
        )

        assert d_drift < 1e-6
        assert e_drift < 1e-6

    def test_periods_must_be_positive(self, curve_service, planar_profile):
        with pytest.raises(PreconditionError):
            curve_service.reconstruct_curve(planar_profile, periods=0)


class TestClosedCurves:
    @pytest.mark.parametrize("q, p, genus", [(3, 2, 1), (7, 1, 0), (5, 2, 2)])
    def test_genus_bound(self, curve_service, q, p, genus):
        assert curve_service.genus_bound(q, p) == genus

    def test_genus_requires_coprime(self, curve_service):
        with pytest.raises(GcdError):
            curve_service.genus_bound(4, 2)

    def test_search_requires_coprime(self, curve_service):
        with pytest.raises(GcdError):
            curve_service.find_closed_curve(curve_params(), 4, 2)

    def test_search_respects_winding_cap(self, curve_service):
        with pytest.raises(PreconditionError):
            curve_service.find_closed_curve(curve_params(), 17, 1)

    @pytest.mark.slow
    @pytest.mark.parametrize("q, p", [(3, 1), (5, 2)])
    def test_closed_curve(self, curve_service, q, p):
        report, curve = curve_service.solve_closed_curve(curve_params(), q, p)

        assert abs(report.defects["dz"]) < 1e-8 * report.period
        assert report.defects["dtheta"] == pytest.approx(2.0 * math.pi * p / q, abs=1e-8)
        assert curve.closed
        assert curve.endpoint_gap < 1e-5 * report.length
        assert curve_service.genus_bound(q, p) == ((p - 1) * (q - 1) + 1) // 2


class TestEnergyParamsConventions:
    def test_common_convention_halves_and_flips(self):
        from app.schemas.params import C0Convention

        params = EnergyParams.from_convention(C0Convention.COMMON, a=1, c0=-2, b=0, alpha=1, beta=1)

        assert params.c0 == pytest.approx(1.0)

    def test_critical_radius(self):
        params = EnergyParams(a=1.0, alpha=4.0, beta=1.0)

        assert params.critical_radius == pytest.approx(2.0)
        assert params.e_underline == pytest.approx(4.0)
