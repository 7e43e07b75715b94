"""
Unit tests for the energy functional, its closed-form bounds and the
boundary Euler-Lagrange residuals.
"""

import math

import numpy as np
import pytest

from app.core.exceptions import (
    OutOfScopeError,
    ParameterMismatchError,
    PreconditionError,
    TooCoarseLoopError,
)
from app.schemas.geometry import NodoidLabel
from app.schemas.params import EnergyParams
from app.schemas.reports import Attainment, Topology
from app.services import mesh_primitives as mp
from app.services.energy_functional import normalized_residual, spectral_derivative

PI = math.pi


def params(
    c0: float = 0.0, b: float = 0.0, a: float = 1.0, alpha: float = 1.0, beta: float = 1.0
) -> EnergyParams:
    return EnergyParams(a=a, c0=c0, b=b, alpha=alpha, beta=beta)


class TestAnnulusBounds:
    """One row per line of the annulus infima table, with alpha = beta = a = 1."""

    @pytest.mark.parametrize(
        "c0, b, case, value, attained",
        [
            (1.0, 1.0, "(i)", 4 * PI, Attainment.MINIMUM),
            (1.0, 0.0, "(ii)", 8 * PI, Attainment.MINIMUM),
            (1.0, -1.0, "(iii)", 4 * PI, Attainment.MINIMUM),
            (0.0, 1.0, "(iv)", 4 * PI, Attainment.INFIMUM_ONLY),
            (0.0, 0.0, "(v)", 8 * PI, Attainment.MINIMUM),
            (0.0, -1.5, "(vi)", 6 * PI, Attainment.INFIMUM_ONLY),
            (0.0, -1.0, "(vii)", 8 * PI, Attainment.MINIMUM),
            (0.0, -0.5, "(viii)", 8 * PI, Attainment.INFIMUM_ONLY),
        ],
    )
    def test_table(self, energy_service, c0, b, case, value, attained):
        result = energy_service.lower_bound(params(c0=c0, b=b), Topology.ANNULUS)

        assert result.case_label == case
        assert result.bound == pytest.approx(value)
        assert result.attained == attained
        assert result.bounded_below is True

    def test_nodoid_witnesses(self, energy_service):
        positive = energy_service.lower_bound(params(c0=1.0, b=1.0), Topology.ANNULUS)
        negative = energy_service.lower_bound(params(c0=1.0, b=-1.0), Topology.ANNULUS)

        assert positive.witness == "N1/N4"
        assert negative.witness == "N2"

    @pytest.mark.parametrize(
        "c0, b, a",
        [
            (1.0, 3.0, 1.0),
            (0.0, 3.0, 1.0),
            (0.0, -4.0, 1.0),
        ],
    )
    def test_unbounded_cells(self, energy_service, c0, b, a):
        result = energy_service.lower_bound(params(c0=c0, b=b, a=a), Topology.ANNULUS)

        assert result.case_label == "unbounded"
        assert result.attained == Attainment.UNBOUNDED
        assert result.bound is None
        assert result.bounded_below is False

    def test_negative_line_tension_is_unbounded(self, energy_service):
        result = energy_service.lower_bound(params(beta=-1.0), Topology.ANNULUS)

        assert result.attained == Attainment.UNBOUNDED
        assert math.isnan(result.e_underline)

    def test_zero_line_tension_is_unclassified(self, energy_service):
        result = energy_service.lower_bound(params(beta=0.0), Topology.DISC)

        assert result.case_label == "unclassified-by-paper"
        assert result.attained == Attainment.UNCLASSIFIED

    def test_negative_spontaneous_curvature_out_of_scope(self, energy_service):
        with pytest.raises(OutOfScopeError):
            energy_service.lower_bound(params(c0=-1.0), Topology.ANNULUS)


class TestDiscBounds:
    @pytest.mark.parametrize(
        "c0, b, case, value, attained",
        [
            (0.0, -1.5, "disc-(i)", 3 * PI, Attainment.INFIMUM_ONLY),
            (0.0, -1.0, "disc-(ii)", 4 * PI, Attainment.MINIMUM),
            (0.0, 0.5, "disc-(iii)", 4 * PI, Attainment.MINIMUM),
            (0.0, 0.0, "disc-(iv)", 4 * PI, Attainment.MINIMUM),
            (0.0, -0.5, "disc-(iv)", 4 * PI, Attainment.MINIMUM),
            (0.5, 0.0, "E_D", 4 * PI, Attainment.MINIMUM),
            (2.0, 0.0, "E_D", 4 * PI, Attainment.LOWER_BOUND_ONLY),
            (0.5, 0.5, "E_D", 4 * PI, Attainment.LOWER_BOUND_ONLY),
        ],
    )
    def test_table(self, energy_service, c0, b, case, value, attained):
        result = energy_service.lower_bound(params(c0=c0, b=b), Topology.DISC)

        assert result.case_label == case
        assert result.bound == pytest.approx(value)
        assert result.attained == attained

    def test_large_saddle_splay_is_unbounded(self, energy_service):
        result = energy_service.lower_bound(params(b=3.0), Topology.DISC)

        assert result.attained == Attainment.UNBOUNDED


class TestWitnessSequences:
    def test_planar_annuli_decrease_to_the_infimum(self, energy_service):
        points = energy_service.witness_sequence(params(b=-0.5), "planar_annuli")
        energies = [p.energy for p in points]

        assert [p.R for p in points] == [2.0, 4.0, 8.0, 16.0]
        assert all(e1 < e0 for e0, e1 in zip(energies, energies[1:]))
        assert energies[-1] > 8 * PI
        assert energies[-1] == pytest.approx(8 * PI, rel=1e-2)

    def test_catenoid_slices(self, energy_service):
        points = energy_service.witness_sequence(params(b=1.0), "catenoid_slices")

        assert points[0].energy == pytest.approx(8 * PI - 4 * PI * math.tanh(2.0))
        assert points[-1].energy == pytest.approx(4 * PI, rel=1e-10)

    def test_spherical_annuli(self, energy_service):
        points = energy_service.witness_sequence(params(b=-1.5), "spherical_annuli")
        energies = [p.energy for p in points]

        assert all(e1 < e0 for e0, e1 in zip(energies, energies[1:]))
        assert energies[-1] == pytest.approx(6 * PI, rel=1e-2)

    def test_unknown_kind(self, energy_service):
        with pytest.raises(PreconditionError):
            energy_service.witness_sequence(params(), "helicoids")

    def test_planar_radius_too_small(self, energy_service):
        with pytest.raises(PreconditionError):
            energy_service.witness_sequence(params(), "planar_annuli", radii=[1.0])


class TestEnergyEvaluation:
    def test_critical_flat_disc(self, energy_service):
        report = energy_service.evaluate_energy(mp.flat_disc(1.0, rings=12), params())

        assert report.helfrich_term == pytest.approx(0.0, abs=1e-12)
        assert report.boundary_bending == pytest.approx(2 * PI, rel=1e-3)
        assert report.boundary_length_term == pytest.approx(2 * PI, rel=1e-3)
        assert report.total == pytest.approx(4 * PI, rel=1e-3)
        assert report.bound_gap == pytest.approx(0.0, abs=1e-2)
        assert len(report.loops) == 1

    def test_closed_mesh_has_no_boundary_terms(self, energy_service):
        report = energy_service.evaluate_energy(mp.icosphere(3), params(c0=1.0, b=1.0))

        assert report.boundary_bending == 0.0
        assert report.gauss_term == pytest.approx(4 * PI, abs=1e-10)
        assert report.bound_gap is None

    def test_coarse_boundary_rejected(self, energy_service):
        with pytest.raises(TooCoarseLoopError):
            energy_service.evaluate_energy(mp.flat_disc(1.0, rings=1), params())

    def test_willmore_case(self, energy_service):
        mesh = mp.sphere_with_holes(2.0, 1.0, holes=1, rings=24, segments=96)
        report = energy_service.willmore_case_check(mesh, params(b=-1.0))

        assert report.total == pytest.approx(4 * PI, rel=3e-2)

    def test_willmore_case_requires_matching_moduli(self, energy_service):
        with pytest.raises(ParameterMismatchError):
            energy_service.willmore_case_check(mp.flat_disc(1.0, rings=6), params(b=-0.5))

    def test_rescaling_identity_off_critical(self, energy_service):
        residual = energy_service.rescaling_identity_residual(mp.flat_disc(2.0, rings=12), params())

        assert residual == pytest.approx(0.6, abs=1e-3)

    def test_rescaling_identity_on_critical_disc(self, energy_service):
        residual = energy_service.rescaling_identity_residual(mp.flat_disc(1.0, rings=12), params())

        assert residual < 1e-6

    def test_rescaling_identity_on_critical_catenoid(self, energy_service):
        neck = 1.0 / math.cosh(1.0)
        mesh = mp.catenoid_slice(neck, neck, rings=32, segments=64)

        assert energy_service.rescaling_identity_residual(mesh, params(b=1.0)) < 1e-6

    def test_full_report(self, energy_service):
        report = energy_service.full_energy_report(mp.flat_disc(1.0, rings=12), params())

        assert report.bound["case"] == "disc-(iv)"
        assert set(report.residuals) == {"el2", "el3", "el4", "rescaling", "gauss_bonnet"}
        assert report.residuals["gauss_bonnet"] < 1e-9


class TestSpecialCases:
    def test_spherical_cap_exists(self, energy_service):
        report = energy_service.spherical_cap_check(params(c0=0.5))

        assert report.exists
        assert report.sphere_radius == pytest.approx(2.0)
        assert report.polar_angle == pytest.approx(PI / 6)
        assert report.energy == pytest.approx(4 * PI)

    def test_spherical_cap_too_curved(self, energy_service):
        assert energy_service.spherical_cap_check(params(c0=2.0)).exists is False

    def test_spherical_cap_needs_zero_b(self, energy_service):
        with pytest.raises(ParameterMismatchError):
            energy_service.spherical_cap_check(params(c0=0.5, b=1.0))

    def test_cmc_admissible(self, energy_service):
        report = energy_service.constant_mean_curvature_classification(params(b=-1.0), -0.5)

        assert report.admissible
        assert report.sphere_radius == pytest.approx(2.0)

    def test_cmc_failed_conditions(self, energy_service):
        report = energy_service.constant_mean_curvature_classification(params(), -2.0)

        assert not report.admissible
        assert report.failed_conditions == ["a = -b", "H^2 <= beta/alpha"]

    def test_cmc_excludes_minus_c0(self, energy_service):
        with pytest.raises(PreconditionError):
            energy_service.constant_mean_curvature_classification(params(c0=1.0), -1.0)

    def test_delaunay_annulus_energy(self, energy_service):
        assert energy_service.delaunay_annulus_energy(params(alpha=4.0)) == pytest.approx(16 * PI)

        with pytest.raises(ParameterMismatchError):
            energy_service.delaunay_annulus_energy(params(b=1.0))


class TestBoundaryResiduals:
    @pytest.fixture
    def catenoid(self):
        """Catenoid bounded by unit circles, h / a = 1."""
        neck = 1.0 / math.cosh(1.0)
        return mp.catenoid_slice(neck, neck, rings=64, segments=128)

    def test_critical_catenoid(self, energy_service, catenoid):
        residuals = energy_service.el_boundary_residuals(catenoid, params())

        assert residuals.r2 < 5e-2
        assert residuals.r3 < 5e-2
        assert residuals.r4 < 5e-2

    def test_darboux_variant_agrees(self, energy_service, catenoid):
        residuals = energy_service.el_boundary_residuals_darboux(catenoid, params())

        assert residuals.r4 < 5e-2

    def test_wrong_line_tension_is_detected(self, energy_service, catenoid):
        residuals = energy_service.el_boundary_residuals(catenoid, params(alpha=4.0))

        assert residuals.r4 > 0.1

    def test_closed_mesh_rejected(self, energy_service):
        with pytest.raises(PreconditionError):
            energy_service.el_boundary_residuals(mp.icosphere(1), params())


class TestHelpers:
    def test_spectral_derivative_of_sine(self):
        t = 2 * PI * np.arange(64) / 64
        ds = np.full(64, 2 * PI / 64)

        assert np.allclose(spectral_derivative(np.sin(t), ds), np.cos(t), atol=1e-10)
        assert np.allclose(spectral_derivative(np.sin(t), ds, order=2), -np.sin(t), atol=1e-10)

    @pytest.mark.parametrize("m", [64, 128])
    def test_spectral_derivative_scales_with_loop_length(self, m):
        length = 10.0
        s = length * np.arange(m) / m
        omega = 2 * PI / length

        derivative = spectral_derivative(np.sin(omega * s), np.full(m, length / m))

        assert np.allclose(derivative, omega * np.cos(omega * s), atol=1e-10)

    def test_normalized_residual(self):
        assert normalized_residual(np.zeros(4), [np.zeros(4)], 0.0) == 0.0
        assert normalized_residual(np.array([0.5]), [np.array([2.0])], 1.0) == pytest.approx(0.25)
        assert normalized_residual(np.array([0.5]), [np.array([0.1])], 1.0) == pytest.approx(0.5)


class TestNodoidWitnesses:
    @pytest.fixture
    def domains(self, delaunay_service, nodoid_params):
        return {d.label: d for d in delaunay_service.enumerate_domains(nodoid_params)}

    @pytest.mark.parametrize("label", ["N1", "N2", "N3", "N4"])
    def test_rescaling_identity_on_profiles(self, energy_service, domains, nodoid_params, label):
        profile = domains[NodoidLabel(label)].profile

        assert energy_service.profile_rescaling_residual(profile, nodoid_params) < 1e-6

    def test_rescaling_identity_fails_off_critical_tension(self, energy_service, domains):
        profile = domains[NodoidLabel.N2].profile
        stiff = params(c0=1.0, b=1.0, beta=2.0)

        residual = energy_service.profile_rescaling_residual(profile, stiff)

        assert residual == pytest.approx(1.0 / 3.0, abs=1e-9)

    @pytest.mark.parametrize("label, expected", [("N1", 4 * PI), ("N2", 12 * PI)])
    def test_mesh_energy_matches_closed_form(
        self, delaunay_service, energy_service, domains, nodoid_params, label, expected
    ):
        mesh = delaunay_service.revolve(domains[NodoidLabel(label)].profile)

        report = energy_service.evaluate_energy(mesh, nodoid_params)

        assert report.boundary_bending == pytest.approx(4 * PI, rel=2e-3)
        assert report.boundary_length_term == pytest.approx(4 * PI, rel=2e-3)
        assert report.helfrich_term < 0.05
        assert report.total == pytest.approx(expected, abs=0.05 * 4 * PI)

    @pytest.mark.parametrize("label", ["N1", "N2"])
    def test_boundary_residuals_on_domain_meshes(
        self, delaunay_service, energy_service, domains, nodoid_params, label
    ):
        mesh = delaunay_service.revolve(domains[NodoidLabel(label)].profile, segments=128)

        residuals = energy_service.el_boundary_residuals(mesh, nodoid_params)

        assert residuals.r2 < 5e-2
        assert residuals.r3 < 5e-2
        assert residuals.r4 < 5e-2
