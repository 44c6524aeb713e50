"""Unit tests for the single-filter physics primitives."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polcascade.core import (
    Angle,
    ClassicalBeam,
    DensityMatrix2,
    FilterStack,
    PolarizationKet,
    Polarizer,
    ZeroProbabilityProjectionError,
    angle_from_degrees,
    classical_transmit,
    density_pass_probability,
    density_project,
    inner_product,
    ket,
    malus_factor,
    pass_probability,
    project,
)

finite_angles = st.floats(
    min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False
)


def deg(d):
    return angle_from_degrees(d)


class TestAngle:
    def test_degree_conversion(self):
        assert deg(90).radians == pytest.approx(math.pi / 2, abs=1e-15)

    def test_axis_period_wraps_180(self):
        assert deg(180).radians == 0.0

    def test_reduces_modulo_180(self):
        # 225 mod 180 = 45
        assert deg(225).radians == pytest.approx(math.pi / 4, abs=1e-15)

    def test_negative_input_wraps(self):
        assert deg(-45).radians == pytest.approx(math.radians(135), abs=1e-12)

    @pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            Angle(bad)
        with pytest.raises(ValueError):
            angle_from_degrees(bad)

    @given(r=finite_angles)
    def test_canonical_range(self, r):
        a = Angle(r)
        assert 0.0 <= a.radians < math.pi

    @given(r=finite_angles)
    def test_canonicalization_idempotent(self, r):
        a = Angle(r)
        assert Angle(a.radians) == a

    def test_degrees_round_trip(self):
        assert deg(33.3).degrees == pytest.approx(33.3, abs=1e-12)


class TestClassicalBeam:
    def test_rejects_negative_intensity(self):
        with pytest.raises(ValueError):
            ClassicalBeam.unpolarized(-1.0)

    def test_unpolarized_has_no_plane(self):
        assert ClassicalBeam.unpolarized(1.0).plane is None
        assert not ClassicalBeam.unpolarized(1.0).is_polarized

    def test_linear_keeps_plane(self):
        b = ClassicalBeam.linear(deg(30), 2.0)
        assert b.is_polarized
        assert b.plane == deg(30)


class TestFilterStack:
    def test_empty_stack_is_valid(self):
        assert len(FilterStack()) == 0

    def test_order_preserved(self):
        s = FilterStack.from_degrees([0, 45, 90])
        assert [a.degrees for a in s.axes] == pytest.approx([0, 45, 90])


class TestMalusFactor:
    def test_perpendicular_blocks(self):
        # cos^2(90 deg): zero up to the float rounding of pi/2
        assert malus_factor(deg(0), deg(90)) <= 1e-15

    def test_diagonal_halves(self):
        assert malus_factor(deg(0), deg(45)) == pytest.approx(0.5, abs=1e-12)

    @given(r=finite_angles)
    def test_aligned_transmits_fully(self, r):
        a = Angle(r)
        assert malus_factor(a, a) == 1.0

    @given(plane=finite_angles, axis=finite_angles)
    def test_range(self, plane, axis):
        f = malus_factor(Angle(plane), Angle(axis))
        assert 0.0 <= f <= 1.0

    @given(plane=finite_angles, axis=st.floats(min_value=-10, max_value=10))
    def test_axis_period(self, plane, axis):
        # adding pi before canonicalization perturbs the axis by at most
        # one rounding step, so the factor matches at float resolution
        t = Angle(plane)
        assert malus_factor(t, Angle(axis + math.pi)) == pytest.approx(
            malus_factor(t, Angle(axis)), abs=1e-13
        )

    def test_symmetric_in_relative_angle(self):
        assert malus_factor(deg(10), deg(70)) == pytest.approx(
            malus_factor(deg(70), deg(10)), abs=1e-15
        )


class TestClassicalTransmit:
    def test_unpolarized_halves(self):
        out = classical_transmit(ClassicalBeam.unpolarized(1.0), Polarizer(deg(0)))
        assert out.intensity == 0.5
        assert out.plane == deg(0)

    def test_perpendicular_extinguishes(self):
        beam = ClassicalBeam.linear(deg(0), 0.5)
        out = classical_transmit(beam, Polarizer(deg(90)))
        assert out.intensity <= 1e-15
        assert out.plane == deg(90)

    def test_diagonal_quarters(self):
        beam = ClassicalBeam.linear(deg(0), 0.5)
        out = classical_transmit(beam, Polarizer(deg(45)))
        assert out.intensity == pytest.approx(0.25, abs=1e-12)
        assert out.plane == deg(45)

    @given(
        plane=finite_angles,
        axis=finite_angles,
        intensity=st.floats(min_value=0, max_value=1e12),
    )
    def test_never_gains_intensity(self, plane, axis, intensity):
        beam = ClassicalBeam.linear(Angle(plane), intensity)
        out = classical_transmit(beam, Polarizer(Angle(axis)))
        assert out.intensity <= beam.intensity

    @given(intensity=st.floats(min_value=0, max_value=1e12), axis=finite_angles)
    def test_unpolarized_never_gains(self, intensity, axis):
        beam = ClassicalBeam.unpolarized(intensity)
        out = classical_transmit(beam, Polarizer(Angle(axis)))
        assert out.intensity <= beam.intensity


class TestKet:
    def test_horizontal(self):
        k = ket(deg(0))
        assert (k.amp_h, k.amp_v) == (1.0, 0.0)

    def test_vertical(self):
        k = ket(deg(90))
        assert k.amp_h == pytest.approx(0.0, abs=1e-15)
        assert k.amp_v == pytest.approx(1.0, abs=1e-15)

    def test_diagonal_superposition(self):
        k = ket(deg(45))
        assert k.amp_h == pytest.approx(1 / math.sqrt(2), abs=1e-15)
        assert k.amp_v == pytest.approx(1 / math.sqrt(2), abs=1e-15)

    @given(r=finite_angles)
    def test_normalized_by_construction(self, r):
        k = ket(Angle(r))
        assert abs(k.amp_h**2 + k.amp_v**2 - 1.0) <= 1e-12

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            PolarizationKet(1.0, 1.0)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            PolarizationKet(math.nan, 0.0)


class TestInnerProduct:
    def test_orthogonal_basis(self):
        assert abs(inner_product(ket(deg(90)), ket(deg(0)))) <= 1e-12

    def test_self_overlap(self):
        assert inner_product(ket(deg(0)), ket(deg(0))) == 1.0

    def test_diagonal_overlap(self):
        got = inner_product(ket(deg(45)), ket(deg(0)))
        assert got == pytest.approx(1 / math.sqrt(2), abs=1e-12)

    @given(a=finite_angles, b=finite_angles)
    def test_range(self, a, b):
        assert -1.0 <= inner_product(ket(Angle(a)), ket(Angle(b))) <= 1.0


class TestPassProbability:
    def test_perpendicular_blocks(self):
        assert pass_probability(ket(deg(0)), Polarizer(deg(90))) <= 1e-15

    def test_h_through_diagonal(self):
        got = pass_probability(ket(deg(0)), Polarizer(deg(45)))
        assert got == pytest.approx(0.5, abs=1e-12)

    def test_diagonal_through_vertical(self):
        got = pass_probability(ket(deg(45)), Polarizer(deg(90)))
        assert got == pytest.approx(0.5, abs=1e-12)

    @given(state=finite_angles, axis=finite_angles)
    def test_global_sign_invariance(self, state, axis):
        s = ket(Angle(state))
        p = Polarizer(Angle(axis))
        assert pass_probability(s, p) == pass_probability(-s, p)

    @given(state=finite_angles, axis=finite_angles)
    def test_range(self, state, axis):
        got = pass_probability(ket(Angle(state)), Polarizer(Angle(axis)))
        assert 0.0 <= got <= 1.0

    def test_matches_malus_factor_on_1000_random_pairs(self):
        # the Born rule and Malus's law describe the same cos^2 throughput
        rng = np.random.default_rng(20240817)
        worst = 0.0
        for _ in range(1000):
            plane, axis = rng.uniform(0.0, math.pi, size=2)
            m = malus_factor(Angle(plane), Angle(axis))
            q = pass_probability(ket(Angle(plane)), Polarizer(Angle(axis)))
            worst = max(worst, abs(m - q))
        assert worst <= 1e-12


class TestProject:
    def test_h_collapses_to_diagonal(self):
        assert project(ket(deg(0)), Polarizer(deg(45))) == ket(deg(45))

    def test_diagonal_collapses_to_vertical(self):
        assert project(ket(deg(45)), Polarizer(deg(90))) == ket(deg(90))

    def test_orthogonal_projection_rejected(self):
        with pytest.raises(ZeroProbabilityProjectionError):
            project(ket(deg(0)), Polarizer(deg(90)))

    @given(state=finite_angles, axis=finite_angles)
    def test_idempotent_when_defined(self, state, axis):
        s = ket(Angle(state))
        p = Polarizer(Angle(axis))
        try:
            collapsed = project(s, p)
        except ZeroProbabilityProjectionError:
            return
        assert pass_probability(collapsed, p) == pytest.approx(1.0, abs=1e-12)


class TestDensityMatrix:
    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            DensityMatrix2(np.array([[0.5, 0.1], [0.2, 0.5]]))

    def test_rejects_bad_trace(self):
        with pytest.raises(ValueError):
            DensityMatrix2(np.array([[0.6, 0.0], [0.0, 0.6]]))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(ValueError):
            DensityMatrix2(np.array([[1.5, 0.0], [0.0, -0.5]]))

    def test_matrix_is_frozen(self):
        rho = DensityMatrix2.unpolarized()
        with pytest.raises(ValueError):
            rho.m[0, 0] = 0.9

    @given(axis=finite_angles)
    def test_unpolarized_halves_any_axis(self, axis):
        rho = DensityMatrix2.unpolarized()
        got = density_pass_probability(rho, Polarizer(Angle(axis)))
        assert got == pytest.approx(0.5, abs=1e-12)

    def test_pure_h_through_diagonal(self):
        rho = DensityMatrix2.from_pure(ket(deg(0)))
        got = density_pass_probability(rho, Polarizer(deg(45)))
        assert got == pytest.approx(0.5, abs=1e-12)

    def test_pure_h_through_vertical(self):
        rho = DensityMatrix2.from_pure(ket(deg(0)))
        assert density_pass_probability(rho, Polarizer(deg(90))) <= 1e-15

    @given(state=finite_angles, axis=finite_angles)
    def test_pure_state_embedding_consistent(self, state, axis):
        s = ket(Angle(state))
        p = Polarizer(Angle(axis))
        rho = DensityMatrix2.from_pure(s)
        assert density_pass_probability(rho, p) == pytest.approx(
            pass_probability(s, p), abs=1e-12
        )

    def test_project_unpolarized_onto_h(self):
        got = density_project(DensityMatrix2.unpolarized(), Polarizer(deg(0)))
        np.testing.assert_allclose(got.m, [[1.0, 0.0], [0.0, 0.0]], atol=1e-15)

    def test_project_pure_h_onto_diagonal(self):
        rho = DensityMatrix2.from_pure(ket(deg(0)))
        got = density_project(rho, Polarizer(deg(45)))
        np.testing.assert_allclose(got.m, np.full((2, 2), 0.5), atol=1e-15)

    def test_project_diagonal_onto_vertical(self):
        rho = DensityMatrix2.from_pure(ket(deg(45)))
        got = density_project(rho, Polarizer(deg(90)))
        np.testing.assert_allclose(got.m, [[0.0, 0.0], [0.0, 1.0]], atol=1e-15)

    def test_zero_probability_projection_rejected(self):
        rho = DensityMatrix2.from_pure(ket(deg(0)))
        with pytest.raises(ZeroProbabilityProjectionError):
            density_project(rho, Polarizer(deg(90)))
