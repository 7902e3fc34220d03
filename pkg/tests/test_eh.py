"""Eguchi-Hanson pointwise numerics: potential, metric, Ricci, scaling.

The curvature conventions are validated against a constant-curvature
oracle (the Fubini-Study potential log(1+u), whose orthonormal-frame
curvature norm is sqrt(12) at every point and whose Ricci tensor is
exactly three times the metric).

Three assertions below are strict xfails: they pin the printed closed
form of the potential, which assigns a finite value at the chart center
and is convex in the squared radius.  The potential with unit-determinant
complex Hessian (the one every other check in this file needs) differs
from it by a radial logarithm, has a pole at the center, and is concave
in the squared radius.
"""

import math

import numpy as np
import pytest

from g2kit.eguchi_hanson import (
    TOLERANCES,
    HermitianMetric2,
    curvature_injectivity_scaling_probe,
    curvature_norm,
    flat_deviation,
    kahler_metric_at,
    metric_fd_at,
    potential,
    potential_derivatives,
    radial_curvature_norm,
    radial_metric,
    ricci_at,
    ricci_from_curvature,
    ricci_from_potential,
    ricci_ratio,
    sample_points,
    scaling_identity_probe,
)
from g2kit.errors import ChartSingular, InvalidScale, NumericFailure

SCALES = (0.5, 1.0, 2.0)


def eh_derivs(s):
    return lambda u: potential_derivatives(s, u, order=4)


def fs_derivs(u):
    # Fubini-Study potential log(1 + u): constant holomorphic sectional
    # curvature, used as an independent oracle for the curvature code
    t = 1.0 / (1.0 + u)
    return (t, -t * t, 2 * t ** 3, -6 * t ** 4)


class TestPotential:
    def test_scale_validation(self):
        for bad in (0.0, -1.0, float("nan")):
            with pytest.raises(InvalidScale):
                potential(bad, 1.0)

    def test_center_is_a_pole(self):
        with pytest.raises(ChartSingular):
            potential(1.0, 0.0)

    def test_asymptotic_to_squared_radius(self):
        for s in SCALES:
            assert abs(potential(s, 1e4) / 1e8 - 1) < 1e-6

    def test_monotone_in_radius(self):
        rs = np.linspace(0.2, 4.0, 40)
        vals = [potential(1.0, r) for r in rs]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_large_radius_stable(self):
        v = potential(1.0, 1e120)
        assert math.isfinite(v) and abs(v / 1e240 - 1) < 1e-9

    @pytest.mark.xfail(
        strict=True,
        reason="the printed closed form assigns a finite center value; the "
               "unit-determinant potential has a logarithmic pole there")
    def test_printed_center_value(self):
        assert potential(2.0, 0.0) == pytest.approx(4.0 * (1 - math.log(2)))

    @pytest.mark.xfail(
        strict=True,
        reason="the printed closed form has a constant middle term; unit "
               "determinant of the Hessian requires a radial logarithm")
    def test_printed_unit_scale_closed_form(self):
        r = 2.0
        q = math.sqrt(r ** 4 + 1)
        assert potential(1.0, r) == pytest.approx(q - math.log(q + 1))

    @pytest.mark.xfail(
        strict=True,
        reason="the unit-determinant potential is concave in the squared "
               "radius; convexity there holds only for the printed variant")
    def test_convex_in_squared_radius(self):
        for u in (0.3, 1.0, 3.0):
            h = 1e-3 * u
            f = lambda uu: potential(1.0, math.sqrt(uu))
            second = (f(u + h) - 2 * f(u) + f(u - h)) / (h * h)
            assert second > 0


class TestPotentialDerivatives:
    def test_finite_difference_ladder(self):
        for s in (0.7, 1.3):
            for u in (0.3, 1.0, 5.0):
                d = potential_derivatives(s, u, order=4)
                h = 1e-4 * u
                f = lambda uu: potential(s, math.sqrt(uu))
                fd1 = (f(u + h) - f(u - h)) / (2 * h)
                assert abs(fd1 - d[0]) < 1e-6 * abs(d[0])
                g = lambda uu: potential_derivatives(s, uu, 1)[0]
                fd2 = (g(u + h) - g(u - h)) / (2 * h)
                assert abs(fd2 - d[1]) < 1e-5 * abs(d[1])
                g2 = lambda uu: potential_derivatives(s, uu, 2)[1]
                fd3 = (g2(u + h) - g2(u - h)) / (2 * h)
                assert abs(fd3 - d[2]) < 1e-5 * abs(d[2])
                g3 = lambda uu: potential_derivatives(s, uu, 3)[2]
                fd4 = (g3(u + h) - g3(u - h)) / (2 * h)
                assert abs(fd4 - d[3]) < 1e-5 * abs(d[3])

    def test_validation(self):
        with pytest.raises(ChartSingular):
            potential_derivatives(1.0, 0.0)
        with pytest.raises(ValueError):
            potential_derivatives(1.0, 1.0, order=5)


class TestMetric:
    def test_unit_determinant(self):
        for s in SCALES:
            for z1, z2 in sample_points(8, s, seed=1):
                assert abs(kahler_metric_at(s, z1, z2).det() - 1) < 1e-12

    def test_hermitian_and_positive(self):
        for s in SCALES:
            for z1, z2 in sample_points(6, s, seed=2):
                m = kahler_metric_at(s, z1, z2)
                assert m.hermitian_defect() < 1e-14
                assert m.is_positive_definite()

    def test_golden_value_on_axis(self):
        m = kahler_metric_at(1.0, 1.0 + 0j, 0j).matrix
        root2 = math.sqrt(2.0)
        assert abs(m[0, 0] - 1 / root2) < 1e-12
        assert abs(m[1, 1] - root2) < 1e-12
        assert abs(m[0, 1]) < 1e-15 and abs(m[1, 0]) < 1e-15

    def test_finite_difference_cross_check(self):
        for s in SCALES:
            for z1, z2 in sample_points(4, s, seed=3):
                a = kahler_metric_at(s, z1, z2).matrix
                b = metric_fd_at(s, z1, z2).matrix
                assert np.linalg.norm(a - b) < 1e-6 * np.linalg.norm(a)

    def test_origin_excluded(self):
        with pytest.raises(ChartSingular):
            kahler_metric_at(1.0, 0j, 0j)

    def test_flat_limit(self):
        devs = [flat_deviation(s, 1.0 + 0j, 0j) for s in (0.4, 0.2, 0.1)]
        assert devs[0] > devs[1] > devs[2]
        assert devs[2] < 1e-4

    def test_far_field_flat(self):
        assert flat_deviation(1.0, 1000.0 + 0j, 0j) < TOLERANCES["flat_limit"]
        assert flat_deviation(0.5, 300.0 + 400.0j, 0j) < TOLERANCES["flat_limit"]

    def test_container_rejects_indefinite(self):
        bad = HermitianMetric2(np.diag([1.0 + 0j, -1.0 + 0j]))
        assert not bad.is_positive_definite()


class TestRicci:
    def test_closed_form_family_is_flat(self):
        for s in SCALES:
            for z1, z2 in sample_points(20, s, seed=4):
                assert ricci_ratio(s, z1, z2) < TOLERANCES["ricci"]

    def test_extended_precision(self):
        r = ricci_ratio(1.0, 0.7 + 0.2j, -0.3 + 0.4j, precision="extended")
        assert r < 1e-9

    def test_precision_flag_validated(self):
        with pytest.raises(InvalidScale):
            ricci_at(1.0, 1.0 + 0j, 0j, precision="quad")

    def test_nested_differences_from_potential(self):
        z1, z2 = 0.9 + 0.1j, 0.4 - 0.2j
        ric = ricci_from_potential(lambda r: potential(1.0, r), z1, z2)
        h = kahler_metric_at(1.0, z1, z2).norm()
        assert np.linalg.norm(ric) / h < TOLERANCES["ricci"]

    def test_flat_control(self):
        ric = ricci_from_potential(lambda r: r * r, 0.9 + 0.1j, 0.4 - 0.2j,
                                   inner=0.1, outer=0.2)
        assert np.linalg.norm(ric) < 1e-10

    def test_constant_middle_term_variant_is_not_flat(self):
        # replacing the radial logarithm by a constant breaks flatness;
        # this guards the check itself against being vacuous
        def variant(r, s=1.0):
            u = r * r
            q = math.hypot(u, s * s)
            return q - s * s * math.log(q + s * s)

        ric = ricci_from_potential(variant, 0.9 + 0.1j, 0.4 - 0.2j)
        assert np.linalg.norm(ric) > 1e-2

    def test_step_underflow(self):
        with pytest.raises(NumericFailure):
            ricci_at(1.0, 1.0 + 0j, 0j, outer=1e-300)


class TestCurvature:
    def test_constant_curvature_oracle_norm(self):
        for z1, z2 in sample_points(6, 1.0, seed=5):
            nrm = radial_curvature_norm(fs_derivs, z1, z2)
            assert abs(nrm - math.sqrt(12.0)) < 1e-9

    def test_constant_curvature_oracle_einstein(self):
        for z1, z2 in sample_points(5, 1.0, seed=6):
            h = radial_metric(fs_derivs, z1, z2)
            ric = ricci_from_curvature(fs_derivs, z1, z2)
            assert np.linalg.norm(ric - 3 * h) < 1e-9

    def test_family_curvature_is_ricci_traceless(self):
        for s in (0.5, 2.0):
            for z1, z2 in sample_points(5, s, seed=7):
                tr = ricci_from_curvature(eh_derivs(s), z1, z2)
                assert np.linalg.norm(tr) < 1e-9

    def test_norm_decreases_outward(self):
        vals = [curvature_norm(1.0, r + 0j, 0j) for r in (0.3, 1.0, 3.0)]
        assert vals[0] > vals[1] > vals[2] > 0

    def test_rescaling_relation(self):
        z1, z2 = 0.8 + 0.3j, -0.2 + 0.5j
        for s in (0.5, 2.0):
            a = curvature_norm(s, z1, z2)
            b = curvature_norm(1.0, z1 / s, z2 / s) / (s * s)
            assert abs(a - b) < 1e-9 * abs(b)

    def test_probe_slope(self):
        rep = curvature_injectivity_scaling_probe(SCALES)
        assert abs(rep.slope + 2) < 0.1
        assert abs(rep.max_norms[0] / rep.max_norms[1] - 4) < 0.7

    def test_probe_single_scale(self):
        rep = curvature_injectivity_scaling_probe([1.0])
        assert rep.slope is None and len(rep.max_norms) == 1


class TestScalingProbe:
    def test_identifies_reciprocal_scale(self):
        rep = scaling_identity_probe(1.0, 2.0, sample_points(10, 1.0, seed=8))
        assert rep.verdict == "s/lambda"
        assert rep.matches_s_over_lambda < TOLERANCES["scaling"]
        assert rep.matches_lambda_s > 1e-2
        assert rep.matches_lambda_s >= 1e6 * rep.matches_s_over_lambda

    def test_identity_dilation_matches_both(self):
        rep = scaling_identity_probe(1.0, 1.0, sample_points(4, 1.0, seed=8))
        assert rep.matches_lambda_s < 1e-14
        assert rep.matches_s_over_lambda < 1e-14
        assert rep.verdict == "ambiguous"

    def test_reciprocal_probe_consistent(self):
        rep = scaling_identity_probe(2.0, 0.5, sample_points(10, 2.0, seed=9))
        assert rep.verdict == "s/lambda"

    def test_validation(self):
        with pytest.raises(InvalidScale):
            scaling_identity_probe(1.0, 0.0, [(1 + 0j, 0j)])


class TestSamplePoints:
    def test_deterministic(self):
        assert sample_points(5, 1.0, seed=3) == sample_points(5, 1.0, seed=3)

    def test_radius_bounds(self):
        for z1, z2 in sample_points(50, 2.0, seed=4, rmin=0.5, rmax=1.5):
            r = math.sqrt(abs(z1) ** 2 + abs(z2) ** 2)
            assert 0.99 <= r <= 3.01
