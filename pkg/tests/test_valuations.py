import math

import numpy as np
import pytest

from valgeo import bodies as B
from valgeo import transforms as T
from valgeo import valuations as V
from valgeo.base import unit_ball_volume
from valgeo.errors import DimensionError, PolynomialFitError, ScopeError
from valgeo.grassmann import (
    SeededSampler,
    coordinate_subspace,
    cos_angle,
    haar_subspace,
    orthonormal_basis,
    span_sum,
    zero_subspace,
)


class TestExpressionTypes:
    def test_degrees(self, sampler):
        f2 = haar_subspace(4, 2, sampler)
        assert V.IntrinsicVolume(2).degree == 2
        assert V.ProjectionVal(f2).degree == 2
        assert V.CroftonVal(T.constant_gfunction(4, 1), 1).degree == 1
        assert V.ProductProj(f2, f2).degree == 4
        assert V.Lambda(V.IntrinsicVolume(3)).degree == 2
        assert V.Lambda(V.Lambda(V.IntrinsicVolume(3))).degree == 1

    def test_lambda_requires_positive_degree(self):
        with pytest.raises(DimensionError):
            V.Lambda(V.IntrinsicVolume(0))

    def test_crofton_dimension_check(self):
        with pytest.raises(DimensionError):
            V.CroftonVal(T.constant_gfunction(4, 1), 2)

    def test_parity_even(self):
        assert V.IntrinsicVolume(1).parity == "even"


class TestEvaluate:
    def test_euler_characteristic(self, sampler):
        for body in (B.make_cube(3), B.Ball(haar_subspace(3, 2, sampler))):
            est = V.evaluate(V.IntrinsicVolume(0), body, 10, sampler)
            assert est.value == 1.0

    def test_projection_on_ball_is_cosine(self, sampler):
        f = haar_subspace(4, 2, sampler)
        l = haar_subspace(4, 2, sampler)
        est = V.evaluate(V.ProjectionVal(f), B.Ball(l), 10, sampler)
        assert est.value == pytest.approx(
            unit_ball_volume(2) * cos_angle(l, f), rel=1e-10
        )

    def test_intrinsic_on_matching_ball(self, sampler):
        l = haar_subspace(5, 3, sampler)
        est = V.evaluate(V.IntrinsicVolume(3), B.Ball(l), 10, sampler)
        assert est.value == pytest.approx(unit_ball_volume(3), rel=1e-12)

    def test_intrinsic_on_thin_ball_vanishes(self, sampler):
        l = haar_subspace(5, 2, sampler)
        assert V.evaluate(V.IntrinsicVolume(3), B.Ball(l), 10, sampler).value == 0.0

    def test_projection_on_polytope_exact(self, sampler):
        cube = B.make_cube(3)
        f = coordinate_subspace(3, [0, 1])
        est = V.evaluate(V.ProjectionVal(f), cube, 10, sampler)
        assert est.value == pytest.approx(1.0, rel=1e-12)
        assert est.stderr == 0.0

    def test_crofton_constant_equals_kubota_mean(self):
        # CroftonVal with f = 1 is the raw mean projection volume.
        cube = B.make_cube(3)
        expr = V.CroftonVal(T.constant_gfunction(3, 1), 1)
        est = V.evaluate(expr, cube, 30_000, SeededSampler(3))
        kub = B.kubota_estimate(cube, 1, 30_000, SeededSampler(4))
        c = B.kubota_coefficient(3, 1)
        assert abs(c * est.value - kub.value) < 4 * c * math.hypot(est.stderr, kub.stderr)

    def test_translation_invariance(self):
        cube = B.make_cube(3)
        moved = B.translate(cube, [0.3, -1.2, 0.7])
        a = V.evaluate(V.IntrinsicVolume(2), cube, 20_000, SeededSampler(5))
        b = V.evaluate(V.IntrinsicVolume(2), moved, 20_000, SeededSampler(5))
        assert a.value == pytest.approx(b.value, rel=1e-10)

    def test_evenness(self):
        p = B.make_random_polytope(3, 12, SeededSampler(6))
        a = V.evaluate(V.IntrinsicVolume(2), p, 20_000, SeededSampler(7))
        b = V.evaluate(V.IntrinsicVolume(2), B.negate(p), 20_000, SeededSampler(7))
        assert a.value == pytest.approx(b.value, rel=1e-10)

    def test_homogeneity(self):
        p = B.make_simplex(3)
        a = V.evaluate(V.IntrinsicVolume(2), p, 20_000, SeededSampler(8))
        b = V.evaluate(V.IntrinsicVolume(2), B.scale(p, 1.7), 20_000, SeededSampler(8))
        assert b.value == pytest.approx(1.7**2 * a.value, rel=1e-10)


class TestProductProjection:
    def test_complementary_coordinate_planes(self):
        c4 = B.make_cube(4)
        f1 = coordinate_subspace(4, [0, 1])
        f2 = coordinate_subspace(4, [2, 3])
        assert V.product_projection(f1, f2, c4) == pytest.approx(1.0, rel=1e-12)

    def test_repeated_factor_degenerate(self):
        c4 = B.make_cube(4)
        f1 = coordinate_subspace(4, [0, 1])
        assert V.product_projection(f1, f1, c4) == 0.0

    def test_rotated_vs_rejection_mc(self):
        c4 = B.make_cube(4)
        f1 = coordinate_subspace(4, [0, 1])
        c, s_ = math.cos(0.4), math.sin(0.4)
        rot = np.eye(4)
        rot[1, 1], rot[1, 2], rot[2, 1], rot[2, 2] = c, -s_, s_, c
        f2 = orthonormal_basis(rot @ coordinate_subspace(4, [2, 3]).basis)
        exact = V.product_projection(f1, f2, c4)
        embedded = B.Polytope(
            4, np.hstack([c4.vertices @ f1.basis, c4.vertices @ f2.basis])
        )
        mc = B.mc_hull_volume(embedded, 60_000, SeededSampler(9))
        assert abs(mc.value - exact) < 4 * mc.stderr

    def test_degree_above_ambient_gives_zero(self, sampler):
        cube = B.make_cube(3)
        f1 = haar_subspace(3, 2, sampler)
        f2 = haar_subspace(3, 2, sampler)
        assert V.product_projection(f1, f2, cube) == 0.0

    def test_on_ball_matches_claim_identity(self, sampler):
        e = haar_subspace(5, 2, sampler)
        f = haar_subspace(5, 1, sampler)
        l = haar_subspace(5, 3, sampler)
        est = V.evaluate(V.ProductProj(e, f), B.Ball(l), 10, sampler)
        lhs, rhs = V.claim23_check(e, f, l)
        assert est.value == pytest.approx(lhs, rel=1e-12)
        assert est.value == pytest.approx(rhs, rel=1e-9)


class TestKlain:
    def test_intrinsic_volume_constant(self, sampler):
        kf = V.klain_function(V.IntrinsicVolume(2), ambient_dim=4)
        for _ in range(3):
            l = haar_subspace(4, 2, sampler)
            assert kf(l) == pytest.approx(unit_ball_volume(2), rel=1e-12)

    def test_projection_val_cosine(self, sampler):
        f = haar_subspace(4, 2, sampler)
        kf = V.klain_function(V.ProjectionVal(f))
        l = haar_subspace(4, 2, sampler)
        assert kf(l) == pytest.approx(unit_ball_volume(2) * cos_angle(l, f), rel=1e-10)

    def test_basis_independence(self, sampler):
        f = haar_subspace(4, 2, sampler)
        kf = V.klain_function(V.ProjectionVal(f))
        l = haar_subspace(4, 2, sampler)
        q = np.linalg.qr(sampler.standard_normal((2, 2)))[0]
        l2 = orthonormal_basis(l.basis @ q)
        assert kf(l) == pytest.approx(kf(l2), abs=1e-10)

    def test_crofton_klain_deterministic(self, sampler):
        expr = V.CroftonVal(T.zonal_harmonic(3, 2, [0, 0, 1.0]), 1)
        kf = V.klain_function(expr, budget=2048, s=SeededSampler(10), ambient_dim=3)
        l = haar_subspace(3, 1, sampler)
        assert kf(l) == kf(l)


class TestClaim23:
    @pytest.mark.parametrize("n", [5, 6])
    def test_random_triples(self, n):
        s = SeededSampler(20 + n)
        for t in range(100):
            i1 = 1 + t % 2
            i2 = 1 + (t // 2) % 2
            e = haar_subspace(n, i1, s)
            f = haar_subspace(n, i2, s)
            l = haar_subspace(n, i1 + i2, s)
            lhs, rhs = V.claim23_check(e, f, l)
            assert abs(lhs - rhs) <= 1e-9 * unit_ball_volume(i1 + i2)

    def test_orthogonal_sum_case(self):
        e = coordinate_subspace(6, [0, 1])
        f = coordinate_subspace(6, [2])
        l = span_sum(e, f)
        lhs, rhs = V.claim23_check(e, f, l)
        assert lhs == pytest.approx(unit_ball_volume(3), rel=1e-12)
        assert rhs == pytest.approx(unit_ball_volume(3), rel=1e-12)

    def test_dimension_mismatch(self, sampler):
        with pytest.raises(DimensionError):
            V.claim23_check(
                haar_subspace(5, 1, sampler),
                haar_subspace(5, 2, sampler),
                haar_subspace(5, 2, sampler),
            )


class TestLemma22:
    def test_k_zero_degenerate(self, sampler):
        f = haar_subspace(4, 2, sampler)
        l = haar_subspace(4, 2, sampler)
        est = V.lemma22_formula(f, 0, l, 10, sampler)
        assert est.value == pytest.approx(cos_angle(l, f), rel=1e-12)

    def test_zero_f_reduces_to_unrestricted(self):
        n = 4
        l = haar_subspace(n, 2, SeededSampler(30))
        a = V.lemma22_formula(zero_subspace(n), 2, l, 40_000, SeededSampler(31))
        b = T.cosine_apply(T.constant_gfunction(n, 2), 2, l, 20_000, SeededSampler(32))
        assert abs(a.value - b.value) < 4 * math.hypot(a.stderr, b.stderr)

    def test_proportional_to_direct(self):
        n, i, k = 4, 1, 1
        f = haar_subspace(n, i, SeededSampler(33))
        direct, formula = [], []
        for j in range(8):
            l = haar_subspace(n, 2, SeededSampler(34 + j))
            direct.append(V.lemma22_direct(f, k, l, 40_000, SeededSampler(50 + j)).value)
            formula.append(V.lemma22_formula(f, k, l, 40_000, SeededSampler(70 + j)).value)
        _, residual = V.fit_proportionality(np.array(direct), np.array(formula))
        assert residual < 0.03


class TestLemma24:
    def test_constant_function_invariance(self):
        g = V.multiply_by_intrinsic(
            T.constant_gfunction(4, 1), 1, 1, 20_000, SeededSampler(40)
        )
        assert g.grass_dim == 2
        vals = [g(haar_subspace(4, 2, SeededSampler(41 + j))) for j in range(3)]
        assert (max(vals) - min(vals)) / abs(np.mean(vals)) < 0.08

    def test_proportional_to_direct(self):
        n, i, k = 4, 1, 1
        f = T.zonal_harmonic(n, 2, [1.0, 0.4, -0.2, 0.5])
        smooth = T.GFunction(
            n, 1, lambda sub: 1.0 + 0.5 * f(sub),
            batch_evaluator=lambda bases: 1.0 + 0.5 * f.batch_evaluator(bases),
        )
        direct, formula = [], []
        for j in range(8):
            l = haar_subspace(n, 2, SeededSampler(90 + j))
            direct.append(
                V.lemma24_direct(smooth, i, k, l, 40_000, SeededSampler(110 + j)).value
            )
            g = V.multiply_by_intrinsic(smooth, i, k, 40_000, SeededSampler(130 + j))
            formula.append(g(l))
        _, residual = V.fit_proportionality(np.array(direct), np.array(formula))
        assert residual < 0.04


class TestLambda:
    def test_volume_on_cube(self):
        est = V.lambda_apply(
            V.Lambda(V.IntrinsicVolume(3)), B.make_cube(3), None, 1 << 16,
            SeededSampler(60),
        )
        assert est.value == pytest.approx(6.0, rel=0.03)

    def test_lambda_v1_body_independent(self):
        # Lambda V_1 is a multiple of the Euler characteristic.
        vals = []
        for j, body in enumerate(
            (B.make_cube(3), B.make_simplex(3), B.make_random_polytope(3, 16, SeededSampler(61)))
        ):
            est = V.lambda_apply(
                V.Lambda(V.IntrinsicVolume(1)), body, None, 20_000, SeededSampler(62 + j)
            )
            vals.append(est.value)
        assert max(vals) - min(vals) < 0.03 * abs(np.mean(vals))
        # The constant is V_1 of the unit ball.
        assert np.mean(vals) == pytest.approx(4.0, rel=0.02)

    def test_nested_lambda(self):
        # vol(square + eps D) = 1 + 4 eps + pi eps^2, so Lambda^2 = 2 pi.
        est = V.lambda_apply(
            V.Lambda(V.Lambda(V.IntrinsicVolume(2))), B.make_cube(2), None, 1 << 16,
            SeededSampler(70),
        )
        assert est.value == pytest.approx(2 * math.pi, rel=0.05)

    def test_projection_val_planar_exact(self):
        f = haar_subspace(3, 2, SeededSampler(71))
        cube = B.make_cube(3)
        est = V.lambda_apply(V.Lambda(V.ProjectionVal(f)), cube, None, 100, SeededSampler(72))
        shadow = B.project(cube, f)
        assert est.value == pytest.approx(V._area_perimeter(shadow.vertices)[1], rel=1e-9)

    def test_fit_error_on_impossible_residual(self):
        with pytest.raises(PolynomialFitError):
            V.lambda_apply(
                V.Lambda(V.IntrinsicVolume(3)), B.make_cube(3), None, 4096,
                SeededSampler(73), max_residual=1e-12,
            )

    def test_scope_error_middle_degree(self):
        with pytest.raises(ScopeError):
            V.lambda_apply(
                V.Lambda(V.IntrinsicVolume(3)), B.make_cube(4), None, 1000,
                SeededSampler(74),
            )

    def test_ball_body_rejected(self, sampler):
        with pytest.raises(ScopeError):
            V.evaluate(
                V.Lambda(V.IntrinsicVolume(2)), B.Ball(haar_subspace(3, 2, sampler)),
                100, sampler,
            )


class TestProportionality:
    def test_identical_expressions(self):
        bodies = [B.make_cube(3), B.make_simplex(3)]
        rep = V.proportionality_check(
            V.IntrinsicVolume(2), V.IntrinsicVolume(2), bodies, 10_000, SeededSampler(80)
        )
        assert np.allclose(rep.ratios, 1.0, atol=1e-9)
        assert rep.proportional

    def test_zero_denominator_excluded(self):
        segment = B.Polytope(3, [[0, 0, 0], [0, 0, 1.0]])
        cube = B.make_cube(3)
        f = coordinate_subspace(3, [0])
        expr_a = V.IntrinsicVolume(1)
        expr_b = V.ProjectionVal(f)  # vanishes on the segment along e3
        with pytest.warns(UserWarning):
            rep = V.proportionality_check(
                expr_a, expr_b, [cube, segment], 5_000, SeededSampler(81)
            )
        assert rep.skipped == [1]

    def test_v1_squared_vs_v2(self):
        bodies = [B.make_cube(3), B.make_simplex(3)]
        rep = V.proportionality_check(
            V.v1_power(3, 2), V.IntrinsicVolume(2), bodies, 30_000, SeededSampler(82)
        )
        assert rep.spread < 0.03

    def test_v1_power_one_matches_kubota(self):
        est = V.evaluate(V.v1_power(3, 1), B.make_cube(3), 40_000, SeededSampler(83))
        assert abs(est.value - 3.0) < 4 * est.stderr + 0.01

    def test_v1_power_on_ball(self, sampler):
        est = V.evaluate(V.v1_power(3, 1), B.Ball(haar_subspace(3, 3, sampler)), 30_000, SeededSampler(84))
        assert est.value == pytest.approx(4.0, rel=0.03)


class TestExprJson:
    def test_round_trip_tree(self):
        expr = V.Lambda(V.CroftonVal(T.zonal_harmonic(3, 2, [0, 0, 1.0]), 1))
        data = V.expr_to_json(expr)
        assert data["op"] == "Lambda"
        rebuilt = V.expr_from_json(data)
        assert rebuilt.degree == expr.degree
        assert isinstance(rebuilt, V.Lambda)

    def test_projection_round_trip(self, sampler):
        f = haar_subspace(4, 2, sampler)
        rebuilt = V.expr_from_json(V.expr_to_json(V.ProjectionVal(f)))
        assert np.allclose(rebuilt.subspace.projector(), f.projector(), atol=1e-12)

    def test_custom_not_serializable(self):
        with pytest.raises(ValueError):
            V.expr_to_json(V.v1_power(3, 2))

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            V.expr_from_json({"op": "Nope"})
