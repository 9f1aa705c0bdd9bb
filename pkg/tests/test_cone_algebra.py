import numpy as np
import pytest
from conftest import SHEAR, cloud_from_seed, cones, seeds
from hypothesis import given
from hypothesis import strategies as st

from riskgeom import DirectionGrid, RegionSpec, RieszCone, SupportRegion, build_region
from riskgeom.cone_algebra import (
    ConeError,
    cone_contains,
    dual_generators,
    in_dual_cone,
    k_infimum,
    leq_k,
)
from riskgeom.convex_region import scale_translate
from riskgeom.risk_engine import _vertex_density


class TestConstruction:
    def test_identity_is_orthant(self):
        K = RieszCone.identity(3)
        assert K.is_orthant
        np.testing.assert_array_equal(K.A_inv, np.eye(3))

    def test_inverse_cached(self, shear):
        np.testing.assert_allclose(shear.A @ shear.A_inv, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(shear.A_inv, [[1, 0], [-1, 1]])

    @pytest.mark.parametrize(
        "A",
        [
            [[1, -0.1], [0, 1]],
            [[1, 1], [1, 1]],
            [[1, 0, 0], [0, 1, 0]],
            [[np.nan, 0], [0, 1]],
            [[1, 0], [0, 1e-14]],
        ],
    )
    def test_rejects_bad_matrices(self, A):
        with pytest.raises(ConeError):
            RieszCone.from_matrix(A)

    def test_json_roundtrip(self, shear):
        K = RieszCone.from_json(shear.to_json())
        np.testing.assert_array_equal(K.A, shear.A)

    def test_json_missing_A_is_orthant(self):
        assert RieszCone.from_json({}, d=2).is_orthant
        with pytest.raises(ConeError):
            RieszCone.from_json({})

    def test_json_dimension_mismatch(self, shear):
        with pytest.raises(ConeError):
            RieszCone.from_json(shear.to_json(), d=3)

    def test_immutable(self, shear):
        with pytest.raises(ValueError):
            shear.A[0, 0] = 5.0


class TestMembership:
    def test_examples(self, shear):
        I = RieszCone.identity(2)
        assert cone_contains([1, 2], I)
        assert not cone_contains([-1, 0], I)
        assert cone_contains([1, -0.5], shear)

    def test_zero_always_member(self, shear):
        assert cone_contains([0.0, 0.0], shear)

    def test_boundary_rounding_tolerated(self, shear):
        # A x = (1, 0) up to one ulp of cancellation
        assert cone_contains([0.1 + 0.2, -0.30000000000000004], shear)

    def test_leq_examples(self, shear):
        I = RieszCone.identity(2)
        assert leq_k([3, 4], [3, 4], I)
        assert leq_k([0, 0], [1, 1], I)
        assert leq_k([0, 1], [1, 0], shear)
        assert not leq_k([1, 0], [0, 1], shear)

    def test_dimension_mismatch(self, shear):
        with pytest.raises(ValueError):
            cone_contains([1.0, 2.0, 3.0], shear)
        with pytest.raises(ValueError):
            leq_k([1.0], [1.0, 2.0], shear)

    @given(cones(3), st.lists(st.floats(-5, 5), min_size=9, max_size=9))
    def test_order_properties(self, K, flat):
        x, y, z = np.array(flat).reshape(3, 3)
        assert leq_k(x, x, K)
        if leq_k(x, y, K) and leq_k(y, z, K):
            assert leq_k(x, z, K)
        if leq_k(x, y, K) and leq_k(y, x, K):
            np.testing.assert_allclose(K.A @ x, K.A @ y, atol=1e-9)

    @given(cones(2), st.lists(st.floats(0, 5), min_size=2, max_size=2))
    def test_generated_points_are_members(self, K, z):
        assert cone_contains(K.A_inv @ np.array(z), K)


class TestDual:
    def test_generators(self, shear):
        np.testing.assert_array_equal(dual_generators(RieszCone.identity(2)), np.eye(2))
        np.testing.assert_array_equal(dual_generators(shear), [[1, 0], [1, 1]])

    @given(cones(3), seeds)
    def test_generators_nonnegative_on_sampled_cone(self, K, seed):
        # sampling oracle: K is spanned by the columns of A^{-1}
        v = np.random.default_rng(seed).exponential(size=(200, 3)) @ K.A_inv.T
        assert np.all(v @ dual_generators(K).T >= -1e-9)

    def test_dual_membership(self, shear):
        assert in_dual_cone([1, 1], shear)
        assert in_dual_cone([2, 1], shear)
        assert not in_dual_cone([0, 1], shear)
        assert not in_dual_cone([-1, 1], shear)


class TestInfimum:
    def test_box(self):
        grid = DirectionGrid.build(2, n_angles=0)
        box = SupportRegion.from_points(grid, [[1, 3], [2, 3], [1, 4], [2, 4]])
        np.testing.assert_allclose(k_infimum(box, RieszCone.identity(2)), [1, 3])

    def test_singleton(self, shear):
        grid = DirectionGrid.build(2, shear)
        np.testing.assert_allclose(k_infimum(SupportRegion.singleton(grid, [0, 0]), shear), [0, 0], atol=1e-15)

    def test_zonoid_square_shear(self, square, shear):
        R = build_region(square, RegionSpec("zonoid", 0.5, shear))
        np.testing.assert_allclose(k_infimum(R, shear), [0, 0.5], atol=1e-12)

    def test_missing_direction_is_an_error(self, shear):
        grid = DirectionGrid.build(2, n_angles=0)
        F = SupportRegion.singleton(grid, [0, 0])
        with pytest.raises(ValueError, match="not on the grid"):
            k_infimum(F, shear)

    @given(seeds)
    def test_lower_bound_and_translation(self, seed):
        D = cloud_from_seed(seed, d=2)
        K = RieszCone.from_matrix(SHEAR) if seed % 2 else RieszCone.identity(2)
        R = build_region(D, RegionSpec("zonoid", 0.3, K))
        r = k_infimum(R, K)
        # every reweighted mean (a point of the region) dominates the infimum
        rng = np.random.default_rng(seed)
        for _ in range(5):
            l = _vertex_density(rng.permutation(D.m), D.weights, 1 / 0.3)
            assert leq_k(r, (l * D.weights) @ D.points, K)
        y = rng.normal(size=2)
        np.testing.assert_allclose(k_infimum(scale_translate(R, 1.0, y), K), r + y, atol=1e-9)
        # tightness: A r is the coordinatewise infimum of <a_i, x> over the region
        tight = [-R.support_at(-a) * np.linalg.norm(a) for a in K.A]
        np.testing.assert_allclose(K.A @ r, tight, atol=1e-9)

    def test_orthant_is_coordinatewise_minimum(self):
        D = cloud_from_seed(5, d=3)
        K = RieszCone.identity(3)
        R = build_region(D, RegionSpec("ech", 2, K))
        expect = [-R.support_at(-e) for e in np.eye(3)]
        np.testing.assert_allclose(k_infimum(R, K), expect, atol=1e-12)
