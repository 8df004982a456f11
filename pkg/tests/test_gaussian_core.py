import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from seqgap import (
    DimensionMismatch,
    Ellipsoid,
    IndefiniteMatrix,
    NotSymmetric,
    ellipsoid_membership,
    ellipsoid_membership_many,
    make_rng,
    psd_sqrt,
    sample_std_gaussian,
    tail_bound_check,
)


class TestSampling:
    def test_same_seed_same_value(self):
        a = sample_std_gaussian(1, make_rng(123))
        b = sample_std_gaussian(1, make_rng(123))
        assert a == b

    def test_different_seed_differs(self):
        assert sample_std_gaussian(1, make_rng(1)) != sample_std_gaussian(1, make_rng(2))

    def test_dim_validation(self):
        with pytest.raises(ValueError):
            sample_std_gaussian(0, make_rng(0))

    def test_moments_million_samples(self):
        # CLT: sd of the mean is 1e-3, so +-0.01 is a 10-sigma band;
        # chi-square: sd of the sample variance is ~1.4e-3, ~7 sigma
        z = sample_std_gaussian(3, make_rng(7))  # warm the stream
        rng = make_rng(7)
        samples = rng.standard_normal((1_000_000, 2))
        assert np.all(np.abs(samples.mean(axis=0)) <= 0.01)
        assert np.all(np.abs(samples.var(axis=0) - 1.0) <= 0.01)


class TestPsdSqrt:
    def test_identity(self):
        np.testing.assert_allclose(psd_sqrt(np.eye(3)), np.eye(3), atol=1e-14)

    def test_diagonal(self):
        np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-12)

    def test_two_by_two(self):
        sigma = np.array([[2.0, 1.0], [1.0, 2.0]])
        s = psd_sqrt(sigma)
        assert np.linalg.norm(s @ s.T - sigma) <= 1e-8

    def test_not_symmetric(self):
        with pytest.raises(NotSymmetric):
            psd_sqrt(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_indefinite(self):
        with pytest.raises(IndefiniteMatrix):
            psd_sqrt(np.array([[1.0, 0.0], [0.0, -0.5]]))

    def test_small_negative_eigenvalue_clamped(self):
        sigma = np.diag([1.0, -1e-13])
        s = psd_sqrt(sigma)
        assert np.all(np.isfinite(s))
        assert s[1, 1] == 0.0

    @pytest.mark.parametrize("dim", [2, 8, 33, 64])
    def test_roundtrip_random_psd(self, dim):
        rng = make_rng(dim)
        a = rng.standard_normal((dim, dim))
        sigma = a @ a.T
        s = psd_sqrt(sigma)
        assert np.linalg.norm(s @ s.T - sigma) <= 1e-8 * np.linalg.norm(sigma)

    def test_rectangular_rejected(self):
        with pytest.raises(DimensionMismatch):
            psd_sqrt(np.ones((2, 3)))


class TestGaussianPushforward:
    def test_linear_image_moments(self):
        # images A Z have mean 0 and covariance A A^T; 5-standard-error bands
        rng = make_rng(11)
        a = rng.standard_normal((3, 5))
        target = a @ a.T
        n = 100_000
        samples = rng.standard_normal((n, 5)) @ a.T
        mean_se = np.sqrt(np.diag(target) / n)
        assert np.all(np.abs(samples.mean(axis=0)) <= 5 * mean_se)
        emp_cov = np.cov(samples.T)
        cov_se = np.sqrt(
            (np.outer(np.diag(target), np.diag(target)) + target**2) / n
        )
        assert np.all(np.abs(emp_cov - target) <= 5 * cov_se)


class TestEllipsoid:
    def test_unit_ball_member(self):
        e = Ellipsoid(factor=np.eye(2))
        assert ellipsoid_membership(e, [0.5, 0.0], 1.0)

    def test_unit_ball_boundary(self):
        e = Ellipsoid(factor=np.eye(2))
        assert ellipsoid_membership(e, [1.0, 0.0], 1.0)
        assert not ellipsoid_membership(e, [1.001, 0.0], 1.0)

    def test_singular_range_condition(self):
        # x has a component off the flat direction: not a member at any radius
        e = Ellipsoid(factor=np.diag([2.0, 0.0]))
        assert not ellipsoid_membership(e, [0.0, 0.1], 1.0)
        assert ellipsoid_membership(e, [1.9, 0.0], 1.0)

    def test_constructive_member(self):
        # x = sqrt(Sigma) z with |z| = 0.99 r is inside r E by construction
        rng = make_rng(3)
        a = rng.standard_normal((4, 4))
        s = psd_sqrt(a @ a.T)
        e = Ellipsoid(factor=s)
        z = rng.standard_normal(4)
        z *= 0.99 / np.linalg.norm(z)
        assert ellipsoid_membership(e, s @ z, 1.0)

    def test_invertible_cross_check(self):
        # for invertible A membership at radius r is |A^-1 x| <= r
        rng = make_rng(5)
        a = rng.standard_normal((3, 3)) + 3 * np.eye(3)
        e = Ellipsoid(factor=a)
        for _ in range(50):
            x = rng.standard_normal(3) * 2
            r = float(rng.random() * 3)
            direct = np.linalg.norm(np.linalg.solve(a, x)) <= r * (1 + 1e-9) + 1e-15
            assert ellipsoid_membership(e, x, r) == direct

    @settings(max_examples=50, deadline=None)
    @given(
        radius=st.floats(min_value=0.0, max_value=5.0),
        bump=st.floats(min_value=0.0, max_value=5.0),
        seed=st.integers(min_value=0, max_value=1000),
    )
    def test_monotone_in_radius(self, radius, bump, seed):
        rng = make_rng(seed)
        e = Ellipsoid(factor=rng.standard_normal((3, 2)))
        x = rng.standard_normal(3)
        if ellipsoid_membership(e, x, radius):
            assert ellipsoid_membership(e, x, radius + bump)

    def test_many_matches_single(self):
        rng = make_rng(9)
        e = Ellipsoid(factor=rng.standard_normal((3, 2)))
        xs = rng.standard_normal((40, 3))
        many = ellipsoid_membership_many(e, xs, 1.5)
        single = np.array([ellipsoid_membership(e, x, 1.5) for x in xs])
        assert np.array_equal(many, single)

    def test_dimension_mismatch(self):
        e = Ellipsoid(factor=np.eye(2))
        with pytest.raises(DimensionMismatch):
            ellipsoid_membership(e, [1.0, 0.0, 0.0], 1.0)


class TestTailBound:
    def test_dim1_l2_matches_erfc_oracle(self):
        # P(|Z| > 3) = erfc(3 / sqrt 2) ~= 0.0026998
        est, bound = tail_bound_check(1, "l2", 200_000, make_rng(0))
        exact = special.erfc(3.0 / np.sqrt(2.0))
        se = np.sqrt(exact * (1 - exact) / 200_000)
        assert abs(est - exact) <= 5 * se
        assert bound == pytest.approx(np.exp(-2.0))
        assert est <= bound

    def test_dim2_l1(self):
        est, bound = tail_bound_check(2, "l1", 100_000, make_rng(1))
        assert bound == pytest.approx(np.exp(-4.0))
        assert est <= bound

    def test_dim8_l2_no_hits(self):
        est, bound = tail_bound_check(8, "l2", 100_000, make_rng(2))
        assert est == 0.0
        assert bound == pytest.approx(np.exp(-16.0))

    def test_trials_floor(self):
        with pytest.raises(ValueError):
            tail_bound_check(1, "l2", 100, make_rng(0))
