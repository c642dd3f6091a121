import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bingham_exchange.errors import DataValidationError
from bingham_exchange.model import (
    LambdaVector,
    SufficientStats,
    UnitVector,
    canonicalize,
    eigen_decompose,
    log_unnorm_bingham,
    log_unnorm_lik,
    sufficient_stats,
)

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


class TestEigenDecompose:
    def test_diagonal(self):
        v, d = eigen_decompose(np.diag([3.0, 2.0, 1.0]))
        np.testing.assert_array_equal(d, [3.0, 2.0, 1.0])
        np.testing.assert_allclose(np.abs(v), np.eye(3), atol=1e-15)

    def test_zero_matrix(self):
        v, d = eigen_decompose(np.zeros((3, 3)))
        np.testing.assert_array_equal(d, [0.0, 0.0, 0.0])
        np.testing.assert_allclose(v.T @ v, np.eye(3), atol=1e-12)

    def test_two_by_two(self):
        # characteristic polynomial (2-l)^2 - 1 = 0 gives l = 3, 1
        v, d = eigen_decompose([[2.0, 1.0], [1.0, 2.0]])
        np.testing.assert_allclose(d, [3.0, 1.0], atol=1e-12)
        s = 1 / math.sqrt(2)
        assert abs(abs(v[:, 0] @ [s, s]) - 1) < 1e-12
        assert abs(abs(v[:, 1] @ [s, -s]) - 1) < 1e-12

    def test_ties_keep_index_order(self):
        v, d = eigen_decompose(np.diag([1.0, 5.0, 1.0]))
        np.testing.assert_array_equal(d, [5.0, 1.0, 1.0])
        np.testing.assert_array_equal(np.abs(v[:, 1]), [1.0, 0.0, 0.0])
        np.testing.assert_array_equal(np.abs(v[:, 2]), [0.0, 0.0, 1.0])

    def test_rejects_asymmetric(self):
        with pytest.raises(DataValidationError):
            eigen_decompose([[1.0, 2.0], [0.0, 1.0]])

    @settings(max_examples=200, deadline=None)
    @given(st.integers(2, 6).flatmap(lambda q: arrays(float, (q, q), elements=finite)))
    def test_reconstruction(self, m):
        a = 0.5 * (m + m.T)
        v, d = eigen_decompose(a)
        assert np.linalg.norm(v @ np.diag(d) @ v.T - a) <= 1e-10 * max(1.0, np.linalg.norm(a))
        np.testing.assert_allclose(v.T @ v, np.eye(a.shape[0]), atol=1e-10)
        assert np.all(np.diff(d) <= 0)
        np.testing.assert_allclose(d, np.sort(np.linalg.eigvalsh(a))[::-1], atol=1e-9 * max(1, np.abs(a).max()))


class TestCanonicalize:
    def test_examples(self):
        assert canonicalize([3, 2, 1]).lambdas == (2.0, 1.0)
        assert canonicalize([0, 0, 0]).lambdas == (0.0, 0.0)
        assert canonicalize([-1, 4, 0]).lambdas == (5.0, 1.0)

    @given(arrays(float, st.integers(1, 5), elements=st.floats(0, 100)))
    def test_idempotent(self, lam):
        lam = np.sort(lam)[::-1]
        canon = LambdaVector(tuple(lam))
        shuffled = np.random.default_rng(0).permutation(np.append(lam, 0.0))
        assert canonicalize(shuffled) == canon
        assert canonicalize(canon.full()) == canon


class TestTypes:
    def test_unit_vector_normalises(self):
        u = UnitVector([3.0, 4.0])
        assert abs(np.linalg.norm(u.coords) - 1) <= 1e-12
        assert u.q == 2

    def test_unit_vector_rejects_tiny(self):
        with pytest.raises(DataValidationError):
            UnitVector([1e-9, 0.0, 0.0])

    def test_lambda_ordering(self):
        with pytest.raises(DataValidationError):
            LambdaVector((1.0, 2.0))
        with pytest.raises(DataValidationError):
            LambdaVector((1.0, -0.1))

    def test_stats_validation(self):
        with pytest.raises(DataValidationError):
            SufficientStats(0, (0.3, 0.3))
        with pytest.raises(DataValidationError):
            SufficientStats(10, (0.7, 0.4))
        with pytest.raises(DataValidationError):
            SufficientStats(10, (1.2, 0.0))
        assert SufficientStats(10, (0.25, 0.25)).full()[-1] == 0.5


class TestSufficientStats:
    def test_single(self):
        s = sufficient_stats([UnitVector([1, 0, 0])])
        assert s.n == 1 and s.taus == (1.0, 0.0)

    def test_mass_on_omitted_axis(self):
        s = sufficient_stats([UnitVector([0, 0, 1]), UnitVector([0, 0, -1])])
        assert s.n == 2 and s.taus == (0.0, 0.0)

    def test_axes(self):
        s = sufficient_stats(np.eye(3))
        np.testing.assert_allclose(s.taus, (1 / 3, 1 / 3), rtol=0, atol=1e-16)

    def test_errors(self):
        with pytest.raises(DataValidationError):
            sufficient_stats([])
        with pytest.raises(DataValidationError):
            sufficient_stats([UnitVector([1, 0, 0]), UnitVector([1, 0])])


class TestDensities:
    def test_log_unnorm_bingham(self):
        x = UnitVector([1, 1, 1])
        assert log_unnorm_bingham(x, LambdaVector((0, 0))) == 0.0
        assert log_unnorm_bingham(UnitVector([1, 0, 0]), LambdaVector((2, 1))) == -2.0
        assert log_unnorm_bingham(x, LambdaVector((0.588, 0.421))) == pytest.approx(-0.33633333, abs=1e-8)

    def test_log_unnorm_lik(self):
        s = SufficientStats(100, (0.30, 0.32))
        assert log_unnorm_lik(s, LambdaVector((0.588, 0.421))) == pytest.approx(-31.112, abs=1e-10)
        assert log_unnorm_lik(s, LambdaVector((0, 0))) == 0.0
        assert log_unnorm_lik(SufficientStats(10, (0.5, 0.5)), LambdaVector((1, 1))) == pytest.approx(-10.0)

    def test_full_diagonal_form(self):
        s = SufficientStats(100, (0.30, 0.32))
        base = log_unnorm_lik(s, (0.6, 0.4))
        # a common shift of all q entries multiplies every unit vector's density by e^{-c}
        assert log_unnorm_lik(s, (0.6 + 2.0, 0.4 + 2.0, 2.0)) == pytest.approx(base - 100 * 2.0, abs=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(
        st.integers(2, 5).flatmap(
            lambda q: st.tuples(
                arrays(float, (7, q), elements=st.floats(-1, 1)),
                arrays(float, q - 1, elements=st.floats(0, 40)),
            )
        )
    )
    def test_sufficiency_and_antipodal_symmetry(self, args):
        raw, lam = args
        raw = raw[np.linalg.norm(raw, axis=1) > 1e-3]
        if raw.shape[0] == 0:
            return
        xs = [UnitVector(r) for r in raw]
        lam = LambdaVector(tuple(np.sort(lam)[::-1]))
        direct = sum(log_unnorm_bingham(x, lam) for x in xs)
        via_stats = log_unnorm_lik(sufficient_stats(xs), lam)
        assert via_stats == pytest.approx(direct, rel=1e-10, abs=1e-12)
        for x in xs:
            assert log_unnorm_bingham(-x, lam) == log_unnorm_bingham(x, lam)
