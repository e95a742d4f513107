import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from moeastat.errors import DegenerateDataError, DimensionError, ParameterError
from moeastat.seeding import derive_seed, permutation_masks
from moeastat.stattests import ad2_statistic, ad2_test, energy_statistic, energy_test


def energy_brute(X, Y):
    X, Y = np.atleast_2d(X), np.atleast_2d(Y)
    n, m = len(X), len(Y)
    xy = sum(np.linalg.norm(x - y) for x in X for y in Y)
    xx = sum(np.linalg.norm(a - b) for a in X for b in X)
    yy = sum(np.linalg.norm(a - b) for a in Y for b in Y)
    return n * m / (n + m) * (2 * xy / (n * m) - xx / n ** 2 - yy / m ** 2)


samples2d = arrays(np.float64, st.tuples(st.integers(2, 8), st.just(2)), elements=st.floats(-5, 5, width=32))


class TestEnergy:
    @settings(max_examples=50, deadline=None)
    @given(samples2d, samples2d)
    def test_matches_brute_force(self, X, Y):
        assert energy_statistic(X, Y) == pytest.approx(energy_brute(X, Y), rel=1e-10, abs=1e-10)

    @settings(max_examples=50, deadline=None)
    @given(samples2d, samples2d)
    def test_symmetric_and_nonnegative(self, X, Y):
        assert energy_statistic(X, Y) == energy_statistic(Y, X)
        assert energy_statistic(X, Y) >= 0

    def test_identical_samples(self, rng):
        X = rng.normal(size=(10, 2))
        assert energy_statistic(X, X) == pytest.approx(0.0, abs=1e-12)

    def test_pvalue_lattice_and_determinism(self, rng):
        X, Y = rng.normal(size=(12, 2)), rng.normal(size=(15, 2))
        res = energy_test(X, Y, permutations=199, seed=7)
        assert res.p_value * 200 == pytest.approx(round(res.p_value * 200))
        assert 1 / 200 <= res.p_value <= 1
        assert energy_test(X, Y, permutations=199, seed=7) == res
        assert energy_test(X, Y, permutations=199, seed=7, workers=3) == res

    def test_clear_shift_detected(self, rng):
        X, Y = rng.normal(size=(20, 2)), rng.normal(3, 1, size=(20, 2))
        assert energy_test(X, Y, permutations=499).p_value == 1 / 500

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            energy_test(np.zeros((3, 2)), np.zeros((3, 3)))

    def test_bad_permutations(self):
        with pytest.raises(ParameterError):
            energy_test(np.zeros((3, 2)), np.ones((3, 2)), permutations=0)


@pytest.mark.filterwarnings("ignore:p-value capped")
class TestAndersonDarling:
    @settings(max_examples=60, deadline=None)
    @given(arrays(np.float64, st.integers(2, 15), elements=st.integers(0, 6).map(float)),
           arrays(np.float64, st.integers(2, 15), elements=st.integers(0, 6).map(float)))
    def test_matches_scipy_with_ties(self, x, y):
        if np.unique(np.concatenate([x, y])).size < 2:
            return
        expected = scipy.stats.anderson_ksamp([x, y], midrank=True).statistic
        assert ad2_statistic(x, y) == pytest.approx(expected, rel=1e-10, abs=1e-10)

    def test_matches_scipy_continuous(self, rng):
        x, y = rng.normal(size=25), rng.normal(0.3, 1, size=18)
        expected = scipy.stats.anderson_ksamp([x, y], midrank=True).statistic
        assert ad2_statistic(x, y) == pytest.approx(expected, rel=1e-12)

    def test_matches_scipy_permutation_pvalue_order(self, rng):
        x, y = rng.normal(size=20), rng.normal(1.0, 1, size=20)
        ours = ad2_test(x, y, permutations=999, seed=2).p_value
        theirs = scipy.stats.anderson_ksamp([x, y], midrank=True,
                                            method=scipy.stats.PermutationMethod(n_resamples=999, random_state=1)).pvalue
        assert abs(ours - theirs) < 0.01

    def test_degenerate(self):
        with pytest.raises(DegenerateDataError):
            ad2_test([1.0, 1.0], [1.0, 1.0])
        with pytest.raises(ParameterError):
            ad2_test([1.0], [2.0, 3.0])

    def test_lattice_and_determinism(self, rng):
        x, y = rng.normal(size=10), rng.normal(size=10)
        res = ad2_test(x, y, permutations=99, seed=4)
        assert round(res.p_value * 100) == pytest.approx(res.p_value * 100)
        assert ad2_test(x, y, permutations=99, seed=4, workers=2) == res


class TestSeeding:
    def test_derive_seed_stable(self):
        assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
        assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)

    @given(st.integers(0, 2 ** 63), st.integers(2, 30), st.integers(1, 29))
    def test_masks_are_relabelings(self, seed, total, n):
        n = min(n, total - 1)
        masks = permutation_masks(seed, 1, 6, n, total)
        assert masks.shape == (5, total)
        assert np.all(masks.sum(axis=1) == n)

    def test_rows_independent_of_chunking(self):
        full = permutation_masks(11, 1, 40, 7, 20)
        parts = np.vstack([permutation_masks(11, 1, 13, 7, 20), permutation_masks(11, 13, 40, 7, 20)])
        np.testing.assert_array_equal(full, parts)
