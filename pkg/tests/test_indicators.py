import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from moeastat.data import ApproximationSet, ReferenceData
from moeastat.errors import CapabilityError, DimensionError, ParameterError, ReferenceLookupError
from moeastat.indicators import (
    IndicatorSpec,
    compute_indicators,
    delta_p,
    gd_p,
    hypervolume_exact,
    hypervolume_mc,
    igd_p,
    nondominated,
)
from oracles import gd_double_loop, hv_inclusion_exclusion


def point_sets(k_values=(2, 3, 4), max_points=6):
    return st.sampled_from(k_values).flatmap(
        lambda k: arrays(np.float64, st.tuples(st.integers(1, max_points), st.just(k)),
                         elements=st.floats(0, 1, allow_nan=False, width=32)))


class TestHypervolume:
    def test_single_box(self):
        assert hypervolume_exact([[0.2, 0.5]], [1.0, 1.0]) == pytest.approx(0.4)

    def test_staircase_2d(self):
        pts = [[0.0, 0.5], [0.5, 0.0]]
        assert hypervolume_exact(pts, [1, 1]) == pytest.approx(0.75)

    def test_points_outside_reference_ignored(self):
        assert hypervolume_exact([[1.2, 0.0], [1.0, 0.5]], [1, 1]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            hypervolume_exact([[0.1, 0.2]], [1, 1, 1])

    def test_capability_cap(self):
        with pytest.raises(CapabilityError):
            hypervolume_exact(np.zeros((1, 9)), np.ones(9))
        assert hypervolume_exact(np.zeros((1, 9)), np.ones(9), max_k=9) == 1.0

    def test_unit_cube_corner(self):
        for k in range(1, 7):
            assert hypervolume_exact(np.zeros((1, k)), np.ones(k)) == 1.0

    @settings(max_examples=60, deadline=None)
    @given(point_sets())
    def test_matches_inclusion_exclusion(self, P):
        ref = np.full(P.shape[1], 1.1)
        assert abs(hypervolume_exact(P, ref) - hv_inclusion_exclusion(P, ref)) <= 1e-12

    @settings(max_examples=40, deadline=None)
    @given(point_sets(), st.data())
    def test_monotone_under_addition(self, P, data):
        ref = np.full(P.shape[1], 1.1)
        extra = data.draw(arrays(np.float64, (1, P.shape[1]), elements=st.floats(0, 1, width=32)))
        assert hypervolume_exact(np.vstack([P, extra]), ref) >= hypervolume_exact(P, ref) - 1e-15

    @settings(max_examples=40, deadline=None)
    @given(point_sets())
    def test_dominated_point_invariant(self, P):
        ref = np.full(P.shape[1], 1.1)
        worse = np.minimum(P[:1] + 0.05, 1.05)
        assert hypervolume_exact(np.vstack([P, worse]), ref) == pytest.approx(hypervolume_exact(P, ref), abs=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(point_sets(), st.randoms(use_true_random=False))
    def test_permutation_invariant(self, P, rnd):
        ref = np.full(P.shape[1], 1.1)
        order = list(range(len(P)))
        rnd.shuffle(order)
        assert hypervolume_exact(P[order], ref) == pytest.approx(hypervolume_exact(P, ref), abs=1e-15)

    def test_mc_seeded(self):
        P = [[0.2, 0.6, 0.4], [0.5, 0.1, 0.7]]
        a = hypervolume_mc(P, [1, 1, 1], samples=10_000, seed=3)
        assert a == hypervolume_mc(P, [1, 1, 1], samples=10_000, seed=3)
        assert a != hypervolume_mc(P, [1, 1, 1], samples=10_000, seed=4)

    def test_mc_standard_error_scaling(self):
        # std of the estimator scales like 1/sqrt(samples)
        P = [[0.3, 0.6], [0.6, 0.3]]
        stds = [np.std([hypervolume_mc(P, [1, 1], samples=n, seed=s) for s in range(300)]) for n in (400, 800, 1600)]
        assert stds[0] / stds[1] == pytest.approx(np.sqrt(2), rel=0.2)
        assert stds[0] / stds[2] == pytest.approx(2.0, rel=0.2)

    def test_mc_high_dimension(self):
        k = 10
        P = np.full((1, k), 0.5)
        assert hypervolume_mc(P, np.ones(k), samples=1000) == pytest.approx(0.5 ** k)


def test_nondominated_filter():
    P = np.array([[0.1, 0.9], [0.5, 0.5], [0.6, 0.6], [0.5, 0.5], [0.9, 0.1]])
    assert sorted(map(tuple, nondominated(P))) == [(0.1, 0.9), (0.5, 0.5), (0.9, 0.1)]


class TestDistances:
    def test_zero_when_equal(self):
        F = np.array([[0, 1], [1, 0.0]])
        assert gd_p(F, F) == igd_p(F, F) == delta_p(F, F) == 0.0

    def test_simple_values(self):
        A = np.array([[0.0, 2.0]])
        F = np.array([[0.0, 0.0], [0.0, 1.0]])
        assert gd_p(A, F, 1) == 1.0
        assert igd_p(A, F, 1) == 1.5
        assert delta_p(A, F, 1) == 1.5

    def test_p_below_one_rejected(self):
        with pytest.raises(ParameterError):
            gd_p([[0, 0]], [[1, 1]], 0.5)

    @settings(max_examples=80, deadline=None)
    @given(point_sets(k_values=(1, 2, 3, 5), max_points=8), st.data(), st.sampled_from([1.0, 2.0, 3.0]))
    def test_bit_exact_against_double_loop(self, A, data, p):
        R = data.draw(arrays(np.float64, st.tuples(st.integers(1, 8), st.just(A.shape[1])),
                             elements=st.floats(-2, 2, allow_nan=False)))
        assert gd_p(A, R, p) == gd_double_loop(A, R, p)
        assert igd_p(A, R, p) == gd_double_loop(R, A, p)
        assert delta_p(A, R, p) == max(gd_double_loop(A, R, p), gd_double_loop(R, A, p))
        assert gd_p(A, R, p) == igd_p(R, A, p)

    @settings(max_examples=40, deadline=None)
    @given(point_sets(max_points=5), st.data())
    def test_delta_symmetric(self, A, data):
        R = data.draw(arrays(np.float64, st.tuples(st.integers(1, 5), st.just(A.shape[1])),
                             elements=st.floats(0, 1, width=32)))
        assert delta_p(A, R) == delta_p(R, A)


class TestSpecs:
    @pytest.mark.parametrize("name,kind,p", [("GD", "gd", 2.0), ("IGD1", "igd", 1.0), ("D2", "delta", 2.0),
                                             ("GD3", "gd", 3.0)])
    def test_from_name(self, name, kind, p):
        spec = IndicatorSpec.from_name(name)
        assert spec.kind == kind and spec.parameters["p"] == p and spec.orientation == "minimize"

    def test_hv_spec(self):
        assert IndicatorSpec.from_name("HV").orientation == "maximize"

    @pytest.mark.parametrize("name", ["D", "XYZ", "GD0.5"])
    def test_bad_names(self, name):
        with pytest.raises(ParameterError):
            IndicatorSpec.from_name(name)


def _sets():
    rng = np.random.default_rng(5)
    return [ApproximationSet(a, "F1", 3, r, rng.random((6, 3))) for a in ("A", "B") for r in range(3)]


def test_compute_indicators_records():
    refs = {("F1", 3): ReferenceData("F1", 3, np.eye(3), [1.1, 1.1, 1.1])}
    specs = [IndicatorSpec.from_name("HV"), IndicatorSpec.from_name("D2")]
    ds = compute_indicators(_sets(), refs, specs)
    assert len(ds) == 12
    assert ds.indicators() == ["HV", "D2"]
    threaded = compute_indicators(_sets(), refs, specs, workers=3)
    assert [r.value for r in threaded] == [r.value for r in ds]


def test_compute_indicators_mc_branch_reproducible():
    refs = {("F1", 3): ReferenceData("F1", 3, np.eye(3), [1.1, 1.1, 1.1])}
    spec = [IndicatorSpec.from_name("HV")]
    a = compute_indicators(_sets(), refs, spec, hv_exact_max_k=2, mc_samples=20_000, seed=9)
    b = compute_indicators(_sets(), refs, spec, hv_exact_max_k=2, mc_samples=20_000, seed=9, workers=2)
    exact = compute_indicators(_sets(), refs, spec)
    assert [r.value for r in a] == [r.value for r in b]
    for r, e in zip(a, exact):
        assert r.value == pytest.approx(e.value, rel=0.05)


def test_missing_reference():
    with pytest.raises(ReferenceLookupError):
        compute_indicators(_sets(), {}, [IndicatorSpec.from_name("HV")])
