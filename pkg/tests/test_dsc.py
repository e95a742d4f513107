import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from moeastat.dsc import (
    PValueMatrix,
    RankTable,
    bonferroni_threshold,
    dsc_rank,
    ensemble_average,
    ensemble_hierarchical,
    fractional_ranks,
    mean_ranks,
    pvalue_matrix,
    threshold_and_partition,
    threshold_matrix,
)
from moeastat.data import PerformanceCloud
from moeastat.errors import ConsistencyError, ParameterError

ALGS = ("A", "B", "C", "D")


def test_bonferroni():
    assert bonferroni_threshold(0.05, 4) == 0.05 / 6
    assert bonferroni_threshold(0.05, 2) == 0.05
    with pytest.raises(ParameterError):
        bonferroni_threshold(0.05, 1)
    with pytest.raises(ParameterError):
        bonferroni_threshold(1.5, 4)


class TestPValueMatrix:
    def test_validation(self):
        with pytest.raises(ParameterError):
            PValueMatrix(("A", "B"), [[1, 0.2], [0.3, 1]])
        with pytest.raises(ParameterError):
            PValueMatrix(("A", "B"), [[0.9, 0.2], [0.2, 1]])
        with pytest.raises(ParameterError):
            PValueMatrix(("A", "B"), [[1, 0.0], [0.0, 1]])

    def test_lookup(self):
        N = PValueMatrix.from_pairs(ALGS, {("A", "B"): 0.5})
        assert N["B", "A"] == 0.5 and N["A", "C"] == 1.0

    def test_threshold_entries(self):
        t = 0.05 / 6
        N = PValueMatrix.from_pairs(ALGS, {("A", "B"): t, ("A", "C"): t * 0.999})
        T = threshold_matrix(N)
        assert T.entries[0, 1] and not T.entries[0, 2]
        assert np.all(np.diag(T.entries))
        assert np.array_equal(T.entries, T.entries.T)


class TestPartition:
    def test_full_separation(self):
        N = PValueMatrix.from_pairs(ALGS, {(a, b): 0.001 for a in ALGS for b in ALGS if a < b})
        part = threshold_and_partition(N)
        assert part.groups == (("A",), ("B",), ("C",), ("D",))
        assert part.transitive and part.violations == ()

    def test_full_merge(self):
        part = threshold_and_partition(PValueMatrix.from_pairs(ALGS, {}))
        assert part.groups == (ALGS,)
        assert part.transitive

    def test_intransitive_triple(self):
        N = PValueMatrix.from_pairs(("A", "B", "C"), {("A", "B"): 0.5, ("B", "C"): 0.5, ("A", "C"): 0.001})
        part = threshold_and_partition(N)
        assert not part.transitive
        assert part.violations == (("A", "B", "C"),)
        assert part.groups == (("A", "B", "C"),)

    def test_two_pairs(self):
        small = {(a, b): 0.001 for a in ALGS for b in ALGS if a < b}
        small[("B", "C")] = 0.3
        part = threshold_and_partition(PValueMatrix.from_pairs(ALGS, small))
        assert part.groups == (("A",), ("B", "C"), ("D",))

    @given(st.lists(st.floats(1e-6, 1.0), min_size=10, max_size=10))
    def test_partition_covers_all(self, ps):
        algs = ("A", "B", "C", "D", "E")
        pairs = [(a, b) for i, a in enumerate(algs) for b in algs[i + 1:]]
        part = threshold_and_partition(PValueMatrix.from_pairs(algs, dict(zip(pairs, ps))))
        assert sorted(part.algorithms) == sorted(algs)
        assert part.transitive == (part.violations == ())


class TestRanks:
    def test_fractional(self):
        assert fractional_ranks([["A"], ["B", "C"], ["D"]]) == {"A": 1, "B": 2.5, "C": 2.5, "D": 4}

    @given(st.lists(st.integers(1, 4), min_size=1, max_size=6))
    def test_rank_sum(self, sizes):
        names = iter(f"a{i}" for i in range(100))
        groups = [[next(names) for _ in range(s)] for s in sizes]
        m = sum(sizes)
        ranks = fractional_ranks(groups)
        assert sum(ranks.values()) == m * (m + 1) / 2
        assert all(1 <= r <= m for r in ranks.values())

    def test_average_example(self):
        t1 = RankTable(None, dict(zip(ALGS, (1, 2, 3, 4))))
        t2 = RankTable(None, dict(zip(ALGS, (2, 1, 3, 4))))
        assert ensemble_average([t1, t2]).ranks == {"A": 1.5, "B": 1.5, "C": 3, "D": 4}

    def test_hierarchical_unanimous(self):
        tables = [RankTable(None, dict(zip(ALGS, r))) for r in ((1, 2, 3, 4), (1, 3, 2, 4), (1, 4, 2.5, 2.5))]
        assert ensemble_hierarchical(tables).ranks["A"] == 1

    def test_hierarchical_ties_share_rank(self):
        t1 = RankTable(None, dict(zip(ALGS, (1, 2, 3, 4))))
        t2 = RankTable(None, dict(zip(ALGS, (2, 1, 3, 4))))
        ranks = ensemble_hierarchical([t1, t2]).ranks
        assert ranks == {"A": 1.5, "B": 1.5, "C": 3, "D": 4}

    def test_mismatched_tables(self):
        with pytest.raises(ConsistencyError):
            ensemble_average([RankTable(None, {"A": 1, "B": 2}), RankTable(None, {"A": 1, "C": 2})])

    def test_mean_ranks(self):
        tables = [RankTable(("F1", 3), {"A": 1, "B": 2}), RankTable(("F2", 3), {"A": 2, "B": 1})]
        assert mean_ranks(tables) == {"A": 1.5, "B": 1.5}


def test_dsc_rank_orders_by_mean(rng):
    samples = {"low": rng.normal(0, 0.1, 20), "high": rng.normal(5, 0.1, 20), "mid": rng.normal(2, 0.1, 20)}
    table = dsc_rank(samples, permutations=199)
    assert table.ranks == {"low": 3, "high": 1, "mid": 2}


def test_dsc_rank_merges_same_distribution(rng):
    base = rng.normal(0, 1, 20)
    table = dsc_rank({"A": base, "B": base.copy(), "C": base + 10}, permutations=199)
    assert table.ranks == {"A": 2.5, "B": 2.5, "C": 1}


def test_pvalue_matrix_reproducible(rng):
    clouds = [PerformanceCloud(a, rng.normal(i, 1, (10, 2))) for i, a in enumerate("ABC")]
    N1 = pvalue_matrix(clouds, permutations=99, seed=3)
    N2 = pvalue_matrix(clouds, permutations=99, seed=3, workers=2)
    assert np.array_equal(N1.entries, N2.entries)
    assert np.all(N1.entries * 100 == np.round(N1.entries * 100))


def test_pvalue_matrix_error_context():
    clouds = [PerformanceCloud("A", np.ones((3, 1))), PerformanceCloud("B", np.ones((3, 1)))]
    with pytest.raises(Exception, match="A vs B"):
        pvalue_matrix(clouds, "ad2", permutations=9)
