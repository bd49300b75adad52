import numpy as np
import pytest

from slsid import (
    Assignment,
    Dataset,
    Limits,
    SLModel,
    check_cluster_pe,
    check_distinct_params,
    check_genericity_sufficient,
    check_no_separating_regressor,
    check_partition_condition,
    min_samples_bako,
    min_samples_ours,
    min_samples_table,
    min_samples_vidal,
    pe_report,
)
from slsid import fixtures
from slsid.partitions import gram_nonsingular
from slsid.pe import CERTIFIED, REFUTED, UNDECIDED


class TestSampleCounts:
    @pytest.mark.parametrize(
        "n,S,expected", [(3, 2, 8), (10, 7, 259), (4, 1, 4), (1, 1, 1)]
    )
    def test_ours(self, n, S, expected):
        assert min_samples_ours(n, S) == expected

    @pytest.mark.parametrize("n,S,expected", [(3, 2, 12), (10, 10, 1000), (6, 1, 6)])
    def test_bako(self, n, S, expected):
        assert min_samples_bako(n, S) == expected

    @pytest.mark.parametrize(
        "n,S,expected", [(3, 2, 9), (10, 10, 184755), (7, 1, 7), (1, 4, 4)]
    )
    def test_vidal(self, n, S, expected):
        assert min_samples_vidal(n, S) == expected

    def test_ours_always_integer(self):
        for n in range(1, 30):
            for S in range(1, 30):
                assert ((n - 1) * S * S + (n + 1) * S) % 2 == 0

    def test_vidal_exact_large(self):
        # must not lose precision to floating binomials
        assert min_samples_vidal(30, 30) == 118264581564861424 - 1

    def test_table_cells(self):
        table = min_samples_table(10, 7)
        cell = lambda key: (table[key].ours, table[key].bako, table[key].vidal)
        assert cell((6, 5)) == (80, 150, 461)
        assert cell((1, 4)) == (4, 16, 4)
        assert cell((1, 1)) == (1, 1, 1)

    def test_ours_never_exceeds_bako(self):
        # equality exactly when S == 1 (a single subsystem needs n samples
        # under both conditions)
        for n in range(1, 13):
            for S in range(1, 13):
                ours, bako = min_samples_ours(n, S), min_samples_bako(n, S)
                assert ours <= bako
                assert (ours == bako) == (S == 1)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            min_samples_ours(0, 2)
        with pytest.raises(ValueError):
            min_samples_table(3, 0)


class TestDistinctParams:
    def test_example_one(self):
        model, _ = fixtures.example_one()
        assert check_distinct_params(model)

    def test_duplicate_rejected(self):
        assert not check_distinct_params(SLModel(np.array([[1.0, 2.0], [1.0, 2.0]])))

    def test_single_subsystem_vacuous(self):
        assert check_distinct_params(SLModel(np.array([[0.0, 0.0]])))


class TestSeparatingRegressor:
    def test_example_one_passes(self):
        model, data = fixtures.example_one()
        ok, violations = check_no_separating_regressor(data, model)
        assert ok and violations == []

    def test_orthogonal_regressor_flagged(self):
        model, data = fixtures.example_one()
        bad = Dataset(
            np.vstack([data.regressors, [1.0, 1.0]]),  # (1,1) . (3,-3) == 0
            np.append(data.outputs, 2.0),
        )
        ok, violations = check_no_separating_regressor(bad, model)
        assert not ok
        assert violations == [(5, 1, 2)]

    def test_single_subsystem_vacuous(self):
        data = Dataset(np.ones((2, 2)), np.ones(2))
        ok, violations = check_no_separating_regressor(data, SLModel(np.ones((1, 2))))
        assert ok and violations == []


class TestClusterPE:
    def test_identity_cluster(self):
        _, data = fixtures.example_one()
        assert check_cluster_pe(data, data.truth, 1)

    def test_single_sample_cluster(self):
        data = Dataset(np.array([[1.0, 2.0], [1.0, 0.0]]), np.zeros(2))
        a = Assignment(np.array([1, 2]))
        assert not check_cluster_pe(data, a, 1)

    def test_empty_cluster(self):
        data = Dataset(np.eye(2), np.zeros(2))
        assert not check_cluster_pe(data, Assignment(np.array([1, 1])), 2)


class TestPartitionCondition:
    def test_example_one_refuted_with_singleton_witness(self):
        _, data = fixtures.example_one()
        check = check_partition_condition(data, data.truth, 2)
        assert check.status == REFUTED
        assert check.witness is not None
        assert all(len(b) == 1 for b in check.witness.blocks)
        # the witness must itself verify: every block rank-deficient
        for block in check.witness.blocks:
            rows = data.regressors[[k - 1 for k in block]]
            assert not gram_nonsingular(rows, data.n)

    def test_example_one_augmented_certified(self):
        _, data = fixtures.example_one_augmented()
        check = check_partition_condition(data, data.truth, 2)
        assert check.status == CERTIFIED
        assert check.permutation == (1, 2)

    def test_single_subsystem_reduces_to_whole_gram(self):
        data = Dataset(np.eye(2), np.zeros(2))
        a = Assignment(np.array([1, 1]))
        assert check_partition_condition(data, a, 1).status == CERTIFIED
        thin = Dataset(np.array([[1.0, 0.0], [2.0, 0.0]]), np.zeros(2))
        assert check_partition_condition(thin, a, 1).status == REFUTED

    def test_certified_permutation_reverifies(self):
        _, data = fixtures.example_one_augmented()
        check = check_partition_condition(data, data.truth, 2)
        f = check.min_deficient_blocks
        S = 2
        for stage, cluster in enumerate(check.permutation, start=1):
            budget = S - stage + 1
            assert f[cluster] is None or f[cluster] > budget

    def test_oversized_cluster_undecided(self):
        rng = np.random.default_rng(0)
        data = Dataset(rng.normal(size=(20, 2)), np.zeros(20))
        a = Assignment(np.ones(20, int))
        check = check_partition_condition(data, a, 1, limits=Limits(max_block_size=10))
        assert check.status == UNDECIDED

    def test_monotone_under_appending(self):
        # once certified, appending a sample to any cluster preserves the
        # certificate (a deficient split of the grown cluster restricts to
        # one of the original)
        rng = np.random.default_rng(42)
        checked = 0
        while checked < 20:
            n, S = 2, 2
            N = int(rng.integers(2 * n + 1, 9))
            X = rng.uniform(-5, 5, size=(N, n))
            labels = rng.integers(1, S + 1, size=N)
            data = Dataset(X, np.zeros(N), Assignment(labels))
            base = check_partition_condition(data, data.truth, S)
            if base.status != CERTIFIED:
                continue
            checked += 1
            x_new = rng.uniform(-5, 5, size=n)
            for target in range(1, S + 1):
                grown = Dataset(
                    np.vstack([X, x_new]),
                    np.zeros(N + 1),
                    Assignment(np.append(labels, target)),
                )
                assert (
                    check_partition_condition(grown, grown.truth, S).status == CERTIFIED
                )


class TestGenericity:
    def test_example_two_sizes_meet_bound_but_triple_degenerates(self):
        # sizes (5, 3) meet n + (n-1)(S-s) = (5, 3), but x4 = 2 x1 + x2
        # breaks the every-n-subset condition
        _, data = fixtures.example_two()
        sizes = sorted(data.truth.cluster_sizes(2), reverse=True)
        n, S = 3, 2
        assert all(
            size >= n + (n - 1) * (S - s) for s, size in enumerate(sizes, start=1)
        )
        assert check_genericity_sufficient(data, data.truth, 2) is False

    def test_duplicated_regressor_fails(self):
        X = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 2.0]])
        data = Dataset(X, np.zeros(5), Assignment(np.array([1, 1, 1, 1, 1])))
        assert check_genericity_sufficient(data, data.truth, 1) is False

    def test_full_rank_square_single_cluster(self):
        data = Dataset(np.eye(3), np.zeros(3), Assignment(np.array([1, 1, 1])))
        assert check_genericity_sufficient(data, data.truth, 1) is True

    def test_augmented_example_one_passes(self):
        _, data = fixtures.example_one_augmented()
        assert check_genericity_sufficient(data, data.truth, 2) is True

    def test_guard_returns_none(self):
        rng = np.random.default_rng(1)
        data = Dataset(
            rng.normal(size=(30, 3)), np.zeros(30), Assignment(np.ones(30, int))
        )
        result = check_genericity_sufficient(
            data, data.truth, 1, limits=Limits(max_genericity_subsets=10)
        )
        assert result is None


class TestPEReport:
    def test_example_one_not_certified(self):
        model, data = fixtures.example_one()
        report = pe_report(data, model)
        assert not report.certified
        assert report.cond1_distinct_params
        assert report.cond2_no_separating_regressor
        assert report.cond3_partition.status == REFUTED
        assert report.sizes == (2, 2)

    def test_example_one_augmented_certified(self):
        model, data = fixtures.example_one_augmented()
        report = pe_report(data, model)
        assert report.certified
        assert report.sizes == (3, 2)
        assert report.genericity_sufficient is True

    def test_example_two_conditions(self):
        # the dependent triple {1,2,4} defeats the partition condition even
        # though the instance is uniquely identifiable (see the oracle tests)
        model, data = fixtures.example_two()
        report = pe_report(data, model)
        assert report.cond1_distinct_params
        assert report.cond2_no_separating_regressor
        assert all(report.cluster_pe)
        assert report.cond3_partition.status == REFUTED
        assert set(map(frozenset, report.cond3_partition.witness.blocks)) == {
            frozenset({1, 2, 4}),
            frozenset({3, 5}),
        }

    def test_report_serializes(self):
        import json

        model, data = fixtures.example_one()
        payload = pe_report(data, model).to_dict()
        assert json.loads(json.dumps(payload)) == payload

    def test_requires_labels(self):
        model, data = fixtures.example_one()
        bare = Dataset(data.regressors, data.outputs)
        with pytest.raises(ValueError):
            pe_report(bare, model)
