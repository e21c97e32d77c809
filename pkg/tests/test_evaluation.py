import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flyembed.core import DenseDataset
from flyembed.errors import BadK
from flyembed.evaluation import (
    EvalSpec,
    MapReport,
    PipelineConfig,
    average_precision_at_k,
    average_precisions,
    ground_truth_topk,
    map_at_k,
    map_over_realizations,
    sample_queries,
)
from flyembed.preprocess import PreprocessSpec
from flyembed.projection import ProjectionSpec
from flyembed.sparsifier import SparsifierSpec


class TestAveragePrecision:
    def test_perfect(self):
        assert average_precision_at_k([1, 2, 3], [1, 2, 3], 3) == 1.0

    def test_no_overlap(self):
        assert average_precision_at_k([1, 2, 3], [4, 5, 6], 3) == 0.0

    def test_partial(self):
        # hits at ranks 1 and 3: (1/1 + 2/3) / 3
        assert average_precision_at_k([1, 2, 3], [1, 9, 2], 3) == pytest.approx(5 / 9, abs=1e-15)

    @pytest.mark.parametrize("K", range(1, 7))
    def test_any_permutation_of_truth_scores_one(self, K):
        truth = list(range(10, 10 + K))
        for perm in itertools.permutations(truth):
            assert average_precision_at_k(truth, perm, K) == 1.0

    def test_bad_lengths(self):
        with pytest.raises(BadK):
            average_precision_at_k([1, 1], [1, 2], 2)
        with pytest.raises(BadK):
            average_precision_at_k([1, 2], [1], 2)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 8), st.integers(0, 2**32 - 1))
    def test_vectorized_matches_naive(self, K, seed):
        rng = np.random.default_rng(seed)
        truth = np.array([rng.choice(3 * K, size=K, replace=False) for _ in range(5)])
        pred = np.array([rng.choice(3 * K, size=K, replace=False) for _ in range(5)])
        fast = average_precisions(truth, pred)
        for t, p, v in zip(truth, pred, fast):
            assert v == pytest.approx(average_precision_at_k(t, p, K), abs=1e-15)
            assert 0.0 <= v <= 1.0


class TestGroundTruth:
    def test_three_points(self):
        X = DenseDataset([[0.0, 1.0, 5.0]])
        assert ground_truth_topk(X, "euclidean", 1, [0, 1, 2]) == {0: [1], 1: [0], 2: [1]}

    def test_full_permutation(self):
        X = DenseDataset(np.random.default_rng(0).normal(size=(3, 8)))
        gt = ground_truth_topk(X, "angular", 7, range(8))
        for q, ids in gt.items():
            assert sorted(ids + [q]) == list(range(8))

    def test_brute_force_oracle(self):
        V = np.random.default_rng(1).normal(size=(100, 5))
        X = DenseDataset(V.T)
        gt = ground_truth_topk(X, "euclidean", 10, range(100))
        for q in range(100):
            d = []
            for i in range(100):
                if i != q:
                    d.append((math.sqrt(sum((V[q, c] - V[i, c]) ** 2 for c in range(5))), i))
            assert gt[q] == [i for _, i in sorted(d)[:10]]


class TestQueries:
    def test_distinct_sorted_deterministic(self):
        q = sample_queries(100, 30, 5, realization=2)
        assert len(set(q.tolist())) == 30 and q.tolist() == sorted(q.tolist())
        np.testing.assert_array_equal(q, sample_queries(100, 30, 5, realization=2))
        assert not np.array_equal(q, sample_queries(100, 30, 5, realization=3))

    def test_all(self):
        assert sample_queries(7, 7, 0).tolist() == list(range(7))


class TestMapAtK:
    def test_identity_embedding(self):
        X = DenseDataset(np.random.default_rng(2).normal(size=(6, 50)))
        for K in (1, 5, 49):
            for m in ("euclidean", "angular"):
                spec = EvalSpec(K=K, num_queries=20, gt_measure=m, emb_measure=m)
                assert map_at_k(X, X.vectors, spec).mean == 1.0

    def test_range_checks(self):
        X = DenseDataset(np.ones((2, 5)))
        with pytest.raises(BadK):
            map_at_k(X, X.vectors, EvalSpec(K=5, num_queries=2))
        with pytest.raises(ValueError):
            map_at_k(X, X.vectors, EvalSpec(K=2, num_queries=6))

    @pytest.mark.parametrize("seed", range(5))
    def test_permutation_invariance(self, seed):
        rng = np.random.default_rng(seed)
        V = rng.normal(size=(8, 60))
        # continuous embeddings: no tied keys, so id-based tie breaks never fire
        E = rng.normal(size=(60, 20))
        spec = EvalSpec(K=7, num_queries=60)
        base = map_at_k(DenseDataset(V), E, spec).mean
        perm = rng.permutation(60)
        permuted = map_at_k(DenseDataset(V[:, perm]), E[perm], spec).mean
        assert permuted == pytest.approx(base, abs=1e-12)

    def test_mapreport_bounds(self):
        with pytest.raises(ValueError):
            MapReport([1.2])
        r = MapReport([0.25])
        assert r.mean == 0.25 and r.std_error == 0.0


def _config(R=3):
    X = DenseDataset(np.random.default_rng(3).normal(size=(12, 120)))
    return PipelineConfig(
        dataset=X,
        projection=ProjectionSpec(D=96, density=0.2, seed=50),
        sparsifier=SparsifierSpec("kwta_binary", 6),
        eval=EvalSpec(K=10, num_queries=40, num_realizations=R, query_seed=9),
        preprocess=PreprocessSpec("original"),
    )


class TestRealizations:
    def test_single_realization(self):
        rep = map_over_realizations(_config(1))
        assert len(rep.per_realization) == 1 and rep.mean == rep.per_realization[0]
        assert rep.fingerprint["seeds"] == [50]

    def test_deterministic(self):
        a, b = map_over_realizations(_config()), map_over_realizations(_config())
        assert a.per_realization == b.per_realization
        assert a.fingerprint["seeds"] == [50, 51, 52]

    def test_mean_order_independent(self):
        vals = map_over_realizations(_config(4)).per_realization
        assert MapReport(vals[::-1]).mean == pytest.approx(MapReport(vals).mean, abs=1e-15)

    def test_identity_pipeline(self):
        cfg = _config()
        cfg = PipelineConfig(cfg.dataset, cfg.projection, None, cfg.eval, cfg.preprocess)
        assert map_over_realizations(cfg).per_realization == [1.0, 1.0, 1.0]
