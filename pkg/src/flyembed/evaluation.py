"""MAP@K evaluation of embeddings against rankings of the (preprocessed) inputs."""
from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import DenseDataset, RngStream
from .errors import BadK
from .preprocess import PreprocessSpec, apply_preprocess
from .projection import ProjectionSpec, project_batch, sample_matrix
from .similarity import Measure, as_matrix, top_k_neighbors
from .sparsifier import SparsifierSpec, sparsify_batch

SEED_MOD = 2**64


@dataclass(frozen=True)
class EvalSpec:
    K: int = 200
    num_queries: int = 1000
    num_realizations: int = 10
    gt_measure: Measure = Measure.EUCLIDEAN
    emb_measure: Measure = Measure.EUCLIDEAN
    query_seed: Optional[int] = 0

    def __post_init__(self):
        object.__setattr__(self, "gt_measure", Measure(self.gt_measure))
        object.__setattr__(self, "emb_measure", Measure(self.emb_measure))
        if self.K < 1 or self.num_queries < 1 or self.num_realizations < 1:
            raise ValueError("K, num_queries and num_realizations must be positive")

    def check(self, N: int) -> None:
        if not 1 <= self.K <= N - 1:
            raise BadK(f"K={self.K} must lie in [1, {N - 1}] for N={N}")
        if not 1 <= self.num_queries <= N:
            raise ValueError(f"num_queries={self.num_queries} must lie in [1, {N}]")


@dataclass
class MapReport:
    per_realization: list
    fingerprint: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.per_realization, dtype=np.float64)
        if np.any((vals < 0) | (vals > 1)):
            raise ValueError("MAP values must lie in [0, 1]")

    @property
    def mean(self) -> float:
        return float(np.mean(self.per_realization))

    @property
    def std_error(self) -> float:
        vals = np.asarray(self.per_realization)
        if len(vals) < 2:
            return 0.0
        return float(vals.std(ddof=1) / np.sqrt(len(vals)))


def average_precision_at_k(truth: Sequence[int], predicted: Sequence[int], K: int) -> float:
    """AP@K normalized by ``K``.

    ``AP = (1/K) * sum_i rel(i) * precision@i`` over the first ``K``
    predictions, where ``rel(i)`` says whether prediction ``i`` is in the
    truth set (which has exactly ``K`` members).
    """
    truth_set = set(int(t) for t in truth)
    if K < 1 or len(truth_set) != K or len(truth) != K:
        raise BadK(f"truth must hold exactly K={K} distinct ids")
    if len(predicted) < K:
        raise BadK(f"need at least K={K} predictions, got {len(predicted)}")
    hits, total = 0, 0.0
    for i, p in enumerate(predicted[:K], start=1):
        if int(p) in truth_set:
            hits += 1
            total += hits / i
    return total / K


def average_precisions(truth: np.ndarray, predicted: np.ndarray) -> np.ndarray:
    """Row-wise AP@K for ``Q x K`` truth and prediction arrays."""
    truth = np.asarray(truth)
    predicted = np.asarray(predicted)
    Q, K = truth.shape
    out = np.empty(Q)
    ranks = np.arange(1, K + 1)
    step = max(1, (1 << 22) // (K * K))
    for s in range(0, Q, step):
        t, p = truth[s:s + step], predicted[s:s + step, :K]
        rel = (p[:, :, None] == t[:, None, :]).any(axis=2)
        prec = np.cumsum(rel, axis=1) / ranks
        out[s:s + step] = (prec * rel).sum(axis=1) / K
    return out


def sample_queries(N: int, Q: int, query_seed: int, realization: int = 0) -> np.ndarray:
    """``Q`` distinct query ids, drawn per realization, returned in ascending order."""
    if not 1 <= Q <= N:
        raise ValueError(f"cannot draw {Q} queries from {N} vectors")
    g = RngStream(query_seed, f"queries/{realization}").generator()
    return np.sort(g.choice(N, size=Q, replace=False))


def ground_truth_topk(X: DenseDataset, measure, K: int, query_ids) -> dict:
    """Map each query id to its ``K`` nearest other vectors, nearest first."""
    query_ids = np.asarray(query_ids, dtype=np.int64)
    top = top_k_neighbors(X.vectors, query_ids, measure, K)
    return {int(q): [int(i) for i in row] for q, row in zip(query_ids, top)}


def map_from_neighbors(truth: np.ndarray, predicted: np.ndarray) -> float:
    return float(np.mean(average_precisions(truth, predicted)))


def map_at_k(X_pre: DenseDataset, embeddings, spec: EvalSpec, realization: int = 0,
             truth: Optional[np.ndarray] = None) -> MapReport:
    """MAP@K for one set of embeddings aligned index-wise with the columns of ``X_pre``.

    ``truth`` may carry precomputed ground-truth neighbors for the query set
    of this realization.
    """
    start = time.perf_counter()
    E = as_matrix(embeddings)
    N = X_pre.count
    if E.shape[0] != N:
        raise ValueError(f"{E.shape[0]} embeddings for {N} input vectors")
    spec.check(N)
    qids = sample_queries(N, spec.num_queries, spec.query_seed or 0, realization)
    if truth is None:
        truth = top_k_neighbors(X_pre.vectors, qids, spec.gt_measure, spec.K)
    predicted = top_k_neighbors(E, qids, spec.emb_measure, spec.K)
    value = map_from_neighbors(truth, predicted)
    fp = {"eval": _plain(asdict(spec)), "realization": realization, "num_queries": len(qids)}
    return MapReport([value], fp, time.perf_counter() - start)


@dataclass(frozen=True)
class PipelineConfig:
    """One complete embedding pipeline. ``sparsifier=None`` uses the preprocessed inputs as embeddings."""

    dataset: DenseDataset
    projection: ProjectionSpec
    sparsifier: Optional[SparsifierSpec]
    eval: EvalSpec = EvalSpec()
    preprocess: PreprocessSpec = PreprocessSpec()


def embed_batch(M, X_pre: DenseDataset, sparsifier: Optional[SparsifierSpec]) -> np.ndarray:
    """Embeddings of all columns of ``X_pre`` as an ``N x D`` array (bool for binary codes)."""
    if sparsifier is None:
        return X_pre.vectors
    Y = project_batch(M, X_pre)
    return sparsify_batch(Y, sparsifier.kind, sparsifier.active_count(M.rows))


def map_over_realizations(config: PipelineConfig, R: Optional[int] = None) -> MapReport:
    """Run the pipeline with matrix seeds ``seed+0 .. seed+R-1`` and collect one MAP per run."""
    start = time.perf_counter()
    R = config.eval.num_realizations if R is None else R
    if R < 1:
        raise ValueError("R must be at least 1")
    X_pre = apply_preprocess(config.dataset, config.preprocess)
    values, seeds = [], []
    for r in range(R):
        seed = (config.projection.seed + r) % SEED_MOD
        M = None
        if config.sparsifier is not None:
            M = sample_matrix(replace(config.projection, seed=seed), X_pre.dims)
        E = embed_batch(M, X_pre, config.sparsifier)
        values.append(map_at_k(X_pre, E, config.eval, realization=r).per_realization[0])
        seeds.append(seed)
    fp = {
        "dataset": config.dataset.source_tag,
        "preprocess": _plain(asdict(config.preprocess)),
        "projection": _plain(asdict(config.projection)),
        "sparsifier": None if config.sparsifier is None else _plain(asdict(config.sparsifier)),
        "eval": _plain(asdict(config.eval)),
        "seeds": seeds,
    }
    return MapReport(values, fp, time.perf_counter() - start)


def _plain(d: dict) -> dict:
    return {k: (v.value if isinstance(v, Measure) else v) for k, v in d.items()}
