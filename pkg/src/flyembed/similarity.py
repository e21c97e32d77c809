"""Distances and deterministic exhaustive neighbor ranking.

Rankings sort candidates by a *key* that increases with distance: squared
Euclidean distance, or negated cosine for angles. Equal keys fall back to
ascending id, and the query itself is never a candidate.

Binary embeddings are handled as boolean arrays; their inner products are
small integers, so every key computed from them is exact.
"""
from __future__ import annotations

import math
from enum import Enum
from typing import Sequence

import numpy as np

from .core import BinarySparse, BlockCode, DenseActivation, RealSparse
from .errors import BadId, BadK, DimensionMismatch, ZeroNormVector

_CHUNK_ELEMENTS = 1 << 22


class Measure(str, Enum):
    EUCLIDEAN = "euclidean"
    ANGULAR = "angular"


def _measure(m) -> Measure:
    return m if isinstance(m, Measure) else Measure(m)


# ---------------------------------------------------------------------------
# Pairwise distances between single vectors or embeddings
# ---------------------------------------------------------------------------

_Binaryish = (BinarySparse, BlockCode)


def as_vector(e) -> np.ndarray:
    if isinstance(e, (DenseActivation, RealSparse, BinarySparse, BlockCode)):
        return e.to_dense()
    return np.asarray(e, dtype=np.float64)


def _dim(e) -> int:
    if isinstance(e, (RealSparse, BinarySparse, BlockCode, DenseActivation)):
        return e.dim
    return len(e)


def _sparse_dot_norms(a, b) -> tuple[float, float, float]:
    """Inner product and squared norms computed from supports only."""
    if isinstance(a, BlockCode) and isinstance(b, BlockCode) and a.block_sizes == b.block_sizes:
        return float(np.count_nonzero(a.winners == b.winners)), float(a.num_blocks), float(b.num_blocks)
    if isinstance(a, _Binaryish) and isinstance(b, _Binaryish):
        overlap = len(np.intersect1d(a.indices, b.indices, assume_unique=True))
        return float(overlap), float(len(a.indices)), float(len(b.indices))
    ia, va = _support(a)
    ib, vb = _support(b)
    _, pa, pb = np.intersect1d(ia, ib, assume_unique=True, return_indices=True)
    return float(np.dot(va[pa], vb[pb])), float(np.dot(va, va)), float(np.dot(vb, vb))


def _support(e) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(e, RealSparse):
        return e.indices, e.values
    idx = e.indices
    return idx, np.ones(len(idx))


def _is_sparse(e) -> bool:
    return isinstance(e, (RealSparse, BinarySparse, BlockCode))


def euclidean_dist(a, b) -> float:
    if _dim(a) != _dim(b):
        raise DimensionMismatch(f"dimensions differ: {_dim(a)} vs {_dim(b)}")
    if _is_sparse(a) and _is_sparse(b):
        dot, na, nb = _sparse_dot_norms(a, b)
        return math.sqrt(max(na + nb - 2.0 * dot, 0.0))
    return float(np.linalg.norm(as_vector(a) - as_vector(b)))


def cosine_similarity(a, b) -> float:
    if _dim(a) != _dim(b):
        raise DimensionMismatch(f"dimensions differ: {_dim(a)} vs {_dim(b)}")
    if _is_sparse(a) and _is_sparse(b):
        dot, na, nb = _sparse_dot_norms(a, b)
    else:
        va, vb = as_vector(a), as_vector(b)
        dot, na, nb = float(va @ vb), float(va @ va), float(vb @ vb)
    if na == 0 or nb == 0:
        raise ZeroNormVector()
    return dot / _norm_product(na, nb)


def _norm_product(na, nb):
    """``sqrt(na*nb)``, exact for small integer norms; separate roots only if the product under/overflows."""
    with np.errstate(over="ignore", under="ignore"):
        prod = np.multiply(na, nb)
        safe = np.isfinite(prod) & (prod > 0)
        out = np.where(safe, np.sqrt(np.where(safe, prod, 1.0)), np.sqrt(na) * np.sqrt(nb))
    return float(out) if np.ndim(out) == 0 else out


def angular_dist(a, b) -> float:
    """Angle in ``[0, pi]``; the cosine is clamped to ``[-1, 1]`` first."""
    return math.acos(min(1.0, max(-1.0, cosine_similarity(a, b))))


def distance(a, b, measure) -> float:
    if _measure(measure) is Measure.EUCLIDEAN:
        return euclidean_dist(a, b)
    return angular_dist(a, b)


# ---------------------------------------------------------------------------
# Batched ranking keys
# ---------------------------------------------------------------------------


def as_matrix(vectors) -> np.ndarray:
    """Stack vectors/embeddings into an ``N x dim`` array.

    Binary embeddings become a bool array so that downstream keys are exact.
    """
    if isinstance(vectors, np.ndarray):
        return vectors
    items = list(vectors)
    if not items:
        raise ValueError("no vectors given")
    if all(isinstance(e, _Binaryish) for e in items):
        dims = {e.dim for e in items}
        if len(dims) != 1:
            raise DimensionMismatch("embeddings differ in dimension")
        out = np.zeros((len(items), dims.pop()), dtype=bool)
        for row, e in zip(out, items):
            row[e.indices] = True
        return out
    mats = [as_vector(e) for e in items]
    if len({len(m) for m in mats}) != 1:
        raise DimensionMismatch("vectors differ in dimension")
    return np.vstack(mats)


def pairwise_keys(queries: np.ndarray, base: np.ndarray, measure) -> np.ndarray:
    """``Q x N`` ranking keys between query rows and base rows (smaller = nearer)."""
    measure = _measure(measure)
    if queries.shape[1] != base.shape[1]:
        raise DimensionMismatch(f"query dim {queries.shape[1]} vs base dim {base.shape[1]}")
    binary = queries.dtype == bool and base.dtype == bool
    if binary:
        qf, bf = queries.astype(np.float64), base.astype(np.float64)
        dots = qf @ bf.T
        nq, nb = qf.sum(axis=1), bf.sum(axis=1)
    else:
        qf, bf = np.asarray(queries, dtype=np.float64), np.asarray(base, dtype=np.float64)
        nq, nb = np.einsum("ij,ij->i", qf, qf), np.einsum("ij,ij->i", bf, bf)

    if measure is Measure.EUCLIDEAN:
        if binary:
            return nq[:, None] + nb[None, :] - 2.0 * dots
        return _squared_distances(qf, bf)

    if not binary:
        dots = qf @ bf.T
    zero_q, zero_b = np.flatnonzero(nq == 0), np.flatnonzero(nb == 0)
    if len(zero_b):
        raise ZeroNormVector(int(zero_b[0]))
    if len(zero_q):
        raise ZeroNormVector()
    return -(dots / _norm_product(nq[:, None], nb[None, :]))


def _squared_distances(qf: np.ndarray, bf: np.ndarray) -> np.ndarray:
    # explicit differences: no cancellation, matches a naive double loop closely
    out = np.empty((qf.shape[0], bf.shape[0]))
    step = max(1, _CHUNK_ELEMENTS // max(1, bf.size))
    for start in range(0, qf.shape[0], step):
        diff = qf[start:start + step, None, :] - bf[None, :, :]
        out[start:start + step] = np.einsum("qnd,qnd->qn", diff, diff)
    return out


def ranked_candidates(keys: np.ndarray, query_ids: np.ndarray) -> np.ndarray:
    """Order each key row ascending (ties by id) and drop the query's own id."""
    keys = np.atleast_2d(keys)
    query_ids = np.asarray(query_ids)
    order = np.argsort(keys, axis=1, kind="stable")
    keep = order != query_ids[:, None]
    return order[keep].reshape(len(query_ids), keys.shape[1] - 1)


def rank_neighbors(query_id: int, vectors, measure) -> np.ndarray:
    """All ids except ``query_id``, nearest first; ties by ascending id."""
    V = as_matrix(vectors)
    if not 0 <= query_id < V.shape[0]:
        raise BadId(f"query id {query_id} outside [0, {V.shape[0]})")
    keys = pairwise_keys(V[query_id:query_id + 1], V, measure)
    return ranked_candidates(keys, np.array([query_id]))[0]


def top_k_neighbors(vectors, query_ids: Sequence[int], measure, K: int) -> np.ndarray:
    """``Q x K`` array: the first ``K`` entries of :func:`rank_neighbors` per query."""
    V = as_matrix(vectors)
    query_ids = np.asarray(query_ids, dtype=np.int64)
    N = V.shape[0]
    if not 1 <= K <= N - 1:
        raise BadK(f"K={K} must lie in [1, {N - 1}]")
    if len(query_ids) and (query_ids.min() < 0 or query_ids.max() >= N):
        raise BadId("query id out of range")
    out = np.empty((len(query_ids), K), dtype=np.int64)
    step = max(1, _CHUNK_ELEMENTS // max(1, N * 8))
    for start in range(0, len(query_ids), step):
        q = query_ids[start:start + step]
        keys = pairwise_keys(V[q], V, measure)
        out[start:start + step] = ranked_candidates(keys, q)[:, :K]
    return out

