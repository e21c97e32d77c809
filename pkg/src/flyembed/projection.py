"""Sampling of sparse binary projection matrices and the expansion ``y = M x``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    DISTRIBUTIONS,
    DenseActivation,
    DenseDataset,
    Provenance,
    RngStream,
    SparseProjectionMatrix,
    round_half_away,
)
from .errors import DimensionMismatch, InvalidColWeight, InvalidRowWeight

_ROW_CHUNK = 4096


@dataclass(frozen=True)
class ProjectionSpec:
    D: int
    density: float = 0.1
    distribution: str = "binomial"
    seed: int = 0

    def __post_init__(self):
        if self.D < 1:
            raise ValueError("output dimension D must be at least 1")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if not 0.0 < self.density <= 1.0:
            raise ValueError("density must lie in (0, 1]")


def _generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError("rng must be an RngStream or numpy Generator")


def _seed_of(rng) -> int:
    return int(rng.seed) if isinstance(rng, RngStream) else 0


def row_weight(d: int, p: float) -> int:
    """Ones per row under row-wise hypergeometric sampling, ``round(p*d)`` half away from zero."""
    return round_half_away(p * d)


def sample_binomial(D: int, d: int, p: float, rng) -> SparseProjectionMatrix:
    """Each of the ``D*d`` entries is independently one with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    g = _generator(rng)
    pieces, counts = [], []
    for start in range(0, D, _ROW_CHUNK):
        n = min(_ROW_CHUNK, D - start)
        hits = g.random((n, d)) < p
        r, c = np.nonzero(hits)
        pieces.append(c)
        counts.append(np.bincount(r, minlength=n))
    offsets = np.zeros(D + 1, dtype=np.int64)
    if D:
        np.cumsum(np.concatenate(counts), out=offsets[1:])
    cols = np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.int64)
    return SparseProjectionMatrix(D, d, offsets, cols, Provenance("binomial", p, _seed_of(rng)))


def _partial_fisher_yates(g: np.random.Generator, n_sets: int, population: int, s: int) -> np.ndarray:
    """``n_sets`` independent uniform ``s``-subsets of ``range(population)``, sorted per row."""
    perm = np.tile(np.arange(population, dtype=np.int64), (n_sets, 1))
    sets = np.arange(n_sets)
    for t in range(s):
        j = g.integers(t, population, size=n_sets)
        picked = perm[sets, j]
        perm[sets, j] = perm[sets, t]
        perm[sets, t] = picked
    return np.sort(perm[:, :s], axis=1)


def sample_hypergeo_rows(D: int, d: int, p: float, rng) -> SparseProjectionMatrix:
    """Every row holds exactly ``s = round(p*d)`` ones at uniform positions."""
    s = row_weight(d, p)
    if not 1 <= s <= d:
        raise InvalidRowWeight(f"round(p*d) = {s} is outside [1, {d}] for p={p}, d={d}")
    cols = _partial_fisher_yates(_generator(rng), D, d, s)
    offsets = np.arange(D + 1, dtype=np.int64) * s
    return SparseProjectionMatrix(D, d, offsets, cols.ravel(), Provenance("hypergeo_rows", p, _seed_of(rng)))


def sample_hypergeo_cols(D: int, d: int, p: float, rng) -> SparseProjectionMatrix:
    """Every column holds exactly ``round(p*D)`` ones at uniform positions."""
    s = round_half_away(p * D)
    if not 1 <= s <= D:
        raise InvalidColWeight(f"round(p*D) = {s} is outside [1, {D}] for p={p}, D={D}")
    rows = _partial_fisher_yates(_generator(rng), d, D, s)
    cols = np.repeat(np.arange(d, dtype=np.int64), s)
    rows = rows.ravel()
    order = np.lexsort((cols, rows))
    offsets = np.zeros(D + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=D), out=offsets[1:])
    return SparseProjectionMatrix(D, d, offsets, cols[order], Provenance("hypergeo_cols", p, _seed_of(rng)))


_SAMPLERS = {
    "binomial": sample_binomial,
    "hypergeo_rows": sample_hypergeo_rows,
    "hypergeo_cols": sample_hypergeo_cols,
}


def sample_matrix(spec: ProjectionSpec, d: int, label: str = "matrix") -> SparseProjectionMatrix:
    """Draw the matrix described by ``spec`` for ``d``-dimensional inputs."""
    return _SAMPLERS[spec.distribution](spec.D, d, spec.density, RngStream(spec.seed, label))


def project(M: SparseProjectionMatrix, x) -> DenseActivation:
    """``y_i`` = sum of the components of ``x`` selected by row ``i`` of ``M``."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (M.cols,):
        raise DimensionMismatch(f"vector of length {x.shape} does not match {M.cols} matrix columns")
    row_ids = np.repeat(np.arange(M.rows), M.row_weights())
    return DenseActivation(np.bincount(row_ids, weights=x[M.col_indices], minlength=M.rows))


def project_dataset(M: SparseProjectionMatrix, X: DenseDataset) -> list[DenseActivation]:
    return [DenseActivation(row) for row in project_batch(M, X)]


def project_batch(M: SparseProjectionMatrix, X: DenseDataset) -> np.ndarray:
    """All activations at once as an ``N x D`` array (one activation per row)."""
    if X.dims != M.cols:
        raise DimensionMismatch(f"dataset has d={X.dims}, matrix expects {M.cols}")
    return np.ascontiguousarray((M.to_scipy() @ X.values).T)
