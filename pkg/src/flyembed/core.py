"""Shared data model: datasets, sparse binary matrices, embeddings, RNG streams.

Conventions used everywhere in the package:

* a dataset stores vectors as columns of a ``d x N`` float64 matrix;
* indices are 0-based;
* every object is immutable after construction (arrays are flagged read-only).
"""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import BadBlockIndex, DimensionMismatch, EmptyMatrix, NonFiniteValue

DISTRIBUTIONS = ("binomial", "hypergeo_rows", "hypergeo_cols")


def _frozen(a, dtype) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


def round_half_away(x: float) -> int:
    """Nearest integer, ties away from zero, evaluated on the exact binary value of ``x``."""
    return int(Decimal(x).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def stable_hash64(*parts) -> int:
    """64-bit BLAKE2b digest of the ``repr`` of ``parts``; stable across runs and platforms."""
    payload = "\x1f".join(repr(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "little")


# ---------------------------------------------------------------------------
# Randomness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RngStream:
    """A named random stream.

    The generator is numpy's counter-based Philox-4x64 bit generator whose
    128-bit key is the BLAKE2b-128 digest of ``"<seed>:<stream_label>"``.
    Equal ``(seed, stream_label)`` pairs give equal draws on every platform.
    """

    seed: int
    stream_label: str = ""

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    @property
    def key(self) -> int:
        payload = f"{int(self.seed)}:{self.stream_label}".encode("utf-8")
        return int.from_bytes(hashlib.blake2b(payload, digest_size=16).digest(), "little")

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of the stream."""
        return np.random.Generator(np.random.Philox(key=self.key))

    def child(self, label: str) -> "RngStream":
        return RngStream(self.seed, f"{self.stream_label}/{label}" if self.stream_label else label)


# ---------------------------------------------------------------------------
# Datasets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DenseDataset:
    """``d x N`` real matrix; column ``j`` is input vector ``j``."""

    values: np.ndarray
    source_tag: str = ""

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, np.float64))
        if self.values.ndim != 2:
            raise DimensionMismatch(f"expected a 2-D matrix, got shape {self.values.shape}")
        if self.values.size == 0:
            raise EmptyMatrix("dataset has no entries")
        bad = np.argwhere(~np.isfinite(self.values))
        if len(bad):
            raise NonFiniteValue(int(bad[0][0]), int(bad[0][1]))

    @property
    def dims(self) -> int:
        return self.values.shape[0]

    @property
    def count(self) -> int:
        return self.values.shape[1]

    @property
    def vectors(self) -> np.ndarray:
        """Row view: ``N x d``, one vector per row."""
        return self.values.T

    def column(self, j: int) -> np.ndarray:
        return self.values[:, j]

    def __eq__(self, other):
        if not isinstance(other, DenseDataset):
            return NotImplemented
        return self.values.shape == other.values.shape and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"DenseDataset(d={self.dims}, N={self.count}, source_tag={self.source_tag!r})"


def validate_dataset(raw, source_tag: str = "") -> DenseDataset:
    """Check a raw ``d x N`` matrix and wrap it as a :class:`DenseDataset`.

    Raises :class:`EmptyMatrix` for matrices without entries and
    :class:`NonFiniteValue` for NaN/Inf entries.
    """
    arr = np.asarray(raw, dtype=np.float64)
    if arr.size == 0:
        raise EmptyMatrix("dataset has no entries")
    return DenseDataset(arr, source_tag)


# ---------------------------------------------------------------------------
# Sparse binary projection matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Provenance:
    distribution: str
    density: float
    seed: int

    def __post_init__(self):
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density must lie in [0, 1], got {self.density}")


SPBM_MAGIC = b"SPBM"
SPBM_VERSION = 1


@dataclass(frozen=True, eq=False)
class SparseProjectionMatrix:
    """Binary ``D x d`` matrix in compressed-row form (positions of the ones only)."""

    rows: int
    cols: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    provenance: Optional[Provenance] = None

    def __post_init__(self):
        object.__setattr__(self, "row_offsets", _frozen(self.row_offsets, np.int64))
        object.__setattr__(self, "col_indices", _frozen(self.col_indices, np.int64))
        ro, ci = self.row_offsets, self.col_indices
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix shape must be nonnegative")
        if ro.shape != (self.rows + 1,) or ro[0] != 0 or ro[-1] != len(ci):
            raise ValueError("row_offsets must have length D+1, start at 0 and end at nnz")
        if np.any(np.diff(ro) < 0):
            raise ValueError("row_offsets must be nondecreasing")
        if len(ci):
            if ci.min() < 0 or ci.max() >= self.cols:
                raise ValueError("column index out of range")
            # strictly increasing inside each row: a drop is only allowed at a row start
            steps = np.diff(ci)
            row_starts = np.zeros(len(ci), dtype=bool)
            row_starts[ro[1:-1][ro[1:-1] < len(ci)]] = True
            if np.any((steps <= 0) & ~row_starts[1:]):
                raise ValueError("column indices must be strictly increasing within a row")

    @classmethod
    def from_dense(cls, dense, provenance: Optional[Provenance] = None) -> "SparseProjectionMatrix":
        mask = np.asarray(dense) != 0
        if mask.ndim != 2:
            raise DimensionMismatch("expected a 2-D matrix")
        r, c = np.nonzero(mask)
        offsets = np.zeros(mask.shape[0] + 1, dtype=np.int64)
        np.cumsum(np.bincount(r, minlength=mask.shape[0]), out=offsets[1:])
        return cls(mask.shape[0], mask.shape[1], offsets, c, provenance)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int,
                  provenance: Optional[Provenance] = None) -> "SparseProjectionMatrix":
        lengths = [len(r) for r in rows]
        offsets = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        flat = np.concatenate([np.sort(np.asarray(r, dtype=np.int64)) for r in rows]) if rows else []
        return cls(len(rows), cols, offsets, flat, provenance)

    @property
    def nnz(self) -> int:
        return len(self.col_indices)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, i: int) -> np.ndarray:
        return self.col_indices[self.row_offsets[i]:self.row_offsets[i + 1]]

    def row_weights(self) -> np.ndarray:
        return np.diff(self.row_offsets)

    def col_weights(self) -> np.ndarray:
        return np.bincount(self.col_indices, minlength=self.cols)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.float64)
        out[np.repeat(np.arange(self.rows), self.row_weights()), self.col_indices] = 1.0
        return out

    def to_scipy(self):
        import scipy.sparse as sp

        data = np.ones(self.nnz, dtype=np.float64)
        return sp.csr_matrix((data, self.col_indices, self.row_offsets), shape=self.shape)

    def head(self, n_rows: int) -> "SparseProjectionMatrix":
        """The first ``n_rows`` rows as a new matrix."""
        if not 0 <= n_rows <= self.rows:
            raise BadBlockIndex(f"cannot take {n_rows} rows of a {self.rows}-row matrix")
        end = self.row_offsets[n_rows]
        return SparseProjectionMatrix(n_rows, self.cols, self.row_offsets[:n_rows + 1],
                                      self.col_indices[:end], self.provenance)

    def to_bytes(self) -> bytes:
        header = SPBM_MAGIC + struct.pack("<HQQQ", SPBM_VERSION, self.rows, self.cols, self.nnz)
        return (header
                + self.row_offsets.astype("<u8").tobytes()
                + self.col_indices.astype("<u4").tobytes())

    @classmethod
    def from_bytes(cls, blob: bytes, provenance: Optional[Provenance] = None) -> "SparseProjectionMatrix":
        head_size = 4 + struct.calcsize("<HQQQ")
        if len(blob) < head_size or blob[:4] != SPBM_MAGIC:
            raise ValueError("not an SPBM snapshot")
        version, rows, cols, nnz = struct.unpack("<HQQQ", blob[4:head_size])
        if version != SPBM_VERSION:
            raise ValueError(f"unsupported SPBM version {version}")
        need = head_size + 8 * (rows + 1) + 4 * nnz
        if len(blob) != need:
            raise ValueError(f"SPBM snapshot should be {need} bytes, got {len(blob)}")
        ro = np.frombuffer(blob, dtype="<u8", count=rows + 1, offset=head_size)
        ci = np.frombuffer(blob, dtype="<u4", count=nnz, offset=head_size + 8 * (rows + 1))
        return cls(int(rows), int(cols), ro.astype(np.int64), ci.astype(np.int64), provenance)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: Union[str, Path], provenance: Optional[Provenance] = None) -> "SparseProjectionMatrix":
        return cls.from_bytes(Path(path).read_bytes(), provenance)

    def __eq__(self, other):
        if not isinstance(other, SparseProjectionMatrix):
            return NotImplemented
        return (self.shape == other.shape
                and np.array_equal(self.row_offsets, other.row_offsets)
                and np.array_equal(self.col_indices, other.col_indices))


def matrix_density(M: SparseProjectionMatrix) -> float:
    """Fraction of entries of ``M`` that are one."""
    total = M.rows * M.cols
    return M.nnz / total if total else 0.0


# ---------------------------------------------------------------------------
# Embeddings
# ---------------------------------------------------------------------------


def _check_sorted_indices(idx: np.ndarray, dim: int) -> None:
    if idx.ndim != 1:
        raise ValueError("indices must be one-dimensional")
    if len(idx) and (idx[0] < 0 or idx[-1] >= dim or np.any(np.diff(idx) <= 0)):
        raise ValueError(f"indices must be strictly increasing and inside [0, {dim})")


class _ArrayEq:
    _array_fields: tuple = ()

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        for name in self.__dataclass_fields__:
            a, b = getattr(self, name), getattr(other, name)
            if name in self._array_fields:
                if not (np.shape(a) == np.shape(b) and np.array_equal(a, b)):
                    return False
            elif a != b:
                return False
        return True

    __hash__ = None


@dataclass(frozen=True, eq=False)
class DenseActivation(_ArrayEq):
    values: np.ndarray
    _array_fields = ("values",)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, np.float64))
        if self.values.ndim != 1:
            raise ValueError("activation must be a vector")

    @property
    def dim(self) -> int:
        return len(self.values)

    def to_dense(self) -> np.ndarray:
        return np.array(self.values)


@dataclass(frozen=True, eq=False)
class RealSparse(_ArrayEq):
    dim: int
    indices: np.ndarray
    values: np.ndarray
    _array_fields = ("indices", "values")

    def __post_init__(self):
        object.__setattr__(self, "indices", _frozen(self.indices, np.int64))
        object.__setattr__(self, "values", _frozen(self.values, np.float64))
        _check_sorted_indices(self.indices, self.dim)
        if self.values.shape != self.indices.shape:
            raise ValueError("indices and values must have equal length")

    @property
    def entries(self) -> list[tuple[int, float]]:
        return [(int(i), float(v)) for i, v in zip(self.indices, self.values)]

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out


@dataclass(frozen=True, eq=False)
class BinarySparse(_ArrayEq):
    dim: int
    indices: np.ndarray
    _array_fields = ("indices",)

    def __post_init__(self):
        object.__setattr__(self, "indices", _frozen(self.indices, np.int64))
        _check_sorted_indices(self.indices, self.dim)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = 1.0
        return out


@dataclass(frozen=True, eq=False)
class BlockCode(_ArrayEq):
    """One active position per contiguous block; ``winners[b]`` is an offset inside block ``b``."""

    block_sizes: tuple
    winners: np.ndarray
    _array_fields = ("winners",)

    def __post_init__(self):
        object.__setattr__(self, "block_sizes", tuple(int(s) for s in self.block_sizes))
        object.__setattr__(self, "winners", _frozen(self.winners, np.int64))
        sizes = np.asarray(self.block_sizes)
        if len(sizes) == 0 or np.any(sizes < 1):
            raise ValueError("block sizes must be positive and nonempty")
        if self.winners.shape != sizes.shape:
            raise ValueError("need exactly one winner per block")
        if np.any(self.winners < 0) or np.any(self.winners >= sizes):
            raise ValueError("winner offset outside its block")

    @property
    def num_blocks(self) -> int:
        return len(self.block_sizes)

    @property
    def dim(self) -> int:
        return sum(self.block_sizes)

    @property
    def block_starts(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.block_sizes)[:-1]]).astype(np.int64)

    @property
    def indices(self) -> np.ndarray:
        """Global positions of the ones."""
        return self.block_starts + self.winners

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = 1.0
        return out


Embedding = Union[DenseActivation, RealSparse, BinarySparse, BlockCode]
