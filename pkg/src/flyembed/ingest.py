"""Dataset readers (fvecs, IDX images, GloVe text, dense CSV) and subset selection.

Formats
-------
fvecs
    Repeated records of a little-endian int32 dimension ``d`` followed by
    ``d`` little-endian float32 values. Every record must share ``d``.
IDX images
    Big-endian header: magic ``0x00000803``, image count, rows, cols (all
    uint32), then ``count*rows*cols`` unsigned bytes. Each image is
    flattened row-major into one vector; pixels stay in 0..255.
GloVe text
    One vector per line: a token followed by ``d`` whitespace-separated
    decimals. Tokens are dropped; vector ids are line positions.
csv_dense
    Header-free comma-separated rows, one vector per row.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .core import DenseDataset, RngStream, validate_dataset
from .errors import (
    BadMagic,
    EmptyMatrix,
    InconsistentDim,
    IoError,
    ParseError,
    SubsetTooLarge,
    TruncatedFile,
    TruncatedRecord,
)

PathLike = Union[str, Path]
IDX_IMAGE_MAGIC = 0x00000803
FORMATS = ("fvecs", "idx_images", "glove_text", "csv_dense")
SUBSET_RULES = ("first_n", "seeded_sample")


def _read_bytes(path: PathLike) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise IoError(str(exc)) from exc


def _read_lines(path: PathLike) -> list[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    except UnicodeDecodeError as exc:
        raise ParseError(0, f"not UTF-8 text: {exc}") from exc


def _tag(path: PathLike) -> str:
    return Path(path).name


# ---------------------------------------------------------------------------
# fvecs
# ---------------------------------------------------------------------------


def read_fvecs(path: PathLike) -> DenseDataset:
    blob = _read_bytes(path)
    if not blob:
        raise EmptyMatrix(f"{path}: no vectors")
    if len(blob) < 4:
        raise TruncatedRecord(f"{path}: record header cut short")
    d = struct.unpack_from("<i", blob, 0)[0]
    if d < 1:
        raise InconsistentDim(f"{path}: nonpositive dimension {d} in record 0")
    rec = 4 * (d + 1)
    if len(blob) % rec == 0:
        raw = np.frombuffer(blob, dtype="<i4").reshape(-1, d + 1)
        if np.all(raw[:, 0] == d):
            vals = raw[:, 1:].copy().view("<f4").astype(np.float64)
            return validate_dataset(vals.T, _tag(path))
    _locate_fvecs_error(blob, d, path)
    raise AssertionError("unreachable")


def _locate_fvecs_error(blob: bytes, d: int, path) -> None:
    offset, i = 0, 0
    while offset < len(blob):
        if offset + 4 > len(blob):
            raise TruncatedRecord(f"{path}: header of record {i} cut short")
        di = struct.unpack_from("<i", blob, offset)[0]
        if di != d:
            raise InconsistentDim(f"{path}: record {i} has dimension {di}, expected {d}")
        if offset + 4 * (d + 1) > len(blob):
            raise TruncatedRecord(f"{path}: record {i} cut short")
        offset += 4 * (d + 1)
        i += 1


def write_fvecs(path: PathLike, X: DenseDataset) -> None:
    vecs = X.vectors.astype("<f4")
    out = np.empty((X.count, X.dims + 1), dtype="<f4")
    out[:, 0] = np.array([X.dims], dtype="<i4").view("<f4")[0]
    out[:, 1:] = vecs
    Path(path).write_bytes(out.tobytes())


# ---------------------------------------------------------------------------
# IDX images
# ---------------------------------------------------------------------------


def read_idx_images(path: PathLike) -> DenseDataset:
    blob = _read_bytes(path)
    if len(blob) < 16:
        raise TruncatedFile(f"{path}: header needs 16 bytes, file has {len(blob)}")
    magic, count, rows, cols = struct.unpack_from(">IIII", blob, 0)
    if magic != IDX_IMAGE_MAGIC:
        raise BadMagic(f"{path}: magic 0x{magic:08x}, expected 0x{IDX_IMAGE_MAGIC:08x}")
    need = 16 + count * rows * cols
    if len(blob) < need:
        raise TruncatedFile(f"{path}: expected {need} bytes, file has {len(blob)}")
    pixels = np.frombuffer(blob, dtype=np.uint8, count=count * rows * cols, offset=16)
    return validate_dataset(pixels.reshape(count, rows * cols).T.astype(np.float64), _tag(path))


def write_idx_images(path: PathLike, images) -> None:
    """Write a ``count x rows x cols`` uint8 array as an IDX image file."""
    images = np.asarray(images)
    if images.ndim != 3:
        raise ValueError("images must be count x rows x cols")
    if images.min(initial=0) < 0 or images.max(initial=0) > 255:
        raise ValueError("pixels must lie in 0..255")
    header = struct.pack(">IIII", IDX_IMAGE_MAGIC, *images.shape)
    Path(path).write_bytes(header + images.astype(np.uint8).tobytes())


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------


def _parse_rows(rows, path, skip_token: bool) -> DenseDataset:
    vectors, d = [], None
    for line_no, parts in rows:
        fields = parts[1:] if skip_token else parts
        try:
            vec = [float(f) for f in fields]
        except ValueError as exc:
            raise ParseError(line_no, str(exc)) from exc
        if d is None:
            d = len(vec)
            if d == 0:
                raise InconsistentDim(f"{path}: line {line_no} has no values")
        elif len(vec) != d:
            raise InconsistentDim(f"{path}: line {line_no} has {len(vec)} values, expected {d}")
        vectors.append(vec)
    if not vectors:
        raise EmptyMatrix(f"{path}: no vectors")
    return validate_dataset(np.array(vectors, dtype=np.float64).T, _tag(path))


def read_glove_text(path: PathLike) -> DenseDataset:
    lines = _read_lines(path)
    rows = ((n, line.split()) for n, line in enumerate(lines, start=1) if line.strip())
    return _parse_rows(rows, path, skip_token=True)


def read_csv_dense(path: PathLike) -> DenseDataset:
    lines = _read_lines(path)
    rows = ((n, [f.strip() for f in line.split(",")]) for n, line in enumerate(lines, start=1) if line.strip())
    return _parse_rows(rows, path, skip_token=False)


def write_csv_dense(path: PathLike, X: DenseDataset) -> None:
    Path(path).write_text("".join(",".join(repr(float(v)) for v in row) + "\n" for row in X.vectors))


# ---------------------------------------------------------------------------
# Subsets and source specs
# ---------------------------------------------------------------------------


def take_subset(X: DenseDataset, N: int, rule: str = "first_n", seed: int = 0) -> DenseDataset:
    """Select ``N`` vectors: the first ``N``, or a seeded uniform sample kept in original order."""
    if rule not in SUBSET_RULES:
        raise ValueError(f"unknown subset rule {rule!r}")
    if N < 1:
        raise ValueError("subset size must be at least 1")
    if N > X.count:
        raise SubsetTooLarge(f"requested {N} vectors, dataset has {X.count}")
    if N == X.count:
        return X
    if rule == "first_n":
        cols = np.arange(N)
    else:
        cols = np.sort(RngStream(seed, "subset").generator().choice(X.count, size=N, replace=False))
    return DenseDataset(X.values[:, cols], X.source_tag)


_READERS = {
    "fvecs": read_fvecs,
    "idx_images": read_idx_images,
    "glove_text": read_glove_text,
    "csv_dense": read_csv_dense,
}


@dataclass(frozen=True)
class SourceSpec:
    format: str
    path: str
    subset_size: Optional[int] = 10_000
    subset_rule: str = "first_n"
    seed: int = 0
    name: Optional[str] = None

    def __post_init__(self):
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}; choose from {FORMATS}")
        if self.subset_rule not in SUBSET_RULES:
            raise ValueError(f"unknown subset rule {self.subset_rule!r}")
        if self.subset_size is not None and self.subset_size < 1:
            raise ValueError("subset_size must be at least 1")

    @property
    def label(self) -> str:
        return self.name or Path(self.path).stem


def load_source(spec: SourceSpec) -> DenseDataset:
    """Read the file and cut the working subset (all vectors if ``subset_size`` is None)."""
    X = _READERS[spec.format](spec.path)
    X = DenseDataset(X.values, spec.label)
    if spec.subset_size is None:
        return X
    return take_subset(X, spec.subset_size, spec.subset_rule, spec.seed)
