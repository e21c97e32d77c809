"""Sparsifying nonlinearities, storage-cost formulas and block-prefix truncation.

Ties are always resolved toward the lowest index. Blocks are contiguous;
when ``k`` does not divide ``D`` the first ``D mod k`` blocks get one extra
component.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .core import BinarySparse, BlockCode, DenseActivation, RealSparse
from .errors import BadBlockIndex, BadK, ZeroNormVector

KINDS = ("kwta_real", "kwta_binary", "kwta_real_l2", "block_binary")


@dataclass(frozen=True)
class SparsifierSpec:
    kind: str
    k: int
    matching_bits: bool = False
    tie_rule: str = "lowest-index-wins"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown sparsifier {self.kind!r}; choose from {KINDS}")
        if self.k < 1:
            raise BadK(f"k must be at least 1, got {self.k}")
        if self.matching_bits and self.kind != "block_binary":
            raise ValueError("matching_bits only applies to block_binary")

    def active_count(self, D: int) -> int:
        """Number of active components (blocks for block codes) at output dimension ``D``."""
        if self.matching_bits:
            return matching_blocks(self.k, D).k_prime
        return self.k


def _values(y) -> np.ndarray:
    if isinstance(y, DenseActivation):
        return y.values
    return np.asarray(y, dtype=np.float64)


def _check_k(k: int, D: int) -> None:
    if not 1 <= k <= D:
        raise BadK(f"k={k} must lie in [1, {D}]")


# ---------------------------------------------------------------------------
# kWTA
# ---------------------------------------------------------------------------


def kwta_mask(Y: np.ndarray, k: int) -> np.ndarray:
    """Boolean mask of the ``k`` winners in each row of ``Y``.

    Exact selection in O(D) per row: everything strictly above the k-th
    largest value wins, and the remaining slots go to the lowest-index
    entries equal to it.
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    _check_k(k, Y.shape[1])
    thr = -np.partition(-Y, k - 1, axis=1)[:, k - 1:k]
    above = Y > thr
    at = Y == thr
    room = k - above.sum(axis=1, keepdims=True)
    return above | (at & (np.cumsum(at, axis=1) <= room))


def kwta(y, k: int) -> RealSparse:
    """Keep the ``k`` largest entries of ``y``, zero the rest."""
    v = _values(y)
    idx = np.flatnonzero(kwta_mask(v, k)[0])
    return RealSparse(len(v), idx, v[idx])


def kwta_binary(y, k: int) -> BinarySparse:
    """Positions of the ``k`` winners; always exactly ``k`` of them."""
    v = _values(y)
    return BinarySparse(len(v), np.flatnonzero(kwta_mask(v, k)[0]))


def kwta_l2(y, k: int) -> RealSparse:
    z = kwta(y, k)
    norm = np.linalg.norm(z.values)
    if norm == 0:
        raise ZeroNormVector()
    return RealSparse(z.dim, z.indices, z.values / norm)


# ---------------------------------------------------------------------------
# Block codes
# ---------------------------------------------------------------------------


def block_partition(D: int, k: int) -> tuple[int, ...]:
    _check_k(k, D)
    base, extra = divmod(D, k)
    return tuple([base + 1] * extra + [base] * (k - extra))


def block_winner_offsets(Y: np.ndarray, k: int) -> np.ndarray:
    """``N x k`` winner offsets (first maximum inside each block) for each row of ``Y``."""
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    N, D = Y.shape
    _check_k(k, D)
    base, extra = divmod(D, k)
    split = extra * (base + 1)
    parts = []
    if extra:
        parts.append(Y[:, :split].reshape(N, extra, base + 1).argmax(axis=2))
    if k - extra:
        parts.append(Y[:, split:].reshape(N, k - extra, base).argmax(axis=2))
    return np.concatenate(parts, axis=1)


def block_mask(Y: np.ndarray, k: int) -> np.ndarray:
    Y = np.atleast_2d(Y)
    offsets = block_winner_offsets(Y, k)
    starts = np.concatenate([[0], np.cumsum(block_partition(Y.shape[1], k))[:-1]])
    mask = np.zeros(Y.shape, dtype=bool)
    np.put_along_axis(mask, offsets + starts, True, axis=1)
    return mask


def block_winners(y, k: int) -> BlockCode:
    v = _values(y)
    return BlockCode(block_partition(len(v), k), block_winner_offsets(v, k)[0])


def truncate_blocks(e, i: int, block_sizes: Optional[Sequence[int]] = None):
    """Keep the first ``i`` blocks of an embedding.

    A :class:`BlockCode` keeps its first ``i`` winners. A
    :class:`BinarySparse` needs ``block_sizes`` and keeps only the ones that
    fall inside the first ``i`` blocks, so it may end up with fewer than
    ``i`` ones.
    """
    if isinstance(e, BlockCode):
        if not 1 <= i <= e.num_blocks:
            raise BadBlockIndex(f"i={i} must lie in [1, {e.num_blocks}]")
        return BlockCode(e.block_sizes[:i], e.winners[:i])
    if isinstance(e, BinarySparse):
        if block_sizes is None:
            raise BadBlockIndex("a block partition is required to truncate a BinarySparse embedding")
        if sum(block_sizes) != e.dim:
            raise BadBlockIndex("block partition does not cover the embedding dimension")
        if not 1 <= i <= len(block_sizes):
            raise BadBlockIndex(f"i={i} must lie in [1, {len(block_sizes)}]")
        dim = int(sum(block_sizes[:i]))
        return BinarySparse(dim, e.indices[e.indices < dim])
    raise TypeError(f"cannot truncate {type(e).__name__}")


# ---------------------------------------------------------------------------
# Batch dispatch used by the pipeline
# ---------------------------------------------------------------------------


def sparsify_batch(Y: np.ndarray, kind: str, k: int) -> np.ndarray:
    """Apply a sparsifier to every row of ``Y``.

    Binary kinds return a bool array, real kinds a float64 array; both have
    the shape of ``Y``.
    """
    if kind == "kwta_binary":
        return kwta_mask(Y, k)
    if kind == "block_binary":
        return block_mask(Y, k)
    if kind in ("kwta_real", "kwta_real_l2"):
        Z = np.where(kwta_mask(Y, k), Y, 0.0)
        if kind == "kwta_real_l2":
            norms = np.linalg.norm(Z, axis=1, keepdims=True)
            zero = np.flatnonzero(norms[:, 0] == 0)
            if len(zero):
                raise ZeroNormVector(int(zero[0]))
            Z = Z / norms
        return Z
    raise ValueError(f"unknown sparsifier {kind!r}")


# ---------------------------------------------------------------------------
# Storage cost and entropy
# ---------------------------------------------------------------------------


def storage_bits_kwta(k: int, D: int) -> float:
    """Bits to store ``k`` free positions among ``D``: ``k*log2(D)``."""
    _check_k(k, D)
    return k * math.log2(D)


def storage_bits_block(k: int, D: int) -> float:
    """Bits to store one offset per block: ``k*log2(D/k)``."""
    _check_k(k, D)
    return k * math.log2(D / k)


def entropy_kwta(D: int, k: int) -> float:
    """``log2 C(D, k)`` through log-gamma."""
    _check_k(k, D)
    return (math.lgamma(D + 1) - math.lgamma(k + 1) - math.lgamma(D - k + 1)) / math.log(2)


def entropy_block(D: int, k: int) -> float:
    _check_k(k, D)
    return k * math.log2(D / k)


class MatchingBlocks(NamedTuple):
    k_prime: int
    saturated: bool


def _cost_cmp(kp: int, D: int, k: int) -> int:
    """Sign of ``kp*log2(D/kp) - k*log2(D)``, decided exactly near equality."""
    lhs = kp * math.log2(D / kp)
    rhs = k * math.log2(D)
    if abs(lhs - rhs) > 1e-9 * max(1.0, abs(rhs)):
        return -1 if lhs < rhs else 1
    # (D/kp)**kp vs D**k  <=>  D**kp vs D**k * kp**kp
    a, b = D ** kp, D ** k * kp ** kp
    return (a > b) - (a < b)


def matching_blocks(k: int, D: int) -> MatchingBlocks:
    """Block count whose storage cost matches binary kWTA with ``k`` winners.

    Returns the largest ``k'`` on the increasing branch ``k' <= floor(D/e)``
    with ``k'*log2(D/k') <= k*log2(D)``. When even the branch maximum costs
    less than the target the equation has no root; the result is then
    ``max(floor(D/e), k)`` with ``saturated=True``.
    """
    _check_k(k, D)
    top = max(1, int(D / math.e))
    c = _cost_cmp(top, D, k)
    if c < 0:
        return MatchingBlocks(max(top, k), True)
    if c == 0:
        return MatchingBlocks(top, False)
    # cost(1) = log2(D) never exceeds the target, so lo stays feasible
    lo, hi = 1, top - 1
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _cost_cmp(mid, D, k) <= 0:
            lo = mid
        else:
            hi = mid - 1
    return MatchingBlocks(lo, False)
