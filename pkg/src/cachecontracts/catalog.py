"""Content catalogs, Zipf popularity, and the storage-to-placement policy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

POPULARITY_SUM_TOL = 1e-9


@dataclass(frozen=True)
class FileCatalog:
    """A CP's files with sizes (bits) and a popularity distribution."""

    cp: int
    sizes: np.ndarray
    popularity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "sizes", np.asarray(self.sizes, dtype=float))
        object.__setattr__(self, "popularity", np.asarray(self.popularity, dtype=float))
        problems = self.violations()
        if problems:
            raise ValueError("invalid catalog: " + "; ".join(problems))

    @property
    def file_count(self) -> int:
        return len(self.sizes)

    def violations(self) -> list[str]:
        problems = []
        if self.file_count < 1:
            problems.append("catalog must contain at least one file")
        if self.sizes.shape != self.popularity.shape:
            problems.append("sizes and popularity must have matching length")
            return problems
        if np.any(self.sizes <= 0):
            problems.append("file sizes must be positive")
        if np.any(self.popularity < 0):
            problems.append("popularity entries must be nonnegative")
        if self.file_count and abs(float(self.popularity.sum()) - 1.0) > POPULARITY_SUM_TOL:
            problems.append("popularity must sum to 1")
        return problems

    @classmethod
    def uniform_sizes(cls, cp: int, file_count: int, file_size: float, alpha: float) -> "FileCatalog":
        return cls(
            cp=cp,
            sizes=np.full(file_count, float(file_size)),
            popularity=zipf_popularity(file_count, alpha),
        )


@dataclass(frozen=True)
class CachePlacement:
    """Binary cache indicator per (SBS, file) for one CP."""

    cp: int
    beta: np.ndarray

    def __post_init__(self):
        beta = np.asarray(self.beta)
        if beta.ndim != 2:
            raise ValueError("beta must be a 2-D [sbs x file] matrix")
        if not np.isin(beta, (0, 1)).all():
            raise ValueError("beta entries must be 0 or 1")
        object.__setattr__(self, "beta", beta.astype(np.int8))

    @property
    def sbs_count(self) -> int:
        return self.beta.shape[0]

    @property
    def file_count(self) -> int:
        return self.beta.shape[1]

    def cached_bits(self, sizes: np.ndarray) -> np.ndarray:
        """Cached bytes per SBS, in bits."""
        return self.beta @ np.asarray(sizes, dtype=float)


def zipf_popularity(file_count: int, alpha: float) -> np.ndarray:
    """Zipf popularity over ranks 1..file_count, normalized, descending."""
    if file_count < 1:
        raise ValueError("file_count must be >= 1")
    if alpha < 0:
        raise ValueError("alpha must be nonnegative")
    weights = np.arange(1, file_count + 1, dtype=float) ** (-float(alpha))
    return weights / weights.sum()


def cached_prefix_mask(catalog: FileCatalog, share_bits: float) -> np.ndarray:
    """Files one SBS caches from a per-SBS storage share.

    Files are taken whole, in descending popularity (stable on ties), and the
    fill stops at the first file that does not fit. The stop rule keeps the
    cached set a prefix of the popularity order, which makes the placement
    monotone in the allocated share.
    """
    order = np.argsort(-catalog.popularity, kind="stable")
    mask = np.zeros(catalog.file_count, dtype=bool)
    remaining = float(share_bits)
    for f in order:
        if catalog.sizes[f] > remaining:
            break
        mask[f] = True
        remaining -= float(catalog.sizes[f])
    return mask


def placement_from_allocation(catalog: FileCatalog, rho: float, sbs_count: int) -> CachePlacement:
    """Turn a CP's network-wide storage allocation into a cache placement.

    The allocation is split equally across SBSs and every SBS caches the same
    most-popular prefix that fits its share.
    """
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    if sbs_count < 1:
        raise ValueError("sbs_count must be >= 1")
    mask = cached_prefix_mask(catalog, rho / sbs_count)
    beta = np.tile(mask.astype(np.int8), (sbs_count, 1))
    return CachePlacement(cp=catalog.cp, beta=beta)


def cp_demand(catalog: FileCatalog, theta: float, users, sbs_count: int) -> np.ndarray:
    """Expected integer request counts per (SBS, file) for one CP.

    The count for file f at SBS i is theta * popularity(f) * (number of the
    CP's subscribers served by SBS i), rounded to the nearest integer with
    ties rounding up. Total demand scales linearly in theta before rounding.
    """
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    subscribers = np.zeros(sbs_count, dtype=float)
    for rec in users:
        if catalog.cp in rec.subscriptions:
            subscribers[rec.serving_sbs] += 1.0
    raw = float(theta) * subscribers[:, None] * catalog.popularity[None, :]
    return np.floor(raw + 0.5).astype(np.int64)


def spread_demand(demand_row: np.ndarray, user_ids: list[int]) -> dict[int, np.ndarray]:
    """Distribute one SBS's per-file request counts over its subscribers.

    Counts are split as evenly as possible, with remainders assigned to the
    lowest user ids. Deterministic for fixed inputs.
    """
    n = len(user_ids)
    out = {uid: np.zeros(len(demand_row), dtype=np.int64) for uid in user_ids}
    if n == 0:
        if np.any(demand_row > 0):
            raise ValueError("positive demand at an SBS with no subscribers")
        return out
    ordered = sorted(user_ids)
    for f, count in enumerate(demand_row):
        base, rem = divmod(int(count), n)
        for pos, uid in enumerate(ordered):
            out[uid][f] = base + (1 if pos < rem else 0)
    return out
