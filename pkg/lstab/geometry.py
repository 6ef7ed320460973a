"""Containment order over refinement magnitudes, skylines and stable zones."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence

import numpy as np

from lstab.errors import DimensionError, DomainError

# A Refinement is a signed float vector of length n; a MagnitudeVector is its
# componentwise absolute value. Both travel as numpy arrays, batches as (rows, n).

# Upper bound on elements of the (rows, points, n) comparison cube per chunk.
_CUBE_LIMIT = 4_000_000
_SKYLINE_BLOCK = 256


def magnitude(eps) -> np.ndarray:
    return np.abs(np.asarray(eps, dtype=float))


@dataclass(frozen=True)
class ReasonableChanges:
    """The box RC = {eps : |eps_i| <= eps_max_i}."""

    eps_max: tuple

    def __post_init__(self):
        values = tuple(float(v) for v in self.eps_max)
        if not values:
            raise DimensionError("Reasonable changes need at least one component")
        if any(not math.isfinite(v) or v < 0 for v in values):
            raise DomainError(f"eps_max components must be finite and >= 0, got {values}")
        object.__setattr__(self, "eps_max", values)

    @property
    def n(self) -> int:
        return len(self.eps_max)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.eps_max, dtype=float)

    @property
    def active(self) -> np.ndarray:
        """Mask of dimensions with positive width."""
        return self.array > 0

    @classmethod
    def from_fraction_of_range(cls, ranges: Sequence[float], fraction: float) -> ReasonableChanges:
        return cls(tuple(float(r) * fraction for r in ranges))


@dataclass(frozen=True)
class Boundary:
    """Antichain of magnitude vectors, stored sorted by (sum, lexicographic)."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise DimensionError("Boundary points must be a (count, n) array")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def empty(cls, n: int) -> Boundary:
        return cls(np.zeros((0, n)))

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def to_list(self) -> List[List[float]]:
        return self.points.tolist()


def _check_same_length(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise DimensionError(f"Length mismatch: {a.shape[-1]} vs {b.shape[-1]}")


def contains_leq(a, b) -> bool:
    """a ⪯ b: every |a_i| <= |b_i|."""
    a = magnitude(a).ravel()
    b = magnitude(b).ravel()
    _check_same_length(a, b)
    return bool(np.all(a <= b))


def _dominated_by_any(candidates: np.ndarray, points: np.ndarray) -> np.ndarray:
    """For each candidate row, whether some point is componentwise <= it."""
    out = np.zeros(candidates.shape[0], dtype=bool)
    if points.shape[0] == 0 or candidates.shape[0] == 0:
        return out
    step = max(1, _CUBE_LIMIT // max(1, points.shape[0] * points.shape[1]))
    for start in range(0, candidates.shape[0], step):
        block = candidates[start:start + step]
        out[start:start + step] = np.any(np.all(points[None, :, :] <= block[:, None, :], axis=2), axis=1)
    return out


def min_skyline(points: Iterable, n: int | None = None) -> Boundary:
    """Minimal elements under ⪯, duplicates collapsed.

    Sort-filter skyline: after sorting by coordinate sum a point can only be
    dominated by one that comes earlier, so each block is checked against the
    skyline so far and against the earlier rows of the same block.
    """
    pts = np.asarray(points if not isinstance(points, Boundary) else points.points, dtype=float)
    if pts.size == 0:
        if n is None:
            n = pts.shape[1] if pts.ndim == 2 else 0
        return Boundary.empty(n)
    pts = np.abs(np.atleast_2d(pts))
    if n is not None and pts.shape[1] != n:
        raise DimensionError(f"Points have {pts.shape[1]} components, expected {n}")

    pts = np.unique(pts, axis=0)
    pts = pts[np.argsort(pts.sum(axis=1), kind="stable")]

    kept = np.zeros((0, pts.shape[1]))
    for start in range(0, pts.shape[0], _SKYLINE_BLOCK):
        block = pts[start:start + _SKYLINE_BLOCK]
        survivors = ~_dominated_by_any(block, kept)
        # q earlier in the block with q <= p (rows are unique, so q != p)
        leq = np.all(block[:, None, :] <= block[None, :, :], axis=2)
        earlier = np.triu(leq, k=1)
        survivors &= ~earlier.any(axis=0)
        kept = np.vstack([kept, block[survivors]])
    return Boundary(kept)


def merge(*parts, n: int) -> Boundary:
    arrays = [np.asarray(p.points if isinstance(p, Boundary) else p, dtype=float).reshape(-1, n) for p in parts]
    return min_skyline(np.vstack(arrays) if arrays else np.zeros((0, n)), n=n)


def stable_zone_mask(magnitudes: np.ndarray, sb: Boundary) -> np.ndarray:
    """Row-wise in_stable_zone for a batch of magnitude vectors."""
    m = np.atleast_2d(np.abs(np.asarray(magnitudes, dtype=float)))
    if m.shape[1] != sb.n:
        raise DimensionError(f"Magnitudes have {m.shape[1]} components, boundary has {sb.n}")
    return ~_dominated_by_any(m, sb.points)


def in_stable_zone(m, sb: Boundary) -> bool:
    """No boundary point b with b ⪯ m; a boundary point itself is outside the zone."""
    return bool(stable_zone_mask(np.asarray(m, dtype=float).reshape(1, -1), sb)[0])


def box_volume(rc: ReasonableChanges) -> float:
    """Volume of RC over its positive-width dimensions."""
    widths = 2.0 * rc.array[rc.active]
    return float(np.prod(widths)) if widths.size else 1.0
