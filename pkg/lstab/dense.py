"""Detect-Dense-Region: a per-k stability curve from one shared sample pool, split by Jenks."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from lstab import config as settings
from lstab.geometry import ReasonableChanges, magnitude, min_skyline, stable_zone_mask
from lstab.models import Dataset, RankingFunctionSpec
from lstab.ranking import RankContext, TupleRef, tuple_id
from lstab.sampling import sample_uniform_rc, substream

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StabilityCurve:
    k_star: int
    estimates: Tuple[float, ...]

    def __getitem__(self, k: int) -> float:
        return self.estimates[k]

    def as_dict(self):
        return {k: v for k, v in enumerate(self.estimates)}


class JenksSplit(NamedTuple):
    small: Tuple[float, ...]
    large: Tuple[float, ...]
    threshold: Optional[float]


@dataclass(frozen=True)
class DenseRegionReport:
    k: int
    curve: StabilityCurve
    differences: Tuple[float, ...]
    small: Tuple[int, ...]
    large: Tuple[int, ...]

    @property
    def k_star(self) -> int:
        return self.curve.k_star


def curve_from_samples(magnitudes: np.ndarray, deltas: np.ndarray) -> StabilityCurve:
    """Removal sweep over a pool of (magnitude, position change) pairs.

    For each k the pool keeps the k-unstable samples plus the stable ones that
    contain some remaining k-unstable sample; estimate[k] = 1 - |pool| / N.
    """
    magnitudes = np.atleast_2d(np.asarray(magnitudes, dtype=float))
    deltas = np.asarray(deltas, dtype=int)
    total = len(deltas)
    if total == 0:
        return StabilityCurve(0, (1.0,))
    k_star = int(deltas.max())

    remaining = np.ones(total, dtype=bool)
    estimates = []
    for k in range(k_star):
        unstable = remaining & (deltas > k)
        sky = min_skyline(magnitudes[unstable], n=magnitudes.shape[1])
        candidates = np.flatnonzero(remaining & (deltas <= k))
        free = stable_zone_mask(magnitudes[candidates], sky) if len(candidates) else np.zeros(0, dtype=bool)
        remaining[candidates[free]] = False
        estimates.append(1.0 - remaining.sum() / total)
    estimates.append(1.0)
    return StabilityCurve(k_star, tuple(float(e) for e in estimates))


def stability_curve(
    spec: RankingFunctionSpec,
    d: Dataset,
    t: TupleRef,
    rc: ReasonableChanges,
    N: int = settings.DENSE_REGION_SAMPLES,
    rng: Optional[np.random.Generator] = None,
    workers: int = settings.WORKERS,
) -> StabilityCurve:
    rng = rng if rng is not None else substream(settings.DEFAULT_SEED, "curve")
    ctx = RankContext(spec, d, tuple_id(t), workers=workers, timeout=settings.EXTERNAL_TIMEOUT)
    ctx.check_box(rc.eps_max)
    draws = sample_uniform_rc(rc, rng, max(1, int(N)))
    deltas = ctx.deltas(draws)
    logger.debug("Curve pool: %d draws, largest position change %d", len(draws), int(deltas.max()))
    return curve_from_samples(magnitude(draws), deltas)


def jenks_two_class(values: Sequence[float]) -> JenksSplit:
    """Best single break on the sorted values by within-class sum of squares.

    Breaks are only placed between distinct values; on equal cost the first wins.
    """
    ordered = np.sort(np.asarray(values, dtype=float))
    best_cost, best_at = np.inf, None
    for i in range(1, len(ordered)):
        if not ordered[i - 1] < ordered[i]:
            continue
        left, right = ordered[:i], ordered[i:]
        cost = ((left - left.mean()) ** 2).sum() + ((right - right.mean()) ** 2).sum()
        if cost < best_cost:
            best_cost, best_at = cost, i
    if best_at is None:
        return JenksSplit(tuple(ordered.tolist()), (), None)
    return JenksSplit(
        tuple(ordered[:best_at].tolist()),
        tuple(ordered[best_at:].tolist()),
        float(ordered[best_at]),
    )


def detect_dense_region(
    spec: RankingFunctionSpec,
    d: Dataset,
    t: TupleRef,
    rc: ReasonableChanges,
    N: int = settings.DENSE_REGION_SAMPLES,
    rng: Optional[np.random.Generator] = None,
    workers: int = settings.WORKERS,
) -> DenseRegionReport:
    """Smallest k whose stability jump falls in the large Jenks class (0 if none)."""
    curve = stability_curve(spec, d, t, rc, N, rng, workers)
    est = np.asarray(curve.estimates)
    differences = np.diff(est, prepend=0.0)
    split = jenks_two_class(differences)
    if split.threshold is None:
        large: Tuple[int, ...] = ()
    else:
        large = tuple(int(k) for k in np.flatnonzero(differences >= split.threshold))
    small = tuple(k for k in range(len(differences)) if k not in large)
    k = large[0] if large else 0
    logger.info("Dense region for %s: k=%d (k*=%d)", tuple_id(t), k, curve.k_star)
    return DenseRegionReport(k, curve, tuple(float(x) for x in differences), small, large)
