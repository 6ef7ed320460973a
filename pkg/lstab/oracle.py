"""Brute-force references: exact-on-grid stability, boundary and flag audits, 2-D global stability."""
from __future__ import annotations

import logging
import math
from typing import NamedTuple, Optional, Tuple

import numpy as np

from lstab import config as settings
from lstab.errors import DimensionError, DomainError, GridSizeError
from lstab.geometry import Boundary, ReasonableChanges, magnitude, min_skyline, stable_zone_mask
from lstab.models import Dataset, RankingFunctionSpec
from lstab.ranking import RankContext, TupleRef, apply_refinement, check_refinement_box, rank_dataset, tuple_id
from lstab.sampling import rejection_sample_batch, sample_uniform_rc

logger = logging.getLogger(__name__)

MAX_GRID_DIMS = 3
MAX_GRID_CELLS = 10_000_000
_GRID_BATCH = 100_000
_WEIGHT_BATCH = 65_536


class GridResult(NamedTuple):
    stability: float
    boundary: Boundary
    cells: int
    unstable_cells: int


def _grid(rc: ReasonableChanges, points_per_dim: int) -> np.ndarray:
    axes = [np.linspace(-e, e, points_per_dim) if e > 0 else np.zeros(1) for e in rc.eps_max]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def grid_oracle(
    spec: RankingFunctionSpec,
    d: Dataset,
    t: TupleRef,
    k: int,
    rc: ReasonableChanges,
    grid_points_per_dim: int,
    fast_rerank: bool = False,
) -> GridResult:
    """Classify every grid refinement, take the skyline of the unstable ones, count the zone."""
    if grid_points_per_dim < 1:
        raise GridSizeError("grid_points_per_dim must be positive")
    active = int(rc.active.sum())
    if rc.n > MAX_GRID_DIMS:
        raise GridSizeError(f"Grid oracle handles at most {MAX_GRID_DIMS} attributes, got {rc.n}")
    if grid_points_per_dim ** active > MAX_GRID_CELLS:
        raise GridSizeError(
            f"{grid_points_per_dim}^{active} grid cells exceed the limit of {MAX_GRID_CELLS:,}"
        )

    ctx = RankContext(spec, d, tuple_id(t), timeout=settings.EXTERNAL_TIMEOUT)
    ctx.check_box(rc.eps_max)
    grid = _grid(rc, grid_points_per_dim)
    unstable = np.zeros(len(grid), dtype=bool)
    for start in range(0, len(grid), _GRID_BATCH):
        chunk = grid[start:start + _GRID_BATCH]
        unstable[start:start + _GRID_BATCH] = ctx.unstable_mask(chunk, k, fast=fast_rerank)

    mags = magnitude(grid)
    sb = min_skyline(mags[unstable], n=rc.n)
    stability = float(np.mean(stable_zone_mask(mags, sb)))
    logger.debug("Grid %d cells, %d unstable, skyline %d", len(grid), int(unstable.sum()), len(sb))
    return GridResult(stability, sb, len(grid), int(unstable.sum()))


def grid_stability(
    spec: RankingFunctionSpec,
    d: Dataset,
    t: TupleRef,
    k: int,
    rc: ReasonableChanges,
    grid_points_per_dim: int,
    fast_rerank: bool = False,
) -> float:
    return grid_oracle(spec, d, t, k, rc, grid_points_per_dim, fast_rerank).stability


def audit_boundary(
    spec: RankingFunctionSpec,
    d: Dataset,
    t: TupleRef,
    k: int,
    rc: ReasonableChanges,
    sb: Boundary,
    samples: int,
    rng: np.random.Generator,
    max_tries: int = settings.REJECTION_MAX_TRIES,
) -> Optional[float]:
    """Fresh estimate of P[k-unstable | draw in RC ∩ E(sb)]; None when the zone cannot be sampled."""
    ctx = RankContext(spec, d, tuple_id(t), timeout=settings.EXTERNAL_TIMEOUT)
    ctx.check_box(rc.eps_max)
    batch = rejection_sample_batch(rc, sb, rng, samples, max_tries=max_tries)
    if batch.exhausted:
        return None
    return float(np.mean(ctx.unstable_mask(batch.samples, k)))


class FlagAudit(NamedTuple):
    """Per check, how many sampled tuples broke it (at most one count per sample)."""

    samples: int
    order_violations: int
    monotone_violations: int
    subset_violations: int

    def contradicted(self, spec: RankingFunctionSpec) -> Tuple[str, ...]:
        """Declared flags the observed behaviour contradicts."""
        found = []
        if spec.score_based and self.subset_violations:
            found.append("score_based")
        if spec.tuple_independent and self.order_violations:
            found.append("tuple_independent")
        if spec.monotone and self.monotone_violations:
            found.append("monotone")
        return tuple(found)


def _without(order, tid: str) -> Tuple[str, ...]:
    return tuple(x for x in order if x != tid)


def audit_flags(
    spec: RankingFunctionSpec,
    d: Dataset,
    samples: int,
    rng: np.random.Generator,
    rc: Optional[ReasonableChanges] = None,
    subset_size: int = 3,
) -> FlagAudit:
    """Check a ranker's behaviour against what its flags promise, on random tuples.

    Order: refining a tuple by eps or by -eps keeps the other tuples in the same
    relative order. Monotone: raising one attribute never moves the tuple down.
    Subset: ranking a random subset gives the full order restricted to it, as
    ranking by a per-tuple score would. rc defaults to the `pct` share of each
    attribute's range.
    """
    if samples < 1:
        raise DomainError("samples must be positive")
    if rc is None:
        rc = ReasonableChanges.from_fraction_of_range(d.column_ranges(), settings.DEFAULT_RC_PCT / 100.0)
    if rc.n != d.schema.n:
        raise DimensionError(f"RC has {rc.n} components, dataset has {d.schema.n} attributes")

    timeout = settings.EXTERNAL_TIMEOUT
    base = rank_dataset(spec, d, timeout=timeout)
    order_bad = monotone_bad = subset_bad = 0
    for _ in range(samples):
        t = d.tuples[int(rng.integers(len(d)))]
        check_refinement_box(spec, t, rc.eps_max, d.schema.names)
        eps = sample_uniform_rc(rc, rng)

        others = _without(base.order, t.id)
        for signed in (eps, -eps):
            refined = rank_dataset(spec, d.replace(apply_refinement(t, signed)), timeout=timeout)
            if _without(refined.order, t.id) != others:
                order_bad += 1
                break

        for i in np.flatnonzero(eps != 0):
            bump = np.zeros(rc.n)
            bump[i] = abs(eps[i])
            raised = rank_dataset(spec, d.replace(apply_refinement(t, bump)), timeout=timeout)
            if raised.position(t.id) > base.position(t.id):
                monotone_bad += 1
                break

        picks = np.sort(rng.choice(len(d), size=min(len(d), subset_size), replace=False))
        subset = Dataset(d.schema, tuple(d.tuples[j] for j in picks))
        chosen = set(subset.ids)
        if rank_dataset(spec, subset, timeout=timeout).order != tuple(x for x in base.order if x in chosen):
            subset_bad += 1

    audit = FlagAudit(samples, order_bad, monotone_bad, subset_bad)
    logger.info("Flag audit over %d samples: %s", samples, audit)
    return audit


def global_stability_2d(d: Dataset, samples: int, rng: np.random.Generator) -> float:
    """Fraction of weightings (cos θ, sin θ), θ ~ U[0, π/2], that keep the a = b = 1 ranking."""
    if d.schema.n != 2:
        raise DimensionError(f"Global stability needs exactly 2 attributes, got {d.schema.n}")
    if samples < 1:
        raise DomainError("samples must be positive")
    if len(d) < 2:
        return 1.0

    values = d.matrix
    ids = d.ids
    order = sorted(range(len(d)), key=lambda i: (-(values[i, 0] + values[i, 1]), ids[i]))
    ranked = values[order]
    gaps = ranked[:-1] - ranked[1:]
    id_less = np.array([ids[order[i]] < ids[order[i + 1]] for i in range(len(order) - 1)])

    kept = 0
    for start in range(0, samples, _WEIGHT_BATCH):
        size = min(_WEIGHT_BATCH, samples - start)
        theta = rng.uniform(0.0, math.pi / 2, size)
        weights = np.column_stack([np.cos(theta), np.sin(theta)])
        margin = weights @ gaps.T
        ok = (margin > 0) | ((margin == 0) & id_less[None, :])
        kept += int(ok.all(axis=1).sum())
    return kept / samples
