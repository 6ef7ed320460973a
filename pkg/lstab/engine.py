"""LStability: boundary construction and verification, then Monte Carlo volume."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal, NamedTuple, Optional

import numpy as np

from lstab import config as settings
from lstab.errors import ConfigError
from lstab.geometry import (
    Boundary,
    ReasonableChanges,
    box_volume,
    magnitude,
    merge,
    min_skyline,
    stable_zone_mask,
)
from lstab.models import Dataset, RankingFunctionSpec
from lstab.ranking import RankContext, TupleRef, tuple_id
from lstab.sampling import (
    hoeffding_sample_count,
    rejection_sample_batch,
    sample_uniform_rc,
    substream,
)

logger = logging.getLogger(__name__)

BudgetMode = Literal["fixed", "apportioned"]
StopReason = Literal["alpha_reached", "tau_v", "rejection_exhausted", "max_iterations"]


@dataclass(frozen=True)
class EngineConfig:
    k: int
    rc: ReasonableChanges
    construction_samples_per_iter: int = settings.CONSTRUCTION_SAMPLES_PER_ITER
    max_iterations: int = settings.MAX_ITERATIONS
    eta: float = settings.ETA
    delta: float = settings.DELTA
    alpha_target: float = settings.ALPHA_TARGET
    tau_v: float = settings.TAU_V
    volume_samples: int = settings.VOLUME_SAMPLES
    rejection_max_tries: int = settings.REJECTION_MAX_TRIES
    seed: int = settings.DEFAULT_SEED
    rc_reduction: bool = True
    fast_rerank: bool = True
    iterative: bool = True
    budget_mode: BudgetMode = "fixed"
    construction_budget_total: int = settings.CONSTRUCTION_BUDGET_TOTAL
    rc_reduction_samples: int = settings.RC_REDUCTION_SAMPLES
    binary_search_steps: int = settings.BINARY_SEARCH_STEPS
    workers: int = settings.WORKERS
    rejection_chunk: int = settings.REJECTION_CHUNK

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or isinstance(self.k, bool) or self.k < 0:
            raise ConfigError(f"k must be a non-negative integer, got {self.k!r}")
        if not isinstance(self.rc, ReasonableChanges):
            raise ConfigError("rc must be a ReasonableChanges")
        for name in ("eta", "delta", "alpha_target", "tau_v"):
            value = getattr(self, name)
            if not (0 < value < 1):
                raise ConfigError(f"{name} must lie in (0, 1), got {value}")
        for name in (
            "construction_samples_per_iter",
            "max_iterations",
            "volume_samples",
            "rejection_max_tries",
            "construction_budget_total",
            "rc_reduction_samples",
            "binary_search_steps",
            "workers",
            "rejection_chunk",
        ):
            value = getattr(self, name)
            if int(value) != value or value <= 0:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.budget_mode not in ("fixed", "apportioned"):
            raise ConfigError(f"Unknown budget mode {self.budget_mode!r}")

    @property
    def verification_samples(self) -> int:
        return hoeffding_sample_count(self.eta, self.delta)

    @property
    def construction_budget(self) -> int:
        """Construction draws per iteration."""
        if self.budget_mode == "fixed":
            return self.construction_samples_per_iter
        v = self.verification_samples
        return max(1, math.ceil((self.construction_budget_total + v) / self.max_iterations - v))

    @property
    def total_construction_budget(self) -> int:
        if self.budget_mode == "fixed":
            return self.construction_samples_per_iter * self.max_iterations
        return self.construction_budget_total


@dataclass(frozen=True)
class StabilityReport:
    tuple_id: str
    estimate: float
    alpha: Optional[float]
    delta: float
    eta: float
    iterations_used: int
    construction_samples: int
    verification_samples: int
    verification_skipped: bool
    converged: bool
    stop_reason: StopReason
    boundary: Boundary
    rc_effective: ReasonableChanges
    scale_factor: float
    zone_fraction: float
    config: EngineConfig

    @property
    def k(self) -> int:
        return self.config.k

    @property
    def seed(self) -> int:
        return self.config.seed


class Verification(NamedTuple):
    alpha: float
    p_hat: float
    counterexamples: np.ndarray
    samples: int


class _Construction(NamedTuple):
    boundary: Boundary
    drawn: int
    zone_fraction: float
    exhausted: bool


def is_k_stable(
    spec: RankingFunctionSpec,
    d: Dataset,
    t: TupleRef,
    eps,
    k: int,
    fast_rerank: bool = True,
) -> bool:
    ctx = RankContext(spec, d, tuple_id(t), timeout=settings.EXTERNAL_TIMEOUT)
    return bool(ctx.stable_mask(np.asarray(eps, dtype=float).reshape(1, -1), k, fast=fast_rerank)[0])


def _construct(
    ctx: RankContext,
    k: int,
    rc: ReasonableChanges,
    prior: Boundary,
    counterexamples,
    n_samples: int,
    rng: np.random.Generator,
    fast_rerank: bool = True,
    max_tries: int = settings.REJECTION_MAX_TRIES,
    chunk: int = settings.REJECTION_CHUNK,
) -> _Construction:
    base = merge(prior, counterexamples, n=rc.n)
    if len(base) == 0:
        draws = sample_uniform_rc(rc, rng, n_samples)
        acceptance, exhausted = 1.0, False
    else:
        batch = rejection_sample_batch(rc, base, rng, n_samples, max_tries=max_tries, chunk=chunk)
        draws, acceptance, exhausted = batch.samples, batch.acceptance_rate, batch.exhausted
    if len(draws) == 0:
        return _Construction(base, 0, 0.0, True)

    unstable = ctx.unstable_mask(draws, k, fast=fast_rerank)
    boundary = merge(base, magnitude(draws[unstable]), n=rc.n)
    survived = float(np.mean(stable_zone_mask(magnitude(draws), boundary)))
    logger.debug("Construction: %d draws, %d unstable, boundary %d", len(draws), int(unstable.sum()), len(boundary))
    return _Construction(boundary, len(draws), acceptance * survived, exhausted)


def construct_boundary(
    spec: RankingFunctionSpec,
    d: Dataset,
    t: TupleRef,
    k: int,
    rc: ReasonableChanges,
    prior: Optional[Boundary],
    counterexamples,
    n_samples: int,
    rng: np.random.Generator,
    fast_rerank: bool = True,
) -> Boundary:
    """Skyline of prior ∪ counterexamples ∪ newly found unstable magnitudes.

    With a non-empty prior, draws come from RC ∩ E(prior) only.
    """
    ctx = RankContext(spec, d, tuple_id(t), timeout=settings.EXTERNAL_TIMEOUT)
    ctx.check_box(rc.eps_max)
    prior = prior if prior is not None else Boundary.empty(rc.n)
    counterexamples = [] if counterexamples is None else list(counterexamples)
    return _construct(ctx, k, rc, prior, counterexamples, n_samples, rng, fast_rerank).boundary


def _verify(
    ctx: RankContext,
    k: int,
    rc: ReasonableChanges,
    sb: Boundary,
    eta: float,
    delta: float,
    rng: np.random.Generator,
    fast_rerank: bool = True,
    max_tries: int = settings.REJECTION_MAX_TRIES,
    chunk: int = settings.REJECTION_CHUNK,
) -> Optional[Verification]:
    n = hoeffding_sample_count(eta, delta)
    batch = rejection_sample_batch(rc, sb, rng, n, max_tries=max_tries, chunk=chunk)
    if batch.exhausted:
        return None
    unstable = ctx.unstable_mask(batch.samples, k, fast=fast_rerank)
    p_hat = float(np.mean(unstable))
    found = magnitude(batch.samples[unstable])
    counterexamples = np.unique(found, axis=0) if len(found) else np.zeros((0, rc.n))
    return Verification(p_hat + eta, p_hat, counterexamples, n)


def verify_boundary(
    spec: RankingFunctionSpec,
    d: Dataset,
    t: TupleRef,
    k: int,
    rc: ReasonableChanges,
    sb: Boundary,
    eta: float,
    delta: float,
    rng: np.random.Generator,
    fast_rerank: bool = True,
) -> Optional[Verification]:
    """Hoeffding check of sb; None when the stable zone is too small to sample."""
    ctx = RankContext(spec, d, tuple_id(t), timeout=settings.EXTERNAL_TIMEOUT)
    ctx.check_box(rc.eps_max)
    return _verify(ctx, k, rc, sb, eta, delta, rng, fast_rerank)


def estimate_stability(rc: ReasonableChanges, sb: Boundary, M: int, rng: np.random.Generator) -> float:
    draws = sample_uniform_rc(rc, rng, M)
    return float(np.mean(stable_zone_mask(magnitude(draws), sb)))


def _binary_search_dim(ctx: RankContext, k: int, n: int, i: int, e: float, steps: int, fast: bool) -> float:
    g = e / steps

    def unstable(j: int) -> bool:
        eps = np.zeros((2, n))
        eps[0, i] = j * g
        eps[1, i] = -j * g
        return bool(ctx.unstable_mask(eps, k, fast=fast).any())

    if not unstable(steps):
        return e
    lo, hi = 0, steps
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if unstable(mid):
            hi = mid
        else:
            lo = mid
    return hi * g


def _reduce(
    ctx: RankContext,
    k: int,
    rc: ReasonableChanges,
    samples: int,
    rng: np.random.Generator,
    steps: int,
    fast_rerank: bool,
) -> ReasonableChanges:
    n = rc.n
    reduced = list(rc.eps_max)
    for i, e in enumerate(rc.eps_max):
        if e <= 0:
            continue
        if ctx.spec.monotone:
            reduced[i] = _binary_search_dim(ctx, k, n, i, e, steps, fast_rerank)
            continue
        eps = np.zeros((samples, n))
        eps[:, i] = (2.0 * rng.random(samples) - 1.0) * e
        unstable = ctx.unstable_mask(eps, k, fast=fast_rerank)
        if unstable.any():
            reduced[i] = min(e, float(np.abs(eps[unstable, i]).min()))
    logger.debug("Reduced RC %s -> %s", rc.eps_max, tuple(reduced))
    return ReasonableChanges(tuple(reduced))


def reduce_rc(
    spec: RankingFunctionSpec,
    d: Dataset,
    t: TupleRef,
    k: int,
    rc: ReasonableChanges,
    budget: int = settings.RC_REDUCTION_SAMPLES,
    rng: Optional[np.random.Generator] = None,
    steps: int = settings.BINARY_SEARCH_STEPS,
    fast_rerank: bool = True,
) -> ReasonableChanges:
    """Shrink each eps_max_i to the smallest single-attribute change found k-unstable.

    Monotone specs binary search a grid of `steps` cells per attribute; others
    test `budget` uniform single-attribute draws.
    """
    ctx = RankContext(spec, d, tuple_id(t), timeout=settings.EXTERNAL_TIMEOUT)
    ctx.check_box(rc.eps_max)
    rng = rng if rng is not None else substream(settings.DEFAULT_SEED, "reduce")
    return _reduce(ctx, k, rc, budget, rng, steps, fast_rerank)


def lstability(spec: RankingFunctionSpec, d: Dataset, t: TupleRef, config: EngineConfig) -> StabilityReport:
    tid = tuple_id(t)
    ctx = RankContext(spec, d, tid, workers=config.workers, timeout=settings.EXTERNAL_TIMEOUT)
    if config.rc.n != ctx.n:
        raise ConfigError(f"RC has {config.rc.n} components, dataset has {ctx.n} attributes")
    ctx.check_box(config.rc.eps_max)
    k, seed = config.k, config.seed

    rc = config.rc
    if config.rc_reduction:
        rc = _reduce(
            ctx, k, config.rc, config.rc_reduction_samples, substream(seed, "reduce"),
            config.binary_search_steps, config.fast_rerank,
        )
    full = box_volume(config.rc)
    scale = box_volume(rc) / full if full > 0 else 1.0

    boundary = Boundary.empty(rc.n)
    counterexamples = np.zeros((0, rc.n))
    alpha: Optional[float] = None
    construction_samples = verification_samples = 0
    zone_fraction = 1.0
    stop_reason: StopReason = "max_iterations"
    skipped = False
    iterations = 0

    rounds = config.max_iterations if config.iterative else 1
    budget = config.construction_budget if config.iterative else config.total_construction_budget
    tries, chunk = config.rejection_max_tries, config.rejection_chunk

    for i in range(rounds):
        iterations = i + 1
        built = _construct(
            ctx, k, rc, boundary, counterexamples, budget, substream(seed, "construct", i),
            config.fast_rerank, tries, chunk,
        )
        boundary = built.boundary
        counterexamples = np.zeros((0, rc.n))
        construction_samples += built.drawn
        zone_fraction = built.zone_fraction
        if built.exhausted:
            stop_reason, skipped = "rejection_exhausted", True
            break
        if zone_fraction < config.tau_v:
            logger.info("Iteration %d: zone fraction %.4f below tau_v, skipping verification", iterations, zone_fraction)
            stop_reason, skipped = "tau_v", True
            break

        checked = _verify(
            ctx, k, rc, boundary, config.eta, config.delta, substream(seed, "verify", i),
            config.fast_rerank, tries, chunk,
        )
        if checked is None:
            stop_reason, skipped = "rejection_exhausted", True
            break
        verification_samples += checked.samples
        alpha = checked.alpha
        counterexamples = checked.counterexamples
        logger.info(
            "Iteration %d: boundary %d, zone %.4f, alpha %.4f, %d counterexamples",
            iterations, len(boundary), zone_fraction, alpha, len(counterexamples),
        )
        if alpha <= config.alpha_target:
            stop_reason = "alpha_reached"
            break

    boundary = min_skyline(np.vstack([boundary.points, counterexamples]), n=rc.n)
    estimate = estimate_stability(rc, boundary, config.volume_samples, substream(seed, "volume")) * scale
    estimate = min(1.0, max(0.0, estimate))

    return StabilityReport(
        tuple_id=tid,
        estimate=estimate,
        alpha=alpha,
        delta=config.delta,
        eta=config.eta,
        iterations_used=iterations,
        construction_samples=construction_samples,
        verification_samples=verification_samples,
        verification_skipped=skipped,
        converged=stop_reason == "alpha_reached",
        stop_reason=stop_reason,
        boundary=boundary,
        rc_effective=rc,
        scale_factor=scale,
        zone_fraction=zone_fraction,
        config=config,
    )
