"""Random streams, uniform and rejection sampling over RC, Hoeffding sample counts."""
from __future__ import annotations

import logging
import math
from typing import NamedTuple, Optional

import numpy as np

from lstab.config import REJECTION_CHUNK, REJECTION_MAX_TRIES
from lstab.errors import DomainError
from lstab.geometry import Boundary, ReasonableChanges, magnitude, stable_zone_mask

logger = logging.getLogger(__name__)

# Every consumer of randomness gets its own Philox substream keyed by
# (master seed, purpose, counters...), so phases can be replayed independently.
PURPOSES = {
    "reduce": 1,
    "construct": 2,
    "verify": 3,
    "volume": 4,
    "curve": 5,
    "audit": 6,
    "global": 7,
    "synth": 8,
    "oracle": 9,
    "flags": 10,
}

_SEED_MASK = 2**64 - 1


def substream(seed: int, purpose: str, *counters: int) -> np.random.Generator:
    try:
        code = PURPOSES[purpose]
    except KeyError:
        raise DomainError(f"Unknown random stream purpose {purpose!r}") from None
    sequence = np.random.SeedSequence(entropy=int(seed) & _SEED_MASK, spawn_key=(code, *map(int, counters)))
    return np.random.Generator(np.random.Philox(sequence))


def hoeffding_sample_count(eta: float, delta: float) -> int:
    """Samples needed so the empirical unstable rate is within eta of the truth with prob. 1 - delta."""
    if not (0 < eta < 1) or not (0 < delta < 1):
        raise DomainError(f"eta and delta must lie in (0, 1), got eta={eta}, delta={delta}")
    return math.ceil(math.log(1.0 / delta) / (2.0 * eta * eta))


def sample_uniform_rc(rc: ReasonableChanges, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """One refinement (size=None) or a (size, n) batch, uniform on the RC box."""
    shape = (rc.n,) if size is None else (int(size), rc.n)
    u = rng.random(shape)
    return (2.0 * u - 1.0) * rc.array


class SampleBatch(NamedTuple):
    samples: np.ndarray
    attempts: int
    exhausted: bool

    @property
    def acceptance_rate(self) -> float:
        return len(self.samples) / self.attempts if self.attempts else 0.0


def rejection_sample_batch(
    rc: ReasonableChanges,
    sb: Boundary,
    rng: np.random.Generator,
    count: int,
    max_tries: int = REJECTION_MAX_TRIES,
    chunk: int = REJECTION_CHUNK,
) -> SampleBatch:
    """Draw `count` refinements from RC ∩ E(sb).

    Gives up once `max_tries` draws in a row are rejected, or when the total
    number of draws exceeds max_tries * count. A short batch is returned with
    exhausted=True; attempts counts draws up to the last accepted one.
    """
    accepted = []
    got = 0
    attempts = 0
    run = 0
    limit = max_tries * max(count, 1)
    while got < count:
        draws = sample_uniform_rc(rc, rng, chunk)
        hits = np.flatnonzero(stable_zone_mask(magnitude(draws), sb))
        need = count - got
        prev = -1
        for h in hits[:need]:
            if run + (h - prev - 1) >= max_tries:
                logger.debug("Rejection sampling exhausted after %d draws (%d accepted)", attempts + h, got)
                return SampleBatch(_stack(accepted, rc.n), attempts + prev + 1, True)
            accepted.append(draws[h])
            got += 1
            run = 0
            prev = int(h)
        if got == count:
            attempts += prev + 1
            break
        run += chunk - prev - 1
        attempts += chunk
        if run >= max_tries or attempts > limit:
            logger.debug("Rejection sampling exhausted after %d draws (%d accepted)", attempts, got)
            return SampleBatch(_stack(accepted, rc.n), attempts - run, True)
    return SampleBatch(_stack(accepted, rc.n), attempts, False)


def rejection_sample_stable_zone(
    rc: ReasonableChanges,
    sb: Boundary,
    rng: np.random.Generator,
    max_tries: int = REJECTION_MAX_TRIES,
) -> Optional[np.ndarray]:
    """First draw whose magnitude lies in the stable zone, or None once max_tries draws are rejected."""
    batch = rejection_sample_batch(rc, sb, rng, 1, max_tries=max_tries, chunk=min(REJECTION_CHUNK, max_tries))
    if batch.exhausted:
        return None
    return batch.samples[0]


def _stack(rows, n: int) -> np.ndarray:
    if not rows:
        return np.zeros((0, n))
    return np.vstack(rows)
