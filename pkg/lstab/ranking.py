from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from lstab.config import EXTERNAL_TIMEOUT
from lstab.errors import (
    ConfigError,
    DimensionError,
    DomainError,
    IntegrityError,
    UnsupportedOperationError,
)
from lstab.external import run_ranking_process
from lstab.models import DataTuple, Dataset, Ranking, RankingFunctionSpec

logger = logging.getLogger(__name__)

TupleRef = Union[DataTuple, str]


def tuple_id(t: TupleRef) -> str:
    return t.id if isinstance(t, DataTuple) else str(t)


def score_matrix(spec: RankingFunctionSpec, values: np.ndarray) -> np.ndarray:
    """Score every row of `values`.

    Accumulation is column by column with elementwise ops only, so a row scores
    identically whether it is scored alone or inside a batch.
    """
    if not (spec.score_based and spec.is_declarative):
        raise UnsupportedOperationError(f"{spec.kind} ranking functions have no score")
    values = np.atleast_2d(np.asarray(values, dtype=float))
    if values.shape[1] != spec.arity:
        raise DimensionError(f"Ranking function expects {spec.arity} attributes, got {values.shape[1]}")

    acc = np.zeros(values.shape[0])
    if spec.kind == "linear":
        for i, w in enumerate(spec.weights):
            acc = acc + w * values[:, i]
        return acc

    for i, e in enumerate(spec.exponents):
        if e == 0:
            continue
        base = values[:, i] + spec.offset
        if np.any(base <= 0):
            raise DomainError(f"power_geomean needs value + offset > 0 (attribute {i}, min base {base.min():g})")
        acc = acc + e * np.log(base)
    return np.exp(acc / spec.root)


def score_tuple(spec: RankingFunctionSpec, t: DataTuple) -> float:
    return float(score_matrix(spec, np.asarray(t.values)[None, :])[0])


def refinement_limits(spec: RankingFunctionSpec, t: DataTuple) -> np.ndarray:
    """Per attribute, the |eps_i| at which eps(t) leaves the scoring domain (inf if never)."""
    limits = np.full(len(t.values), np.inf)
    if spec.kind == "power_geomean":
        for i, e in enumerate(spec.exponents):
            if e > 0:
                limits[i] = t.values[i] + spec.offset
    return limits


def check_refinement_box(
    spec: RankingFunctionSpec,
    t: DataTuple,
    eps_max: Sequence[float],
    names: Optional[Sequence[str]] = None,
) -> None:
    """ConfigError when some refinement in the box |eps_i| <= eps_max_i cannot be scored."""
    limits = refinement_limits(spec, t)
    eps_max = np.asarray(eps_max, dtype=float).ravel()
    if eps_max.shape != limits.shape:
        raise DimensionError(f"RC has {eps_max.shape[0]} components, tuple has {limits.shape[0]}")
    bad = np.flatnonzero(eps_max >= limits)
    if bad.size == 0:
        return
    names = names or [str(i) for i in range(len(limits))]
    parts = ", ".join(f"{names[i]} must stay below {limits[i]:g} (got {eps_max[i]:g})" for i in bad)
    raise ConfigError(f"Reasonable changes leave the {spec.kind} domain for {t.id!r}: {parts}")


def rank_dataset(spec: RankingFunctionSpec, d: Dataset, timeout: float = EXTERNAL_TIMEOUT) -> Ranking:
    """Descending score, ties by ascending id; external kinds keep the emitted order."""
    if not spec.is_declarative:
        return Ranking(run_ranking_process(spec.command, d, timeout=timeout))
    scores = score_matrix(spec, d.matrix)
    order = sorted(range(len(d)), key=lambda i: (-scores[i], d.ids[i]))
    return Ranking(tuple(d.ids[i] for i in order), tuple(float(scores[i]) for i in order))


def apply_refinement(t: DataTuple, eps) -> DataTuple:
    eps = np.asarray(eps, dtype=float).ravel()
    if eps.shape[0] != len(t.values):
        raise DimensionError(f"Refinement has {eps.shape[0]} components, tuple has {len(t.values)}")
    return DataTuple(t.id, tuple(float(v) for v in np.asarray(t.values) + eps))


def position_change(spec: RankingFunctionSpec, d: Dataset, t: DataTuple, t_new: DataTuple) -> int:
    if t_new.id != t.id:
        raise IntegrityError(f"Replacement id {t_new.id!r} differs from {t.id!r}")
    before = rank_dataset(spec, d).position(t.id)
    after = rank_dataset(spec, d.replace(t_new)).position(t.id)
    return abs(before - after)


class RankContext:
    """Everything needed to classify refinements of one tuple in one dataset.

    Built once per query: the original ranking, the k-neighbours, and for
    declarative specs the sorted scores of all other tuples so a whole batch of
    refinements can be re-ranked by counting.
    """

    def __init__(
        self,
        spec: RankingFunctionSpec,
        d: Dataset,
        tuple_id: str,
        workers: int = 1,
        timeout: float = EXTERNAL_TIMEOUT,
    ):
        self.spec = spec
        self.dataset = d
        self.tuple = d.get(tuple_id)
        self.workers = max(1, int(workers))
        self.timeout = timeout
        self.ranking = rank_dataset(spec, d, timeout=timeout)
        self.position = self.ranking.position(tuple_id)
        self.origin = np.asarray(self.tuple.values, dtype=float)

        if spec.is_declarative:
            scores = dict(zip(self.ranking.order, self.ranking.scores))
            others = [tid for tid in self.ranking.order if tid != tuple_id]
            self._scores = scores
            self._other_scores = np.sort(np.array([scores[o] for o in others], dtype=float))
            self._other_scores_id_less = np.sort(
                np.array([scores[o] for o in others if o < tuple_id], dtype=float)
            )

    @property
    def n(self) -> int:
        return self.dataset.schema.n

    def check_box(self, eps_max: Sequence[float]) -> None:
        check_refinement_box(self.spec, self.tuple, eps_max, self.dataset.schema.names)

    def neighbour(self, k: int, direction: int) -> Optional[str]:
        """Id k+1 positions above (direction=-1) or below (+1), if any."""
        return self.ranking.at(self.position + direction * (k + 1))

    def refined_scores(self, eps: np.ndarray) -> np.ndarray:
        return score_matrix(self.spec, self.origin[None, :] + eps)

    def _map(self, fn: Callable, items: Sequence) -> List:
        if self.workers == 1 or len(items) < 2:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            return list(pool.map(fn, items))

    def _refined(self, row: np.ndarray) -> DataTuple:
        return DataTuple(self.tuple.id, tuple(float(v) for v in self.origin + row))

    def positions(self, eps: np.ndarray) -> np.ndarray:
        """New 0-based position of eps(t) for every row of eps (full re-rank semantics)."""
        eps = np.atleast_2d(np.asarray(eps, dtype=float))
        if eps.shape[1] != self.n:
            raise DimensionError(f"Refinements have {eps.shape[1]} components, schema has {self.n}")
        if self.spec.is_declarative:
            s = self.refined_scores(eps)
            higher = len(self._other_scores) - np.searchsorted(self._other_scores, s, side="right")
            tied = np.searchsorted(self._other_scores_id_less, s, side="right") - np.searchsorted(
                self._other_scores_id_less, s, side="left"
            )
            return (higher + tied).astype(int)

        def one(row):
            d_new = self.dataset.replace(self._refined(row))
            order = run_ranking_process(self.spec.command, d_new, timeout=self.timeout)
            return order.index(self.tuple.id)

        return np.array(self._map(one, list(eps)), dtype=int)

    def deltas(self, eps: np.ndarray) -> np.ndarray:
        return np.abs(self.positions(eps) - self.position)

    def stable_mask(self, eps: np.ndarray, k: int, fast: bool = True) -> np.ndarray:
        """True where eps(t) moves at most k positions."""
        eps = np.atleast_2d(np.asarray(eps, dtype=float))
        if not (fast and self.spec.tuple_independent):
            return self.deltas(eps) <= k
        if eps.shape[1] != self.n:
            raise DimensionError(f"Refinements have {eps.shape[1]} components, schema has {self.n}")

        up = self.neighbour(k, -1)
        down = self.neighbour(k, +1)
        if self.spec.is_declarative:
            s = self.refined_scores(eps)
            ok = np.ones(len(s), dtype=bool)
            if up is not None:
                ok &= ~self._beats(s, up)
            if down is not None:
                ok &= self._beats(s, down)
            return ok

        def one(row):
            members = [self.dataset.get(tid) for tid in (up, down) if tid is not None]
            mini = Dataset(self.dataset.schema, tuple(members) + (self._refined(row),))
            order = run_ranking_process(self.spec.command, mini, timeout=self.timeout)
            at = order.index(self.tuple.id)
            if up is not None and at < order.index(up):
                return False
            if down is not None and at > order.index(down):
                return False
            return True

        return np.array(self._map(one, list(eps)), dtype=bool)

    def _beats(self, s: np.ndarray, other_id: str) -> np.ndarray:
        """Whether a refined score ranks ahead of `other_id` under the id tie-break."""
        other = self._scores[other_id]
        if self.tuple.id < other_id:
            return s >= other
        return s > other

    def unstable_mask(self, eps: np.ndarray, k: int, fast: bool = True) -> np.ndarray:
        return ~self.stable_mask(eps, k, fast=fast)
