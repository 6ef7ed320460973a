from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Literal, Optional, Tuple

import numpy as np

from lstab.errors import ConfigError, DimensionError, DomainError, IntegrityError, SchemaError, TupleNotFoundError

Kind = Literal["linear", "power_geomean", "external"]
KINDS = ("linear", "power_geomean", "external")


@dataclass(frozen=True)
class AttributeSchema:
    names: Tuple[str, ...]

    def __post_init__(self):
        if not self.names:
            raise SchemaError("At least one attribute column is required.")
        if any(not name for name in self.names):
            raise SchemaError("Attribute names must be non-empty.")
        if len(set(self.names)) != len(self.names):
            raise SchemaError(f"Duplicate attribute names in {list(self.names)}")

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SchemaError(f"Unknown attribute {name!r}; expected one of {list(self.names)}") from None


@dataclass(frozen=True)
class DataTuple:
    id: str
    values: Tuple[float, ...]

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.values):
            raise DomainError(f"Tuple {self.id!r} has non-finite values {self.values}")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class Dataset:
    schema: AttributeSchema
    tuples: Tuple[DataTuple, ...]

    def __post_init__(self):
        if not self.tuples:
            raise IntegrityError("Dataset must contain at least one tuple.")
        seen = set()
        for t in self.tuples:
            if len(t.values) != self.schema.n:
                raise DimensionError(
                    f"Tuple {t.id!r} has {len(t.values)} values, schema has {self.schema.n}"
                )
            if t.id in seen:
                raise IntegrityError(f"Duplicate tuple id {t.id!r}")
            seen.add(t.id)

    def __len__(self) -> int:
        return len(self.tuples)

    @cached_property
    def ids(self) -> Tuple[str, ...]:
        return tuple(t.id for t in self.tuples)

    @cached_property
    def _index(self) -> Dict[str, int]:
        return {t.id: i for i, t in enumerate(self.tuples)}

    @cached_property
    def matrix(self) -> np.ndarray:
        m = np.array([t.values for t in self.tuples], dtype=float).reshape(len(self.tuples), self.schema.n)
        m.setflags(write=False)
        return m

    def get(self, tuple_id: str) -> DataTuple:
        try:
            return self.tuples[self._index[tuple_id]]
        except KeyError:
            raise TupleNotFoundError(f"No tuple with id {tuple_id!r}") from None

    def row_of(self, tuple_id: str) -> int:
        self.get(tuple_id)
        return self._index[tuple_id]

    def replace(self, t: DataTuple) -> Dataset:
        """D with the tuple sharing t.id swapped for t."""
        i = self.row_of(t.id)
        tuples = list(self.tuples)
        tuples[i] = t
        return Dataset(self.schema, tuple(tuples))

    def column_ranges(self) -> np.ndarray:
        return self.matrix.max(axis=0) - self.matrix.min(axis=0)


@dataclass(frozen=True)
class RankingFunctionSpec:
    kind: Kind
    weights: Optional[Tuple[float, ...]] = None
    exponents: Optional[Tuple[float, ...]] = None
    offset: float = 1.0
    command: Optional[Tuple[str, ...]] = None
    score_based: bool = True
    tuple_independent: bool = True
    monotone: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"Unknown ranking function kind {self.kind!r}")
        if self.kind == "linear":
            if not self.weights:
                raise ConfigError("linear ranking needs weights")
        elif self.kind == "power_geomean":
            if not self.exponents:
                raise ConfigError("power_geomean ranking needs exponents")
            if any(e < 0 for e in self.exponents) or sum(self.exponents) <= 0:
                raise ConfigError("power_geomean exponents must be non-negative with a positive sum")
        elif not self.command:
            raise ConfigError("external ranking needs a command")
        if self.is_declarative:
            params = self.weights if self.kind == "linear" else self.exponents
            object.__setattr__(self, "score_based", True)
            object.__setattr__(self, "tuple_independent", True)
            object.__setattr__(self, "monotone", all(p >= 0 for p in params))

    @classmethod
    def linear(cls, weights) -> RankingFunctionSpec:
        return cls(kind="linear", weights=tuple(float(w) for w in weights))

    @classmethod
    def power_geomean(cls, exponents, offset: float = 1.0) -> RankingFunctionSpec:
        return cls(kind="power_geomean", exponents=tuple(float(e) for e in exponents), offset=float(offset))

    @classmethod
    def external(cls, command, score_based=False, tuple_independent=False, monotone=False) -> RankingFunctionSpec:
        return cls(
            kind="external",
            command=tuple(command),
            score_based=score_based,
            tuple_independent=tuple_independent,
            monotone=monotone,
        )

    @property
    def is_declarative(self) -> bool:
        return self.kind != "external"

    @property
    def root(self) -> float:
        return float(sum(self.exponents)) if self.exponents else 1.0

    @property
    def arity(self) -> Optional[int]:
        params = self.weights if self.kind == "linear" else self.exponents
        return len(params) if params else None


@dataclass(frozen=True)
class Ranking:
    """Tuple ids best-first. Positions are 0-based; `display_position` is 1-based."""

    order: Tuple[str, ...]
    scores: Optional[Tuple[float, ...]] = None
    _positions: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        positions = {tid: i for i, tid in enumerate(self.order)}
        if len(positions) != len(self.order):
            raise IntegrityError("Ranking repeats a tuple id")
        object.__setattr__(self, "_positions", positions)

    def __len__(self) -> int:
        return len(self.order)

    def position(self, tuple_id: str) -> int:
        try:
            return self._positions[tuple_id]
        except KeyError:
            raise TupleNotFoundError(f"No tuple with id {tuple_id!r} in ranking") from None

    def display_position(self, tuple_id: str) -> int:
        return self.position(tuple_id) + 1

    def at(self, position: int) -> Optional[str]:
        if 0 <= position < len(self.order):
            return self.order[position]
        return None
