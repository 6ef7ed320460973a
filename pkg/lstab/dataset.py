"""CSV ingestion/emission and ranking-function spec files."""
from __future__ import annotations

import io
import json
import logging
import math
import shlex
from pathlib import Path
from typing import IO, Iterable, Optional, Sequence, Tuple, Union

import pandas as pd

from lstab.errors import ConfigError, IntegrityError, ParseError, SchemaError
from lstab.models import AttributeSchema, DataTuple, Dataset, RankingFunctionSpec

logger = logging.getLogger(__name__)

Source = Union[str, Path, IO[bytes], IO[str]]

SPEC_KEYS = {"kind", "weights", "exponents", "offset", "command", "score_based", "tuple_independent", "monotone"}


def _read_frame(source: Source) -> pd.DataFrame:
    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False, encoding="utf-8", skipinitialspace=False)
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise ParseError(f"Could not read CSV: {e}") from e
    frame.columns = [str(c).strip() for c in frame.columns]
    return frame


def _parse_cell(cell: str, row: int, column: str) -> float:
    try:
        value = float(cell)
    except (TypeError, ValueError):
        raise ParseError(f"Not a number: {cell!r}", row=row, column=column) from None
    if not math.isfinite(value):
        raise ParseError(f"Not a finite number: {cell!r}", row=row, column=column)
    return value


def _numeric_columns(frame: pd.DataFrame, exclude: str) -> list:
    numeric = []
    for column in frame.columns:
        if column == exclude:
            continue
        parsed = pd.to_numeric(frame[column], errors="coerce")
        if parsed.notna().all():
            numeric.append(column)
        else:
            logger.debug("Ignoring non-numeric column %r", column)
    return numeric


def load_dataset(
    source: Source,
    id_column: str = "id",
    attribute_columns: Optional[Sequence[str]] = None,
) -> Dataset:
    """Read a headed CSV. When attribute_columns is None every numeric column except the id is used."""
    return dataset_from_frame(_read_frame(source), id_column, attribute_columns)


def load_table(
    source: Source,
    id_column: str = "id",
    attribute_columns: Optional[Sequence[str]] = None,
) -> Tuple[Dataset, pd.DataFrame]:
    """The Dataset plus the raw text frame, for output that echoes non-attribute columns."""
    frame = _read_frame(source)
    return dataset_from_frame(frame, id_column, attribute_columns), frame


def dataset_from_frame(
    frame: pd.DataFrame,
    id_column: str = "id",
    attribute_columns: Optional[Sequence[str]] = None,
) -> Dataset:
    if id_column not in frame.columns:
        raise SchemaError(f"Missing id column {id_column!r}; CSV has {list(frame.columns)}")
    if attribute_columns is None:
        attribute_columns = _numeric_columns(frame, id_column)
    attribute_columns = list(attribute_columns)
    if not attribute_columns:
        raise SchemaError("No attribute columns selected.")
    missing = [c for c in attribute_columns if c not in frame.columns]
    if missing:
        raise SchemaError(f"Missing attribute columns {missing}; CSV has {list(frame.columns)}")

    schema = AttributeSchema(tuple(attribute_columns))
    tuples = []
    seen = set()
    # Row numbers are 1-based file lines: the header is line 1.
    for offset, record in enumerate(frame.itertuples(index=False)):
        row = offset + 2
        fields = dict(zip(frame.columns, record))
        tid = str(fields[id_column]).strip()
        if not tid:
            raise ParseError("Empty id", row=row, column=id_column)
        if tid in seen:
            raise IntegrityError(f"Duplicate tuple id {tid!r} at row {row}")
        seen.add(tid)
        values = tuple(_parse_cell(str(fields[c]).strip(), row, c) for c in attribute_columns)
        tuples.append(DataTuple(tid, values))
    if not tuples:
        raise IntegrityError("CSV has a header but no rows.")
    logger.info("Loaded %d tuples over %s", len(tuples), list(schema.names))
    return Dataset(schema, tuple(tuples))


def dataset_frame(d: Dataset) -> pd.DataFrame:
    frame = pd.DataFrame(d.matrix, columns=list(d.schema.names))
    frame.insert(0, "id", list(d.ids))
    return frame


def dataset_to_csv(d: Dataset) -> str:
    """The `id,<attr1>,...,<attrn>` layout fed to external ranking processes."""
    return dataset_frame(d).to_csv(index=False, lineterminator="\n")


def write_dataset(d: Dataset, path: Union[str, Path]) -> None:
    Path(path).write_text(dataset_to_csv(d), encoding="utf-8")


def _positional(params, schema: Optional[AttributeSchema], key: str) -> tuple:
    if isinstance(params, dict):
        if schema is None:
            raise ConfigError(f"{key!r} given by attribute name but no schema to resolve it")
        unknown = set(params) - set(schema.names)
        if unknown:
            raise ConfigError(f"{key!r} names unknown attributes {sorted(unknown)}")
        return tuple(float(params.get(name, 0.0)) for name in schema.names)
    if isinstance(params, Iterable) and not isinstance(params, str):
        return tuple(float(p) for p in params)
    raise ConfigError(f"{key!r} must be a list or an object keyed by attribute")


def spec_from_dict(raw: dict, schema: Optional[AttributeSchema] = None) -> RankingFunctionSpec:
    flat = dict(raw)
    for nested in ("params", "flags"):
        if isinstance(flat.get(nested), dict):
            flat.update(flat.pop(nested))
    unknown = set(flat) - SPEC_KEYS
    if unknown:
        raise ConfigError(f"Unknown ranking spec keys {sorted(unknown)}")
    kind = flat.get("kind")
    if kind == "linear":
        return RankingFunctionSpec.linear(_positional(flat.get("weights"), schema, "weights"))
    if kind == "power_geomean":
        return RankingFunctionSpec.power_geomean(
            _positional(flat.get("exponents"), schema, "exponents"),
            offset=float(flat.get("offset", 1.0)),
        )
    if kind == "external":
        command = flat.get("command")
        if isinstance(command, str):
            command = shlex.split(command)
        if not command:
            raise ConfigError("external ranking spec needs a command")
        return RankingFunctionSpec.external(
            command,
            score_based=bool(flat.get("score_based", False)),
            tuple_independent=bool(flat.get("tuple_independent", False)),
            monotone=bool(flat.get("monotone", False)),
        )
    raise ConfigError(f"Unknown ranking function kind {kind!r}")


def load_spec(source: Union[str, Path, IO[str]], schema: Optional[AttributeSchema] = None) -> RankingFunctionSpec:
    try:
        if isinstance(source, (str, Path)):
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        else:
            raw = json.load(source)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Could not read ranking spec: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("Ranking spec must be a JSON object")
    return spec_from_dict(raw, schema)


def parse_csv_text(text: str, id_column: str = "id", attribute_columns=None) -> Dataset:
    return load_dataset(io.StringIO(text), id_column, attribute_columns)
