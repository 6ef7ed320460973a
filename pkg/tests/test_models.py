import math

import pytest

from conftest import make_dataset
from lstab.errors import ConfigError, DimensionError, DomainError, IntegrityError, SchemaError, TupleNotFoundError
from lstab.models import AttributeSchema, DataTuple, Dataset, Ranking, RankingFunctionSpec


def test_schema_rejects_duplicates_and_empty():
    with pytest.raises(SchemaError):
        AttributeSchema(("a", "a"))
    with pytest.raises(SchemaError):
        AttributeSchema(())
    assert AttributeSchema(("a", "b")).n == 2


def test_tuple_values_must_be_finite():
    with pytest.raises(DomainError):
        DataTuple("x", (1.0, math.nan))
    with pytest.raises(DomainError):
        DataTuple("x", (math.inf,))


def test_dataset_invariants():
    schema = AttributeSchema(("a", "b"))
    with pytest.raises(IntegrityError):
        Dataset(schema, ())
    with pytest.raises(IntegrityError):
        Dataset(schema, (DataTuple("x", (1, 2)), DataTuple("x", (3, 4))))
    with pytest.raises(DimensionError):
        Dataset(schema, (DataTuple("x", (1,)),))


def test_dataset_replace_keeps_row_order():
    d = make_dataset({"a": (1, 1), "b": (2, 2), "c": (3, 3)})
    d2 = d.replace(DataTuple("b", (9.0, 9.0)))
    assert d2.ids == ("a", "b", "c")
    assert d2.get("b").values == (9.0, 9.0)
    assert d.get("b").values == (2.0, 2.0)
    with pytest.raises(TupleNotFoundError):
        d.replace(DataTuple("zz", (0.0, 0.0)))


def test_dataset_matrix_is_read_only():
    d = make_dataset({"a": (1, 2)})
    with pytest.raises(ValueError):
        d.matrix[0, 0] = 5


def test_declarative_flags_are_derived():
    spec = RankingFunctionSpec.linear((1, -1))
    assert spec.score_based and spec.tuple_independent
    assert not spec.monotone
    assert RankingFunctionSpec.power_geomean((5, 12)).monotone


def test_power_geomean_exponents_validated():
    with pytest.raises(ConfigError):
        RankingFunctionSpec.power_geomean((1, -1))
    with pytest.raises(ConfigError):
        RankingFunctionSpec.power_geomean((0, 0))
    assert RankingFunctionSpec.power_geomean((5, 12)).root == 17


def test_external_flags_are_trusted():
    spec = RankingFunctionSpec.external(["ranker"], score_based=False, tuple_independent=True)
    assert spec.tuple_independent and not spec.score_based and not spec.monotone
    with pytest.raises(ConfigError):
        RankingFunctionSpec.external([])


def test_ranking_positions():
    r = Ranking(("b", "a", "c"))
    assert r.position("a") == 1
    assert r.display_position("a") == 2
    assert r.at(0) == "b" and r.at(3) is None and r.at(-1) is None
    with pytest.raises(IntegrityError):
        Ranking(("a", "a"))
    with pytest.raises(TupleNotFoundError):
        r.position("z")
