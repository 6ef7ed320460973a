import sys
from pathlib import Path

import numpy as np
import pytest

from lstab.models import AttributeSchema, DataTuple, Dataset, RankingFunctionSpec
from lstab.seed import load_csrankings, load_table1

HELPERS = Path(__file__).resolve().parent / "helpers"


def make_dataset(rows, names=("x1", "x2")):
    """rows: {id: values}"""
    schema = AttributeSchema(tuple(names))
    return Dataset(schema, tuple(DataTuple(tid, tuple(float(v) for v in values)) for tid, values in rows.items()))


@pytest.fixture
def table1():
    return load_table1()


@pytest.fixture
def csrankings():
    return load_csrankings()


@pytest.fixture
def pair():
    """t=(0,0) below other=(0.5,0.5) under x1 + x2; the swap happens once t gains more than 1."""
    d = make_dataset({"t": (0, 0), "other": (0.5, 0.5)})
    return d, RankingFunctionSpec.linear((1, 1))


@pytest.fixture
def chain():
    """Ten tuples, each one unit ahead of the next in both attributes."""
    d = make_dataset({f"c{i}": (10 - i, 10 - i) for i in range(10)})
    return d, RankingFunctionSpec.linear((1, 1))


@pytest.fixture
def sum_ranker():
    return [sys.executable, str(HELPERS / "sum_ranker.py")]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
