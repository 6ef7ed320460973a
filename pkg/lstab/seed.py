"""Shipped fixture datasets and their ranking functions."""
from pathlib import Path
from typing import Tuple

from lstab.config import FIXTURE_DIR
from lstab.dataset import load_dataset, load_spec
from lstab.errors import ConfigError
from lstab.models import Dataset, RankingFunctionSpec

# name -> (data file, ranking spec file)
FIXTURES = {
    "table1": ("table1.csv", "table1_spec.json"),
    "csrankings": ("csrankings_top10.csv", "csrankings_spec.json"),
}


def fixture_paths(name: str) -> Tuple[Path, Path]:
    try:
        data, spec = FIXTURES[name]
    except KeyError:
        raise ConfigError(f"Unknown fixture {name!r}; expected one of {sorted(FIXTURES)}") from None
    return FIXTURE_DIR / data, FIXTURE_DIR / spec


def load_fixture(name: str) -> Tuple[Dataset, RankingFunctionSpec]:
    data_path, spec_path = fixture_paths(name)
    d = load_dataset(data_path)
    return d, load_spec(spec_path, d.schema)


def load_table1() -> Tuple[Dataset, RankingFunctionSpec]:
    return load_fixture("table1")


def load_csrankings() -> Tuple[Dataset, RankingFunctionSpec]:
    return load_fixture("csrankings")
