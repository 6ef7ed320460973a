"""Flags and loaders shared by the subcommands."""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Optional, Tuple

import pandas as pd

from lstab import config as settings
from lstab.dataset import load_spec, load_table
from lstab.engine import EngineConfig
from lstab.errors import ConfigError
from lstab.geometry import ReasonableChanges
from lstab.models import Dataset, RankingFunctionSpec
from lstab.seed import FIXTURES, fixture_paths


def add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="CSV file, or a shipped fixture name (table1, csrankings)")
    p.add_argument("--id-column", default="id")
    p.add_argument("--attrs", default=None, help="Comma-separated attribute columns (default: all numeric)")


def add_func_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--func", required=True, help="Ranking function JSON, or a fixture name")


def add_rc_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--rc",
        default=f"pct={settings.DEFAULT_RC_PCT:g}",
        help="attr=value pairs, pct=P (P%% of each attribute range) or one number for every attribute",
    )


def add_seed_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)


def add_out_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="Write the report here instead of stdout")


def add_engine_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eta", type=float, default=settings.ETA)
    p.add_argument("--delta", type=float, default=settings.DELTA)
    p.add_argument("--alpha", type=float, default=settings.ALPHA_TARGET)
    p.add_argument("--tau-v", type=float, default=settings.TAU_V)
    p.add_argument("--iters", type=int, default=settings.MAX_ITERATIONS)
    p.add_argument("--per-iter", type=int, default=settings.CONSTRUCTION_SAMPLES_PER_ITER)
    p.add_argument("--volume-samples", type=int, default=settings.VOLUME_SAMPLES)
    p.add_argument("--max-tries", type=int, default=settings.REJECTION_MAX_TRIES)
    p.add_argument("--budget-mode", choices=["fixed", "apportioned"], default="fixed")
    p.add_argument("--total-budget", type=int, default=settings.CONSTRUCTION_BUDGET_TOTAL)
    p.add_argument("--workers", type=int, default=settings.WORKERS)
    p.add_argument("--no-reduce-rc", action="store_true")
    p.add_argument("--no-fast-rerank", action="store_true")
    p.add_argument("--no-iterative", action="store_true")


def _resolve(value: str, slot: int) -> Path:
    path = Path(value)
    if path.exists():
        return path
    if value in FIXTURES:
        return fixture_paths(value)[slot]
    raise ConfigError(f"No such file: {value}")


def load_data(args) -> Tuple[Dataset, pd.DataFrame]:
    attrs = [a.strip() for a in args.attrs.split(",")] if args.attrs else None
    return load_table(_resolve(args.data, 0), args.id_column, attrs)


def load_func(args, d: Dataset) -> RankingFunctionSpec:
    return load_spec(_resolve(args.func, 1), d.schema)


def _number(text: str, what: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"Bad number {text!r} for {what}") from None
    if not math.isfinite(value) or value < 0:
        raise ConfigError(f"{what} must be a finite non-negative number, got {text!r}")
    return value


def parse_rc(text: str, d: Dataset) -> ReasonableChanges:
    """RCSPEC: `5`, `pct=5`, `AI=2,Sys=1` or a mix such as `pct=5,AI=2`.

    Attributes not named in a pairs-only spec are held fixed (eps_max 0).
    """
    text = (text or "").strip()
    if not text:
        raise ConfigError("Empty RC spec")
    names = d.schema.names
    if "=" not in text:
        value = _number(text, "rc")
        return ReasonableChanges(tuple(value for _ in names))

    pct = None
    pairs = {}
    for part in text.split(","):
        if "=" not in part:
            raise ConfigError(f"Bad RC item {part!r}; expected attr=value or pct=P")
        key, raw = (s.strip() for s in part.rsplit("=", 1))
        value = _number(raw, key)
        if key == "pct" and "pct" not in names:
            pct = value
        elif key in names:
            pairs[key] = value
        else:
            raise ConfigError(f"Unknown attribute {key!r} in RC spec; expected one of {list(names)}")

    if pct is None:
        eps = [0.0] * len(names)
    else:
        eps = [pct / 100.0 * float(r) for r in d.column_ranges()]
    for key, value in pairs.items():
        eps[names.index(key)] = value
    return ReasonableChanges(tuple(eps))


def engine_config(args, k: int, rc: ReasonableChanges) -> EngineConfig:
    return EngineConfig(
        k=k,
        rc=rc,
        construction_samples_per_iter=args.per_iter,
        max_iterations=args.iters,
        eta=args.eta,
        delta=args.delta,
        alpha_target=args.alpha,
        tau_v=args.tau_v,
        volume_samples=args.volume_samples,
        rejection_max_tries=args.max_tries,
        seed=args.seed,
        rc_reduction=not args.no_reduce_rc,
        fast_rerank=not args.no_fast_rerank,
        iterative=not args.no_iterative,
        budget_mode=args.budget_mode,
        construction_budget_total=args.total_budget,
        workers=args.workers,
    )


def emit(text: str, out: Optional[str] = None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
