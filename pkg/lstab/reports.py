"""Deterministic report rendering: fixed key order, floats at 6 significant digits."""
from __future__ import annotations

import json
import math
from dataclasses import asdict
from typing import Any, Dict, Iterable, Optional

import numpy as np
import pandas as pd

from lstab.dataset import dataset_frame
from lstab.dense import DenseRegionReport
from lstab.engine import EngineConfig, StabilityReport
from lstab.models import Dataset, Ranking, RankingFunctionSpec
from lstab.oracle import FlagAudit, GridResult


def _round(x: float) -> Optional[float]:
    if not math.isfinite(x):
        return None
    return float(f"{x:.6g}")


def clean(value: Any) -> Any:
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _round(float(value))
    if isinstance(value, np.ndarray):
        return clean(value.tolist())
    if isinstance(value, dict):
        return {str(k): clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [clean(v) for v in value]
    return value


def to_json(payload: Dict[str, Any]) -> str:
    return json.dumps(clean(payload), indent=2, ensure_ascii=False) + "\n"


def config_dict(config: EngineConfig) -> Dict[str, Any]:
    raw = asdict(config)
    raw["rc"] = list(config.rc.eps_max)
    return raw


def stability_dict(report: StabilityReport) -> Dict[str, Any]:
    return {
        "tuple_id": report.tuple_id,
        "k": report.k,
        "estimate": report.estimate,
        "alpha": report.alpha,
        "delta": report.delta,
        "eta": report.eta,
        "iterations_used": report.iterations_used,
        "construction_samples": report.construction_samples,
        "verification_samples": report.verification_samples,
        "verification_skipped": report.verification_skipped,
        "converged": report.converged,
        "stop_reason": report.stop_reason,
        "boundary": report.boundary.to_list(),
        "rc": list(report.config.rc.eps_max),
        "rc_effective": list(report.rc_effective.eps_max),
        "scale_factor": report.scale_factor,
        "zone_fraction": report.zone_fraction,
        "seed": report.seed,
        "workers": report.config.workers,
        "config": config_dict(report.config),
    }


SWEEP_COLUMNS = [
    "k",
    "estimate",
    "alpha",
    "iterations_used",
    "construction_samples",
    "verification_samples",
    "verification_skipped",
    "converged",
    "stop_reason",
    "scale_factor",
    "boundary_size",
]


def sweep_frame(reports: Iterable[StabilityReport]) -> pd.DataFrame:
    rows = []
    for r in reports:
        rows.append({
            "k": r.k,
            "estimate": r.estimate,
            "alpha": r.alpha,
            "iterations_used": r.iterations_used,
            "construction_samples": r.construction_samples,
            "verification_samples": r.verification_samples,
            "verification_skipped": r.verification_skipped,
            "converged": r.converged,
            "stop_reason": r.stop_reason,
            "scale_factor": r.scale_factor,
            "boundary_size": len(r.boundary),
        })
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def sweep_csv(reports: Iterable[StabilityReport]) -> str:
    return sweep_frame(reports).to_csv(index=False, float_format="%.6g", lineterminator="\n")


def sweep_jsonl(reports: Iterable[StabilityReport]) -> str:
    return "".join(json.dumps(clean(stability_dict(r)), ensure_ascii=False) + "\n" for r in reports)


def dense_dict(report: DenseRegionReport, seed: int, tuple_id: Optional[str] = None) -> Dict[str, Any]:
    payload: Dict[str, Any] = {}
    if tuple_id is not None:
        payload["tuple_id"] = tuple_id
    payload.update({
        "k": report.k,
        "k_star": report.k_star,
        "curve": list(report.curve.estimates),
        "differences": list(report.differences),
        "clusters": {"small": list(report.small), "large": list(report.large)},
        "seed": seed,
    })
    return payload


def grid_dict(result: GridResult, tuple_id: str, k: int, rc, grid: int) -> Dict[str, Any]:
    return {
        "tuple_id": tuple_id,
        "k": k,
        "grid_points_per_dim": grid,
        "rc": list(rc.eps_max),
        "stability": result.stability,
        "cells": result.cells,
        "unstable_cells": result.unstable_cells,
        "boundary": result.boundary.to_list(),
    }


def global_dict(value: float, samples: int, seed: int) -> Dict[str, Any]:
    return {"global_stability": value, "samples": samples, "seed": seed}


def flags_dict(audit: FlagAudit, spec: RankingFunctionSpec, rc, seed: int) -> Dict[str, Any]:
    return {
        "kind": spec.kind,
        "declared": {
            "score_based": spec.score_based,
            "tuple_independent": spec.tuple_independent,
            "monotone": spec.monotone,
        },
        "samples": audit.samples,
        "violations": {
            "subset_order": audit.subset_violations,
            "other_tuples_reordered": audit.order_violations,
            "raised_attribute_moved_down": audit.monotone_violations,
        },
        "contradicted": list(audit.contradicted(spec)),
        "rc": list(rc.eps_max),
        "seed": seed,
    }


_JOIN_KEY = "__tuple_id"


def ranking_frame(
    ranking: Ranking,
    d: Dataset,
    labels: Optional[pd.DataFrame] = None,
    id_column: str = "id",
) -> pd.DataFrame:
    """One row per tuple, best first: position (1-based), id, score, then the input columns.

    Input columns that clash with position, id or score get an `_input` suffix.
    """
    frame = pd.DataFrame({"position": range(1, len(ranking) + 1), "id": list(ranking.order)})
    frame["score"] = list(ranking.scores) if ranking.scores is not None else None
    if labels is None:
        labels, id_column = dataset_frame(d), "id"
    extra = labels.copy()
    extra[_JOIN_KEY] = extra[id_column].astype(str).str.strip()
    extra = extra.drop(columns=[id_column])
    extra = extra.rename(columns={c: f"{c}_input" for c in extra.columns if c in frame.columns})
    merged = frame.assign(**{_JOIN_KEY: frame["id"]}).merge(extra, on=_JOIN_KEY, how="left", sort=False)
    return merged.drop(columns=[_JOIN_KEY])


def ranking_csv(
    ranking: Ranking,
    d: Dataset,
    labels: Optional[pd.DataFrame] = None,
    id_column: str = "id",
) -> str:
    return ranking_frame(ranking, d, labels, id_column).to_csv(index=False, float_format="%.6g", lineterminator="\n")
