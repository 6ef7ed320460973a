"""Synthetic benchmark: tuples grouped into dense regions with known extents."""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np

from lstab.config import DEFAULT_SEED
from lstab.dataset import write_dataset
from lstab.errors import DomainError
from lstab.geometry import ReasonableChanges
from lstab.models import AttributeSchema, DataTuple, Dataset
from lstab.sampling import substream

logger = logging.getLogger(__name__)

# Default noise is margin / NOISE_DIVISOR. The spread of a 6-tuple region must
# stay well inside the RC reach of margin / 2 along the sum.
NOISE_DIVISOR = 50.0


@dataclass(frozen=True)
class GroundTruth:
    region: int
    region_size: int
    k: Optional[int]
    separated: bool


@dataclass(frozen=True)
class SyntheticBenchmark:
    dataset: Dataset
    ground_truth: Dict[str, GroundTruth]
    rc: ReasonableChanges
    region_scores: Tuple[float, ...]
    margin: float
    noise_sigma: float
    seed: int


def _check(n_tuples, n_attrs, margin, region_size_range, noise_sigma) -> None:
    lo, hi = region_size_range
    if n_tuples < 1:
        raise DomainError(f"n_tuples must be positive, got {n_tuples}")
    if n_attrs < 1:
        raise DomainError(f"n_attrs must be positive, got {n_attrs}")
    if not margin > 0:
        raise DomainError(f"margin must be positive, got {margin}")
    if lo < 1 or hi < lo:
        raise DomainError(f"Region sizes need 1 <= low <= high, got {region_size_range}")
    if noise_sigma is not None and noise_sigma < 0:
        raise DomainError(f"noise_sigma must be non-negative, got {noise_sigma}")


def _separated(sums: np.ndarray, labels: np.ndarray, r: int, regions: int) -> bool:
    inside = sums[labels == r]
    spread = inside.max() - inside.min()
    gaps = []
    if r > 0:
        gaps.append(sums[labels == r - 1].min() - inside.max())
    if r < regions - 1:
        gaps.append(inside.min() - sums[labels == r + 1].max())
    return all(gap > spread for gap in gaps)


def generate_dense_dataset(
    n_tuples: int = 100,
    n_attrs: int = 2,
    margin: float = 10.0,
    region_size_range: Tuple[int, int] = (2, 6),
    noise_sigma: Optional[float] = None,
    seed: int = DEFAULT_SEED,
) -> SyntheticBenchmark:
    """Regions of 2-6 tuples whose mean sums step down by `margin`.

    Tuples of a region are Gaussian around (score / d) in every attribute with
    standard deviation noise_sigma (default margin / 50). Ids t001, t002, ...
    follow the ranking by attribute sum. A tuple's ground-truth k is only set
    when its region is separated: both gaps to the neighbouring regions exceed
    the spread of sums inside it.
    """
    _check(n_tuples, n_attrs, margin, region_size_range, noise_sigma)
    sigma = margin / NOISE_DIVISOR if noise_sigma is None else float(noise_sigma)
    rng = substream(seed, "synth")

    sizes = []
    while sum(sizes) < n_tuples:
        size = int(rng.integers(region_size_range[0], region_size_range[1] + 1))
        sizes.append(min(size, n_tuples - sum(sizes)))
    regions = len(sizes)
    scores = tuple(float(margin * (regions - r)) for r in range(regions))

    values = []
    labels = []
    for r, size in enumerate(sizes):
        mean = np.full(n_attrs, scores[r] / n_attrs)
        values.append(rng.normal(mean, sigma, size=(size, n_attrs)))
        labels.extend([r] * size)
    values = np.vstack(values)
    labels = np.asarray(labels)

    order = np.argsort(-values.sum(axis=1), kind="stable")
    values, labels = values[order], labels[order]
    width = max(3, len(str(n_tuples)))
    ids = [f"t{i + 1:0{width}d}" for i in range(n_tuples)]

    schema = AttributeSchema(tuple(f"x{j + 1}" for j in range(n_attrs)))
    dataset = Dataset(schema, tuple(DataTuple(tid, tuple(float(v) for v in row)) for tid, row in zip(ids, values)))

    sums = values.sum(axis=1)
    truth: Dict[str, GroundTruth] = {}
    for r, size in enumerate(sizes):
        rows = np.flatnonzero(labels == r)
        separated = _separated(sums, labels, r, regions)
        for j, row in enumerate(rows):
            k = max(j, size - 1 - j) if separated else None
            truth[ids[row]] = GroundTruth(r, size, k, separated)

    rc = ReasonableChanges(tuple(margin / (2.0 * n_attrs) for _ in range(n_attrs)))
    logger.info("Generated %d tuples in %d regions (margin %g, sigma %g)", n_tuples, regions, margin, sigma)
    return SyntheticBenchmark(dataset, truth, rc, scores, float(margin), sigma, int(seed))


def truth_payload(bench: SyntheticBenchmark) -> dict:
    return {tid: asdict(gt) for tid, gt in bench.ground_truth.items()}


def write_benchmark(bench: SyntheticBenchmark, out: Union[str, Path]) -> Tuple[Path, Path]:
    """Write `<out>` as CSV and `<out stem>.truth.json` next to it."""
    csv_path = Path(out)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    truth_path = csv_path.with_name(csv_path.stem + ".truth.json")
    write_dataset(bench.dataset, csv_path)
    truth_path.write_text(json.dumps(truth_payload(bench), indent=2) + "\n", encoding="utf-8")
    return csv_path, truth_path
