"""External ranking process: dataset CSV on stdin, ranked ids on stdout."""
from __future__ import annotations

import logging
import subprocess
from typing import Sequence, Tuple

from lstab.config import EXTERNAL_TIMEOUT
from lstab.dataset import dataset_to_csv
from lstab.errors import RankingError
from lstab.models import Dataset

logger = logging.getLogger(__name__)


def run_ranking_process(command: Sequence[str], d: Dataset, timeout: float = EXTERNAL_TIMEOUT) -> Tuple[str, ...]:
    """Invoke the ranker once and return its order, validated against d's ids."""
    payload = dataset_to_csv(d)
    try:
        result = subprocess.run(
            list(command),
            input=payload,
            capture_output=True,
            text=True,
            encoding="utf-8",
            timeout=timeout,
        )
    except subprocess.TimeoutExpired as e:
        raise RankingError(f"Ranking process timed out after {timeout}s: {list(command)}") from e
    except OSError as e:
        raise RankingError(f"Could not start ranking process {list(command)}: {e}") from e

    if result.returncode != 0:
        stderr = (result.stderr or "").strip()[:500]
        raise RankingError(f"Ranking process exited with status {result.returncode}: {stderr}")

    order = tuple(line.strip() for line in result.stdout.splitlines() if line.strip())
    _check_order(order, d)
    logger.debug("External ranking of %d tuples ok", len(order))
    return order


def _check_order(order: Tuple[str, ...], d: Dataset) -> None:
    expected = set(d.ids)
    seen = set()
    repeated = []
    for tid in order:
        if tid in seen:
            repeated.append(tid)
        seen.add(tid)
    missing = expected - seen
    unknown = seen - expected
    if repeated or missing or unknown:
        parts = []
        if missing:
            parts.append(f"missing {sorted(missing)[:5]}")
        if repeated:
            parts.append(f"repeated {repeated[:5]}")
        if unknown:
            parts.append(f"unknown {sorted(unknown)[:5]}")
        raise RankingError("Malformed ranking output: " + "; ".join(parts))
