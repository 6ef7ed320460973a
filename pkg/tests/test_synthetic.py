import json
from collections import defaultdict

import numpy as np
import pytest

from lstab.dataset import load_dataset
from lstab.errors import DomainError
from lstab.synthetic import generate_dense_dataset, write_benchmark


@pytest.fixture(scope="module")
def bench():
    return generate_dense_dataset(seed=0)


def test_default_benchmark_shape(bench):
    d = bench.dataset
    assert len(d) == 100
    assert d.schema.names == ("x1", "x2")
    assert d.ids[:2] == ("t001", "t002")
    assert bench.rc.eps_max == (2.5, 2.5)
    assert bench.noise_sigma == 0.2
    assert np.allclose(np.diff(bench.region_scores), -10.0)


def test_ids_follow_the_sum_ranking(bench):
    sums = bench.dataset.matrix.sum(axis=1)
    assert (np.diff(sums) <= 0).all()


def test_region_sizes_and_truth(bench):
    members = defaultdict(list)
    for tid in bench.dataset.ids:
        members[bench.ground_truth[tid].region].append(tid)
    assert sum(len(m) for m in members.values()) == 100
    for region, ids in members.items():
        size = len(ids)
        assert 1 <= size <= 6
        for j, tid in enumerate(ids):
            truth = bench.ground_truth[tid]
            assert truth.region_size == size
            assert truth.k == max(j, size - 1 - j)
            assert truth.separated


def test_overlapping_regions_have_no_ground_truth():
    noisy = generate_dense_dataset(seed=0, noise_sigma=4.0)
    truths = list(noisy.ground_truth.values())
    assert any(not gt.separated for gt in truths)
    for gt in truths:
        assert (gt.k is None) == (not gt.separated)

    sums = noisy.dataset.matrix.sum(axis=1)
    regions = np.array([noisy.ground_truth[tid].region for tid in noisy.dataset.ids])
    for gt in truths:
        if not gt.separated:
            continue
        inside = sums[regions == gt.region]
        spread = inside.max() - inside.min()
        if gt.region > 0:
            assert sums[regions == gt.region - 1].min() - inside.max() > spread


def test_single_tuple_regions_have_k_zero():
    single = generate_dense_dataset(n_tuples=12, region_size_range=(1, 1), seed=3)
    assert len(single.region_scores) == 12
    assert all(gt.k == 0 for gt in single.ground_truth.values())


def test_same_seed_same_benchmark():
    a = generate_dense_dataset(n_tuples=30, n_attrs=3, seed=7)
    b = generate_dense_dataset(n_tuples=30, n_attrs=3, seed=7)
    c = generate_dense_dataset(n_tuples=30, n_attrs=3, seed=8)
    assert a.dataset == b.dataset
    assert a.ground_truth == b.ground_truth
    assert a.dataset != c.dataset
    assert a.rc.eps_max == pytest.approx((10 / 6,) * 3)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_tuples": 0},
        {"n_attrs": 0},
        {"margin": 0},
        {"region_size_range": (3, 2)},
        {"region_size_range": (0, 2)},
        {"noise_sigma": -1},
    ],
)
def test_bad_parameters(kwargs):
    with pytest.raises(DomainError):
        generate_dense_dataset(**kwargs)


def test_write_benchmark(tmp_path, bench):
    csv_path, truth_path = write_benchmark(bench, tmp_path / "out" / "bench.csv")
    assert truth_path.name == "bench.truth.json"
    loaded = load_dataset(csv_path)
    assert loaded.ids == bench.dataset.ids
    assert np.allclose(loaded.matrix, bench.dataset.matrix)
    truth = json.loads(truth_path.read_text())
    assert set(truth) == set(bench.dataset.ids)
    assert truth["t001"]["k"] == bench.ground_truth["t001"].k
    assert set(truth["t001"]) == {"region", "region_size", "k", "separated"}
