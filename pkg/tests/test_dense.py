import numpy as np
import pytest

from lstab.dense import curve_from_samples, detect_dense_region, jenks_two_class, stability_curve
from lstab.errors import ConfigError
from lstab.geometry import ReasonableChanges
from lstab.models import RankingFunctionSpec
from lstab.sampling import substream
from lstab.synthetic import generate_dense_dataset


def pct5(d):
    return ReasonableChanges.from_fraction_of_range(d.column_ranges(), 0.05)


def test_curve_keeps_dominating_stable_samples_in_the_pool():
    mags = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0], [0.5, 0.5]])
    curve = curve_from_samples(mags, np.array([2, 1, 0, 0]))
    assert curve.k_star == 2
    assert curve.estimates == pytest.approx((0.25, 0.25, 1.0))
    assert curve[2] == 1.0
    assert curve.as_dict() == {0: curve[0], 1: curve[1], 2: 1.0}


def test_curve_without_unstable_samples():
    curve = curve_from_samples(np.zeros((5, 2)), np.zeros(5))
    assert curve.k_star == 0
    assert curve.estimates == (1.0,)
    assert curve_from_samples(np.zeros((0, 2)), np.zeros(0)).estimates == (1.0,)


def test_jenks_examples():
    split = jenks_two_class([0.8, 0.1, 0.1])
    assert split.small == (0.1, 0.1)
    assert split.large == (0.8,)
    assert split.threshold == 0.8

    # both breaks cost 0.5; the first one wins
    assert jenks_two_class([0.0, 1.0, 2.0]).large == (1.0, 2.0)

    flat = jenks_two_class([0.5, 0.5])
    assert flat.large == () and flat.threshold is None
    assert jenks_two_class([]).small == ()


def test_curve_is_non_decreasing_and_differences_sum_to_one(table1):
    d, spec = table1
    report = detect_dense_region(spec, d, "t5", pct5(d), N=5000, rng=substream(0, "curve"))
    est = np.array(report.curve.estimates)
    assert (np.diff(est) >= 0).all()
    assert est[-1] == 1.0
    assert sum(report.differences) == pytest.approx(1.0)
    assert len(report.differences) == report.k_star + 1
    assert sorted(report.small + report.large) == list(range(report.k_star + 1))
    assert 0 <= report.k <= report.k_star


@pytest.mark.parametrize("tid", ["CMU", "UIUC", "UCSD", "MIT"])
def test_csrankings_leaders_have_no_dense_region(csrankings, tid):
    d, spec = csrankings
    report = detect_dense_region(spec, d, tid, pct5(d), rng=substream(0, "curve"))
    assert report.k_star == 0
    assert report.k == 0


def test_stanford_sits_in_a_dense_region(csrankings):
    d, spec = csrankings
    report = detect_dense_region(spec, d, "Stanford", pct5(d), rng=substream(0, "curve"))
    assert report.k_star == 2
    assert report.k == 1


def test_rc_outside_the_geomean_domain(table1):
    d, spec = table1
    with pytest.raises(ConfigError, match="t10"):
        detect_dense_region(spec, d, "t10", ReasonableChanges((7.6, 5.2)), N=100, rng=substream(0, "curve"))


def test_same_rng_same_curve(table1):
    d, spec = table1
    first = stability_curve(spec, d, "t6", pct5(d), 3000, substream(4, "curve"))
    second = stability_curve(spec, d, "t6", pct5(d), 3000, substream(4, "curve"))
    assert first == second


def test_largest_change_matches_synthetic_regions():
    bench = generate_dense_dataset(n_tuples=40, seed=0)
    spec = RankingFunctionSpec.linear((1, 1))
    for tid, truth in bench.ground_truth.items():
        assert truth.k is not None, tid
        report = detect_dense_region(spec, bench.dataset, tid, bench.rc, rng=substream(0, "curve"))
        assert report.k_star == truth.k, tid
        assert report.k <= report.k_star


@pytest.mark.slow
def test_recovers_the_default_benchmark_regions():
    bench = generate_dense_dataset(seed=0)
    spec = RankingFunctionSpec.linear((1, 1))
    hits = sum(
        detect_dense_region(spec, bench.dataset, tid, bench.rc, rng=substream(0, "curve")).k == truth.k
        for tid, truth in bench.ground_truth.items()
    )
    assert hits >= 95
