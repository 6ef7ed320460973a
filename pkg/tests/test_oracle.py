import numpy as np
import pytest

from lstab.engine import EngineConfig, lstability
from lstab.errors import DimensionError, DomainError, GridSizeError
from lstab.geometry import Boundary, ReasonableChanges
from lstab.models import RankingFunctionSpec
from lstab.oracle import FlagAudit, audit_boundary, audit_flags, global_stability_2d, grid_oracle, grid_stability
from lstab.sampling import substream
from lstab.synthetic import generate_dense_dataset

from conftest import make_dataset

UNIT = ReasonableChanges((1.0, 1.0))


def test_pair_grid_is_half(pair):
    d, spec = pair
    result = grid_oracle(spec, d, "t", 0, UNIT, 201)
    assert result.cells == 201 * 201
    assert result.stability == pytest.approx(0.5, abs=0.015)
    assert result.unstable_cells > 0
    assert (result.boundary.points.sum(axis=1) > 1 - 1e-9).all()


def test_fixed_attribute_collapses_to_one_point(pair):
    d, spec = pair
    result = grid_oracle(spec, d, "t", 0, ReasonableChanges((2.0, 0.0)), 101)
    assert result.cells == 101
    # x in [-2, 2] is stable up to x = 1
    assert result.stability == pytest.approx(0.5, abs=0.02)


def test_grid_limits(csrankings, table1):
    d, spec = csrankings
    with pytest.raises(GridSizeError):
        grid_oracle(spec, d, "CMU", 0, ReasonableChanges((1.0,) * 4), 11)
    d, spec = table1
    with pytest.raises(GridSizeError):
        grid_oracle(spec, d, "t1", 0, ReasonableChanges((1.0, 1.0)), 5000)
    with pytest.raises(GridSizeError):
        grid_oracle(spec, d, "t1", 0, ReasonableChanges((1.0, 1.0)), 0)


def test_fast_and_full_rerank_grids_agree(table1):
    d, spec = table1
    rc = ReasonableChanges((3.0, 3.0))
    assert grid_stability(spec, d, "t5", 1, rc, 41, fast_rerank=True) == grid_stability(spec, d, "t5", 1, rc, 41)


def test_grid_stability_never_drops_with_k(table1):
    d, spec = table1
    rc = ReasonableChanges((1.9, 1.3))
    curve = [grid_stability(spec, d, "t6", k, rc, 61) for k in range(len(d))]
    assert all(b >= a for a, b in zip(curve, curve[1:]))
    assert curve[-1] == 1.0


def test_audit_of_an_unsampleable_zone(pair):
    d, spec = pair
    sb = Boundary(np.zeros((1, 2)))
    assert audit_boundary(spec, d, "t", 0, UNIT, sb, 1000, substream(0, "audit")) is None


def test_audit_without_boundary_sees_the_unstable_corner(pair):
    d, spec = pair
    rate = audit_boundary(spec, d, "t", 0, UNIT, Boundary.empty(2), 40_000, substream(0, "audit"))
    assert rate == pytest.approx(0.125, abs=0.01)


def test_flag_audit_of_declarative_specs(table1, chain):
    d, _ = table1
    assert audit_flags(RankingFunctionSpec.linear((1, 1)), d, 50, substream(0, "flags")) == FlagAudit(50, 0, 0, 0)

    # all chain scores tie at 0; raising x2 drops the tuple to the bottom
    d, _ = chain
    tilted = RankingFunctionSpec.linear((1, -1))
    audit = audit_flags(tilted, d, 50, substream(0, "flags"), rc=ReasonableChanges((5.0, 5.0)))
    assert audit.monotone_violations > 0
    assert audit.order_violations == audit.subset_violations == 0
    assert audit.contradicted(tilted) == ()


def test_flag_audit_passes_an_honest_external_ranker(table1, sum_ranker):
    d, _ = table1
    declared = RankingFunctionSpec.external(sum_ranker, score_based=True, tuple_independent=True, monotone=True)
    audit = audit_flags(declared, d, 3, substream(0, "flags"))
    assert audit == FlagAudit(3, 0, 0, 0)
    assert audit.contradicted(declared) == ()


def test_flag_audit_catches_a_ranker_that_depends_on_other_tuples(sum_ranker):
    # b/c and a/d sit symmetrically around the mean sum, so any shift of the
    # mean in one direction reorders one of those pairs
    d = make_dataset({"a": (0, 0), "b": (2, 0), "c": (10, 0), "d": (12, 0)})
    declared = RankingFunctionSpec.external(sum_ranker + ["--centered"], score_based=True, tuple_independent=True)
    audit = audit_flags(declared, d, 3, substream(0, "flags"))
    assert audit.order_violations == 3
    assert "tuple_independent" in audit.contradicted(declared)


def test_flag_audit_arguments(table1):
    d, spec = table1
    with pytest.raises(DomainError):
        audit_flags(spec, d, 0, substream(0, "flags"))
    with pytest.raises(DimensionError):
        audit_flags(spec, d, 5, substream(0, "flags"), rc=ReasonableChanges((1.0,)))


def test_global_stability_of_a_dominance_chain(chain):
    d, _ = chain
    assert global_stability_2d(d, 10_000, substream(0, "global")) == 1.0


def test_global_stability_of_crossing_tuples(table1):
    d, _ = table1
    value = global_stability_2d(d, 20_000, substream(0, "global"))
    assert 0 < value < 1


def test_global_stability_edge_cases(csrankings):
    single = make_dataset({"only": (1, 2)})
    assert global_stability_2d(single, 10, substream(0, "global")) == 1.0
    d, _ = csrankings
    with pytest.raises(DimensionError):
        global_stability_2d(d, 10, substream(0, "global"))
    with pytest.raises(DomainError):
        global_stability_2d(single, 0, substream(0, "global"))


def _short_of_the_whole_chain(i: int) -> range:
    # k = max(i, 9 - i) already lets c_i land anywhere
    return range(max(i, 9 - i))


# At k the stable zone is |e1| + |e2| < 2(k + 1); over a 60 x 60 box of
# magnitudes that is at most 2 * 9**2 / 3600 = 0.045 for every k below.
WIDE = ReasonableChanges((60.0, 60.0))


def test_chain_is_globally_stable_but_locally_fragile(chain):
    d, spec = chain
    assert global_stability_2d(d, 10_000, substream(1, "global")) == 1.0
    for i in (0, 5, 9):
        for k in (0, _short_of_the_whole_chain(i)[-1]):
            report = lstability(spec, d, f"c{i}", EngineConfig(k=k, rc=WIDE, construction_samples_per_iter=5000))
            assert report.estimate <= 0.08, (i, k)


@pytest.mark.slow
def test_chain_stays_fragile_for_every_k_short_of_the_whole_ranking(chain):
    d, spec = chain
    for i in range(10):
        for k in _short_of_the_whole_chain(i):
            report = lstability(spec, d, f"c{i}", EngineConfig(k=k, rc=WIDE, seed=i))
            assert report.estimate <= 0.08, (i, k)


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(10))
def test_estimates_agree_with_the_grid(seed):
    bench = generate_dense_dataset(n_tuples=100, n_attrs=2, seed=seed)
    spec = RankingFunctionSpec.linear((1, 1))
    picks = np.random.default_rng(seed).choice(bench.dataset.ids, size=10, replace=False)
    for tid in picks:
        for k in (0, 1, 2):
            exact = grid_stability(spec, bench.dataset, tid, k, bench.rc, 201, fast_rerank=True)
            report = lstability(spec, bench.dataset, tid, EngineConfig(k=k, rc=bench.rc, seed=seed))
            assert abs(report.estimate - exact) <= 0.05, (tid, k)


@pytest.mark.slow
def test_reported_alpha_bounds_a_fresh_audit(chain):
    d, spec = chain
    rc = ReasonableChanges((3.0, 3.0))
    held = checked = 0
    for seed in range(100):
        config = EngineConfig(k=0, rc=rc, seed=seed, construction_samples_per_iter=2000, volume_samples=1000)
        report = lstability(spec, d, "c5", config)
        if report.alpha is None or report.alpha > 0.05:
            continue
        checked += 1
        rate = audit_boundary(spec, d, "c5", 0, report.rc_effective, report.boundary, 100_000, substream(seed, "audit"))
        if rate is not None and rate <= report.alpha:
            held += 1
    assert checked > 0
    assert held >= 0.93 * checked
