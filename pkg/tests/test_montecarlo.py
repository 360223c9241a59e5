import math

import numpy as np
import pytest

from robust_premium.errors import AllReplicationsFailed
from robust_premium.models import Lomax, ParetoMixture, StrictPareto, true_premium
from robust_premium.montecarlo import (
    ESTIMATORS,
    SimulationStudy,
    bias_rmse,
    run_replication,
    run_study,
    table1_study,
    table2_study,
)
from robust_premium.tail_estimation import sort_sample


def small_study(**kw):
    base = dict(model=Lomax(0.6), sizes=(60, 120), replications=6, rho=1.12, theta=0.3, seed=3)
    return SimulationStudy(**(base | kw))


def test_replication_is_deterministic():
    study = small_study()
    assert run_replication(study, 120, 4) == run_replication(study, 120, 4)
    assert run_replication(study, 120, 4) != run_replication(study, 120, 5)


def test_constant_sample_propagates():
    rec = run_replication(small_study(), 30, 0, sample=sort_sample([3.5] * 30))
    assert rec.thill_gamma == 0 and rec.hill_gamma == 0
    assert rec.thill_premium == pytest.approx(3.5, rel=1e-14)
    assert rec.hill_premium == pytest.approx(3.5, rel=1e-14)
    assert rec.errors == ()


def test_failures_are_recorded_not_raised():
    # one enormous loss pushes the Hill estimate past 1/rho; t-Hill shrugs it off
    raw = np.concatenate([np.ones(28), [1e3, 1e200]])
    rec = run_replication(small_study(rho=5.0), 30, 0, sample=sort_sample(raw))
    assert rec.hill_premium is None and rec.hill_gamma > 1
    assert rec.errors == ("hill: HeavinessConditionViolated",)
    assert rec.thill_premium is not None and rec.thill_gamma < 0.2


def test_k_star_in_plausible_band():
    rec = run_replication(table1_study(seed=1), 1000, 0)
    assert 32 <= rec.k_thill <= 999 and 32 <= rec.k_hill <= 999


def test_bias_rmse_examples():
    assert bias_rmse([2.0], 2.0) == (0.0, 0.0)
    assert bias_rmse([1.5, 2.5], 2.0) == pytest.approx((0.0, 0.5))
    b, r = bias_rmse([1, 2, 3], 2.0)
    assert b == pytest.approx(0.0) and r == pytest.approx(math.sqrt(2 / 3))
    assert bias_rmse([1.0, None, 3.0], 2.0) == pytest.approx((0.0, 1.0))
    with pytest.raises(AllReplicationsFailed):
        bias_rmse([None, None], 1.0)


def test_single_replication_cells_equal_record():
    study = small_study(replications=1, sizes=(80,))
    report = run_study(study, keep_records=True)
    rec = report.records[0]
    g, p = study.truth()
    for est in ESTIMATORS:
        cell = report.cell(80, est)
        truth = g if est.endswith("gamma") else p
        assert cell.bias == pytest.approx(rec.value(est) - truth, rel=1e-14)
        assert cell.rmse == pytest.approx(abs(rec.value(est) - truth), rel=1e-14)
        assert cell.k_star_mean == rec.k_for(est)


def test_report_independent_of_workers_and_chunking():
    study = small_study(replications=7)
    a = run_study(study, workers=1)
    b = run_study(study, workers=2, chunk=3)
    assert a.cells == b.cells


def test_cells_satisfy_variance_and_count_invariants():
    report = run_study(small_study(model=StrictPareto(0.8), replications=20))
    for c in report.cells:
        assert 0 <= c.failures <= c.replications
        if not math.isnan(c.rmse):
            assert c.rmse**2 - c.bias**2 >= -1e-12


def test_zero_contamination_reproduces_baseline():
    base = run_study(small_study())
    mix = run_study(small_study(model=ParetoMixture(0.6, 2.0, 0.0)))
    assert [(c.n, c.estimator, c.bias, c.rmse, c.k_star_mean) for c in base.cells] == [
        (c.n, c.estimator, c.bias, c.rmse, c.k_star_mean) for c in mix.cells]


def test_eps_grid_shares_streams_and_targets_core_model():
    study = small_study(model=ParetoMixture(0.6, 2.0, 0.05), eps_grid=(0.0, 0.1), sizes=(60,))
    report = run_study(study, keep_records=True)
    assert {c.eps for c in report.cells} == {0.0, 0.1}
    assert study.truth() == (0.6, true_premium(Lomax(0.6), 1.12))
    base = run_study(small_study(sizes=(60,)))
    for est in ESTIMATORS:
        assert report.cell(60, est, 0.0).rmse == base.cell(60, est).rmse


def test_all_failed_cell():
    # a contaminating tail with gamma 20 drives every premium estimate past the pole
    study = small_study(model=ParetoMixture(0.6, 20.0, 0.45), rho=1.0, replications=4, sizes=(40,))
    report = run_study(study)
    failed = report.failed_cells()
    assert [c.estimator for c in failed] == ["thill_premium", "hill_premium"]
    for c in failed:
        assert c.failures == 4 and math.isnan(c.bias) and math.isnan(c.rmse)
        assert math.isnan(c.k_star_mean)
    assert not math.isnan(report.cell(40, "thill_gamma", 0.45).rmse)
    with pytest.raises(AllReplicationsFailed):
        run_study(study, strict=True)


def test_study_validation():
    with pytest.raises(ValueError):
        small_study(replications=0)
    with pytest.raises(ValueError):
        small_study(sizes=(5,))
    with pytest.raises(ValueError):
        small_study(rho=0.9)
    with pytest.raises(ValueError):
        small_study(theta=1.0)
    with pytest.raises(ValueError):
        small_study(eps_grid=(0.1,))
    with pytest.raises(ValueError):
        small_study(estimators=("bootstrap",))


def test_presets():
    t1, t2 = table1_study(), table2_study()
    assert t1.model == Lomax(0.6) and t1.sizes == (100, 200, 500, 1000)
    assert (t1.replications, t1.rho, t1.theta) == (1000, 1.12, 0.3)
    assert t2.model.gamma1 == 0.6 and t2.model.gamma2 == 2.0
    assert t2.eps_values == (0.05, 0.10, 0.15, 0.25) and t2.sizes == (100, 200, 1000)
