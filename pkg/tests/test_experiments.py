import numpy as np
import pytest
from hypothesis import given, strategies as st
from sklearn.metrics import roc_auc_score

from gemd.experiments import (ExperimentConfig, collect_scores, orientation_accuracy,
                              roc_from_slots, run_faithfulness_scan, run_orientation_accuracy,
                              run_roc, verify_counterexample)
from gemd.graphs import MultiArrowGraph, PartialGraph
from gemd.io import save_model
from gemd.ldim import LdimModel


def test_counterexample_report():
    rep = verify_counterexample(draws=20)
    assert rep.passed and rep.max_deviation < 1e-10 and rep.max_closed_form_error < 1e-12


def test_roc_from_slots_hand_computed():
    s = np.array([0.9, 0.5, 0.2, 0.1])
    y = np.array([True, False, True, False])
    c = roc_from_slots([(s, y)], np.array([0.0, 0.15, 0.3, 0.95]))
    np.testing.assert_allclose(c.tpr, [1, 1, 0.5, 0])
    np.testing.assert_allclose(c.fpr, [1, 0.5, 0.5, 0])
    # trapezoid over (0,0) (0.5,0.5) (0.5,1) (1,1)
    assert c.auc == pytest.approx(0.625)
    assert c.knee() == 0.15


@given(st.lists(st.tuples(st.floats(0, 1), st.booleans()), min_size=2, max_size=40))
def test_auc_matches_rank_statistic(pairs):
    s = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    if y.all() or not y.any():
        return
    u = np.unique(s)
    grid = np.concatenate([[-1.0], (u[:-1] + u[1:]) / 2, [2.0]])  # one cut between scores
    assert roc_from_slots([(s, y)], grid).auc == pytest.approx(roc_auc_score(y, s), abs=1e-12)


def test_perfect_classifier_auc():
    c = roc_from_slots([(np.array([0.9, 0.8, 0.0]), np.array([True, True, False]))],
                       np.array([0.0, 0.5, 1.0]))
    assert c.auc == pytest.approx(1.0)


def test_orientation_accuracy_counting():
    truth = MultiArrowGraph(4, {(1, 2), (2, 3), (3, 4)})
    g = PartialGraph(4, {(1, 2)}, {(3, 2), (3, 4)})
    assert orientation_accuracy(g, truth) == (1, 3)


def test_small_roc_run_is_reproducible_and_monotone():
    cfg = ExperimentConfig(trials=3, horizons=(800,), lag_depth=3, seed=5)
    a = run_roc(cfg)[0]
    b = run_roc(cfg)[0]
    np.testing.assert_array_equal(a.tpr, b.tpr)
    assert np.all(np.diff(a.tpr) <= 0) and np.all(np.diff(a.fpr) <= 0)
    assert 0 <= a.auc <= 1


def test_null_model_calibration(tmp_path):
    path = tmp_path / "null.json"
    save_model(LdimModel(4), path)
    cfg = ExperimentConfig(model=str(path), trials=20, horizons=(2000,), lag_depth=3,
                           thresholds=(0.05,))
    trials = collect_scores(cfg, 2000)
    from gemd.experiments import roc_slots
    s = np.concatenate([roc_slots(sc, tr)[0] for sc, tr in trials])
    assert np.mean(s > 0.05) < 0.1


def test_population_accuracy_is_perfect():
    cfg = ExperimentConfig(trials=5, horizons=(1000,))
    (row,) = run_orientation_accuracy(cfg, population=True)
    assert row.accuracy == 1.0 and row.conflicts == 0


def test_parallel_matches_serial():
    cfg = ExperimentConfig(trials=4, horizons=(600,), lag_depth=2, seed=2)
    par = ExperimentConfig(trials=4, horizons=(600,), lag_depth=2, seed=2, n_jobs=2)
    assert run_roc(cfg)[0].auc == run_roc(par)[0].auc


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(horizons=(0,))
    with pytest.raises(ValueError):
        ExperimentConfig(thresholds=(1.5,))
    with pytest.raises(ValueError):
        ExperimentConfig(model="no_such_model")


def test_faithfulness_scan_driver():
    cfg = ExperimentConfig(model="sec3_triangle", trials=4)
    assert run_faithfulness_scan(cfg, constrained=True).unfaithful == 4
    assert run_faithfulness_scan(cfg).faithful == 4
