import numpy as np
import pytest

from gemd.faithfulness import check_faithfulness, trial_seed, zero_measure_scan
from gemd.graphs import MultiArrowGraph
from gemd.ldim import LdimModel, perfect_representation
from gemd.lti import TransferFunction as TF
from gemd.models import example2_graph, random_example2, sec3_triangle


def test_counterexample_violation():
    a, b = 0.5, 0.6
    rep = check_faithfulness(sec3_triangle(a, b, -a * b))
    assert not rep.faithful
    hits = [v for v in rep.violations if v.kind == "feedthrough" and set(v.pair) == {1, 3}
            and v.conditioning == ()]
    assert hits and all(v.d_connected and v.separated for v in hits)


@pytest.mark.parametrize("seed", range(3))
def test_example2_faithful(seed):
    rep = check_faithfulness(random_example2(np.random.default_rng(seed)))
    assert rep.faithful, rep.violations[:3]
    assert rep.statements == 2 * 30 * 16


def test_single_edge_faithful():
    rep = check_faithfulness(LdimModel(2, {(1, 2): TF.gain(0.5)}))
    assert rep.faithful and rep.statements == 4


def test_wrong_graph_is_flagged():
    m = LdimModel(3, {(1, 2): TF.gain(0.5), (2, 3): TF.gain(0.5)})
    rep = check_faithfulness(m, graph=MultiArrowGraph(3, {(1, 2)}))
    assert not rep.faithful
    assert check_faithfulness(m, graph=perfect_representation(m)).faithful


def test_scan_examples():
    s = zero_measure_scan(example2_graph(), 5, lambda r: random_example2(r), seed=1)
    assert s.trials == 5 and s.faithful == 5
    g = perfect_representation(sec3_triangle(1, 1, 1))

    def constrained(r):
        a, b = r.uniform(0.3, 0.6, 2)
        return sec3_triangle(a, b, -a * b)

    s = zero_measure_scan(g, 5, constrained, seed=1)
    assert s.unfaithful == 5
    empty = zero_measure_scan(example2_graph(), 0)
    assert empty.trials == 0 and not empty.rows


def test_scan_counts_unstable_draws():
    g = MultiArrowGraph(1)
    s = zero_measure_scan(g, 3, lambda r: LdimModel(1, {(1, 1): TF.delay(1.5)}))
    assert s.unstable == 3 and s.faithful == 0


def test_trial_seed_deterministic():
    assert trial_seed(0, 3) == trial_seed(0, 3)
    assert trial_seed(0, 3) != trial_seed(0, 4) != trial_seed(1, 4)
