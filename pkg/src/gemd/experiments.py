"""Experiment drivers: ROC studies, orientation accuracy, counterexample and scans."""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .faithfulness import ScanSummary, trial_seed, zero_measure_scan
from .graphs import MultiArrowGraph, skeleton
from .io import load_model
from .ldim import (LdimModel, empirical_autocovariance, perfect_representation,
                   population_autocovariance, psd, simulate)
from .models import (example1_diamond, example2_graph, parameterize,
                     random_example2, sec3_closed_form_psd, sec3_sparse, sec3_triangle)
from .orientation import orient_all
from .reconstruct import GemdParams, PairwiseScores, gemd_from_scores, pairwise_scores

log = logging.getLogger(__name__)

BUILTIN_NAMES = ("sec3_triangle", "example1_diamond", "example2_network")
PAPER_HORIZONS = (500, 1000, 10000, 20000, 25000)


def default_thresholds() -> np.ndarray:
    return np.concatenate([[0.0], np.logspace(-6, 0, 121)])


@dataclass
class ExperimentConfig:
    model: str = "example2_network"
    param_low: float = 0.3
    param_high: float = 0.6
    trials: int = 100
    horizons: tuple[int, ...] = PAPER_HORIZONS
    lag_depth: int = 10
    thresholds: tuple[float, ...] | None = None
    max_cond_size: int | None = None
    seed: int = 0
    b32_placement: str = "combined"
    n_jobs: int = 1

    def __post_init__(self):
        self.horizons = tuple(int(h) for h in self.horizons)
        if any(h <= 0 for h in self.horizons):
            raise ValueError("horizons must be positive")
        if self.thresholds is not None:
            self.thresholds = tuple(float(t) for t in self.thresholds)
            if any(not 0.0 <= t <= 1.0 for t in self.thresholds):
                raise ValueError("thresholds must lie in [0, 1]")
        if self.model not in BUILTIN_NAMES and not Path(self.model).exists():
            raise ValueError(f"unknown model {self.model!r}: not a builtin name or file")

    def threshold_grid(self) -> np.ndarray:
        return np.asarray(self.thresholds if self.thresholds is not None
                          else default_thresholds())

    def params(self) -> GemdParams:
        return GemdParams(lag_depth=self.lag_depth, max_cond_size=self.max_cond_size)

    def draw_model(self, rng: np.random.Generator) -> LdimModel:
        lo, hi = self.param_low, self.param_high
        if self.model == "example2_network":
            return random_example2(rng, lo, hi, b32_placement=self.b32_placement)
        if self.model == "example1_diamond":
            return parameterize(perfect_representation(example1_diamond()), rng, lo, hi)
        if self.model == "sec3_triangle":
            a, b, c = rng.uniform(lo, hi, size=3)
            return sec3_triangle(a, b, c)
        return load_model(self.model)


@dataclass
class RocCurve:
    horizon: int | None
    thresholds: np.ndarray
    tpr: np.ndarray
    fpr: np.ndarray
    positives: int
    negatives: int

    @property
    def auc(self) -> float:
        x = np.concatenate([[0.0], self.fpr[::-1], [1.0]])
        y = np.concatenate([[0.0], self.tpr[::-1], [1.0]])
        order = np.lexsort((y, x))
        return float(np.clip(np.trapezoid(y[order], x[order]), 0.0, 1.0))

    def knee(self) -> float:
        """Threshold maximising TPR - FPR; ties go to the largest threshold."""
        j = self.tpr - self.fpr
        best = np.flatnonzero(j == j.max())
        return float(self.thresholds[best[-1]])

    def rows(self) -> list[dict]:
        return [{"horizon": self.horizon, "threshold": float(t), "tpr": float(a),
                 "fpr": float(b)} for t, a, b in zip(self.thresholds, self.tpr, self.fpr)]


@dataclass
class AccuracyRow:
    horizon: int | None
    accuracy: float
    trials: int
    threshold: float
    conflicts: int = 0


def roc_slots(scores: PairwiseScores, truth: MultiArrowGraph):
    """Score and label vectors of one trial.

    Undirected slots are the unordered pairs, scored by the feedthrough
    f-score and labelled by the skeleton of the single-headed edges.
    Double-headed slots are the ordered pairs without a single-headed edge
    in either direction (the only pairs sent to the delayed tests), scored
    by the delayed f-score and labelled by the double-headed edges.
    """
    skel1 = skeleton(MultiArrowGraph(truth.n, truth.e1))
    s, y = [], []
    for i, j in sorted(scores.feedthrough):
        s.append(scores.min_feedthrough(i, j)[0])
        y.append((i, j) in skel1)
    for i, j in sorted(scores.delayed):
        if (min(i, j), max(i, j)) in skel1:
            continue
        s.append(scores.min_delayed(i, j)[0])
        y.append((i, j) in truth.e2)
    return np.asarray(s), np.asarray(y, dtype=bool)


def roc_from_slots(slots: list[tuple[np.ndarray, np.ndarray]], thresholds: np.ndarray,
                   horizon=None) -> RocCurve:
    s = np.concatenate([a for a, _ in slots])
    y = np.concatenate([b for _, b in slots])
    pred = s[None, :] > thresholds[:, None]
    P, N = int(y.sum()), int((~y).sum())
    tpr = (pred & y).sum(axis=1) / max(P, 1)
    fpr = (pred & ~y).sum(axis=1) / max(N, 1)
    return RocCurve(horizon, np.asarray(thresholds, dtype=float), tpr, fpr, P, N)


def orientation_accuracy(oriented, truth: MultiArrowGraph) -> tuple[int, int]:
    """(correct, total) over true single-headed edges recovered in the skeleton.

    An edge counts as correct only when it is directed the true way; edges
    left undirected or reversed count as wrong.
    """
    correct = total = 0
    for a, b in sorted(truth.e1):
        key = (min(a, b), max(a, b))
        if key in oriented.undirected:
            total += 1
        elif (a, b) in oriented.directed:
            total += 1
            correct += 1
        elif (b, a) in oriented.directed:
            total += 1
    return correct, total


def _trial(args):
    config, horizon, t = args
    seed = trial_seed(config.seed, horizon or 0, t)
    rng = np.random.default_rng(seed)
    model = config.draw_model(rng)
    truth = perfect_representation(model)
    if horizon is None:
        source = population_autocovariance(model, config.lag_depth)
    else:
        data = simulate(model, horizon, rng)
        source = empirical_autocovariance(data, config.lag_depth)
    return pairwise_scores(source, model.n, config.params()), truth


def collect_scores(config: ExperimentConfig, horizon: int | None):
    """Scores and ground truth for every trial at one horizon (``None`` = population)."""
    jobs = [(config, horizon, t) for t in range(config.trials)]
    if config.n_jobs > 1:
        with ProcessPoolExecutor(config.n_jobs) as ex:
            return list(ex.map(_trial, jobs, chunksize=4))
    return [_trial(j) for j in jobs]


def run_roc(config: ExperimentConfig, collected: dict | None = None) -> list[RocCurve]:
    curves = []
    grid = config.threshold_grid()
    for h in config.horizons:
        trials = collected[h] if collected is not None else collect_scores(config, h)
        slots = [roc_slots(sc, truth) for sc, truth in trials]
        curves.append(roc_from_slots(slots, grid, h))
    return curves


def accuracy_at(trials, threshold: float, horizon=None) -> AccuracyRow:
    correct = total = conflicts = 0
    for sc, truth in trials:
        res = gemd_from_scores(sc, threshold, witness="min")
        g, trace = orient_all(res)
        c, t = orientation_accuracy(g, truth)
        correct += c
        total += t
        conflicts += len(trace.conflicts)
    return AccuracyRow(horizon, correct / total if total else float("nan"), len(trials),
                       threshold, conflicts)


def run_orientation_accuracy(config: ExperimentConfig, collected: dict | None = None,
                             population: bool = False) -> list[AccuracyRow]:
    """Per horizon: ROC-knee threshold, reconstruct, orient, score orientations.

    With ``population=True`` a single row is computed from exact
    autocovariances at a threshold of 1e-6.
    """
    if population:
        trials = collect_scores(config, None)
        return [accuracy_at(trials, 1e-6, None)]
    rows = []
    grid = config.threshold_grid()
    for h in config.horizons:
        trials = collected[h] if collected is not None else collect_scores(config, h)
        curve = roc_from_slots([roc_slots(sc, tr) for sc, tr in trials], grid, h)
        rows.append(accuracy_at(trials, curve.knee(), h))
    return rows


@dataclass
class CounterexampleReport:
    draws: int
    grid_size: int
    max_deviation: float
    max_closed_form_error: float
    details: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.max_deviation < 1e-10 and self.max_closed_form_error < 1e-12


def verify_counterexample(grid_size: int = 256, draws: int = 20, seed: int = 0,
                          low: float = 0.3, high: float = 0.9) -> CounterexampleReport:
    """Compare the PSDs of the dense triangle (with ``c = -a b``) and its sparse twin."""
    rng = np.random.default_rng(seed)
    omega = np.linspace(-np.pi, np.pi, grid_size, endpoint=False)
    dev = cf_err = 0.0
    details = []
    for _ in range(draws):
        a, b = rng.uniform(low, high, size=2)
        p1 = psd(sec3_triangle(a, b, -a * b), omega)
        p2 = psd(sec3_sparse(a, b), omega)
        d = float(np.max(np.abs(p1 - p2)))
        e = float(np.max(np.abs(p1 - sec3_closed_form_psd(a, b)[None])))
        dev, cf_err = max(dev, d), max(cf_err, e)
        details.append({"a": a, "b": b, "deviation": d, "closed_form_error": e})
    return CounterexampleReport(draws, grid_size, dev, cf_err, details)


def run_faithfulness_scan(config: ExperimentConfig, constrained: bool = False) -> ScanSummary:
    """Zero-measure scan on a builtin graph.

    For ``sec3_triangle`` the ``constrained`` flag hard-codes ``c = -a b``.
    """
    lo, hi = config.param_low, config.param_high
    if config.model == "example2_network":
        graph = example2_graph()

        def law(rng):
            return random_example2(rng, lo, hi, b32_placement=config.b32_placement)
    elif config.model == "sec3_triangle":
        graph = perfect_representation(sec3_triangle(1, 1, 1))

        def law(rng):
            a, b, c = rng.uniform(lo, hi, size=3)
            return sec3_triangle(a, b, -a * b if constrained else c)
    else:
        model = config.draw_model(np.random.default_rng(config.seed))
        graph = perfect_representation(model)
        law = None
    return zero_measure_scan(graph, config.trials, law, config.seed, config.lag_depth)


def config_to_dict(config: ExperimentConfig) -> dict:
    d = asdict(config)
    d["horizons"] = list(config.horizons)
    d["thresholds"] = None if config.thresholds is None else list(config.thresholds)
    return d
