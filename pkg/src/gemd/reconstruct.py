"""Granger-embedding mixed-delay (GEMD) reconstruction.

For every unordered pair ``{i, j}`` the search first looks for a set
``S`` making the filter entry of contemporaneous ``y_i`` vanish when
predicting ``y_j`` from ``S`` and the whole delayed block.  Pairs without
such a set get an undirected edge.  Separated pairs are then tested in both
time directions for separation from the past of the other process; a
failure draws a double-headed edge from the lagged process to the target.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator

import numpy as np

from .graphs import PartialGraph
from .ldim import CovarianceSource, empirical_autocovariance
from .wiener import CONTEMPORANEOUS, DEFAULT_LAGS, DEFAULT_TOL, DELAYED, Projector

log = logging.getLogger(__name__)

FEEDTHROUGH = "feedthrough"
DELAYED_KIND = "delayed"


@dataclass(frozen=True)
class GemdParams:
    """Search configuration.

    ``edge_threshold`` is the f-score at or below which a pair counts as
    separated.  ``max_cond_size=None`` searches every subset.  ``witness``
    picks the stored separating set: ``"first"`` is the first set below the
    threshold in search order (smallest cardinality, then lexicographic),
    ``"min"`` the set with the smallest f-score.
    """

    edge_threshold: float = DEFAULT_TOL
    lag_depth: int = DEFAULT_LAGS
    max_cond_size: int | None = None
    witness: str = "first"

    def __post_init__(self):
        if not 0.0 <= self.edge_threshold <= 1.0:
            raise ValueError("edge_threshold must lie in [0, 1]")
        if self.witness not in ("first", "min"):
            raise ValueError(f"unknown witness rule {self.witness!r}")
        if self.lag_depth < 1:
            raise ValueError("lag_depth must be >= 1")

    def to_dict(self) -> dict:
        return {"edge_threshold": self.edge_threshold, "lag_depth": self.lag_depth,
                "max_cond_size": self.max_cond_size, "witness": self.witness}


@dataclass
class SeparationRecord:
    """Outcome of one separating-set search.

    ``pair`` is ``(i, j)`` with ``i < j`` for feedthrough searches and
    ``(source, target)`` for delayed ones (the past of ``source`` against
    ``target``).  ``fscores`` lists every tested set in search order.
    """

    pair: tuple[int, int]
    kind: str
    separating_set: frozenset[int] | None
    fscores: dict[frozenset[int], float] = field(default_factory=dict)

    @property
    def separated(self) -> bool:
        return self.separating_set is not None

    @property
    def min_fscore(self) -> float:
        return min(self.fscores.values()) if self.fscores else float("nan")

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "kind": self.kind,
            "separating_set": None if self.separating_set is None else sorted(self.separating_set),
            "fscores": [{"set": sorted(s), "fscore": f} for s, f in self.fscores.items()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SeparationRecord":
        sep = d.get("separating_set")
        return cls(tuple(d["pair"]), d["kind"], None if sep is None else frozenset(sep),
                   {frozenset(e["set"]): float(e["fscore"]) for e in d.get("fscores", [])})


@dataclass
class ReconstructionResult:
    graph: PartialGraph
    records: list[SeparationRecord]
    config: dict = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)

    def __post_init__(self):
        self._index = {(r.kind, tuple(r.pair)): r for r in self.records}

    def feedthrough_record(self, i: int, j: int) -> SeparationRecord | None:
        return self._index.get((FEEDTHROUGH, (min(i, j), max(i, j))))

    def delayed_record(self, source: int, target: int) -> SeparationRecord | None:
        return self._index.get((DELAYED_KIND, (source, target)))

    def to_dict(self) -> dict:
        return {"graph": self.graph.to_dict(),
                "records": [r.to_dict() for r in self.records],
                "config": self.config,
                "diagnostics": list(self.diagnostics)}

    @classmethod
    def from_dict(cls, d: dict) -> "ReconstructionResult":
        return cls(PartialGraph.from_dict(d["graph"]),
                   [SeparationRecord.from_dict(r) for r in d["records"]],
                   d.get("config", {}), d.get("diagnostics", []))


def conditioning_sets(n: int, exclude, max_size: int | None = None) -> Iterator[frozenset[int]]:
    """Subsets of ``1..n`` minus ``exclude`` by increasing size, then lexicographically."""
    pool = [v for v in range(1, n + 1) if v not in set(exclude)]
    top = len(pool) if max_size is None else min(max_size, len(pool))
    for k in range(top + 1):
        for c in combinations(pool, k):
            yield frozenset(c)


def _search(proj: Projector, target: int, candidate: int, mode: str, params: GemdParams,
            exhaustive: bool) -> tuple[frozenset[int] | None, dict]:
    scores: dict[frozenset[int], float] = {}
    first = None
    n = proj.n
    for s in conditioning_sets(n, (target, candidate), params.max_cond_size):
        f = proj.fscore(target, candidate, mode, s)
        scores[s] = f
        if first is None and f <= params.edge_threshold:
            first = s
            if not exhaustive:
                break
    if params.witness == "first":
        return first, scores
    s_min = min(scores, key=scores.get)  # dicts keep search order, so ties go to the first
    return (s_min if scores[s_min] <= params.edge_threshold else None), scores


def gemd(source: CovarianceSource, n: int | None = None,
         params: GemdParams | None = None, *, exhaustive: bool = False) -> ReconstructionResult:
    """Run GEMD on a covariance source.

    With ``exhaustive=False`` and the ``"first"`` witness, each search stops
    at its first separating set, so ``fscores`` only lists the sets tried.
    """
    params = params or GemdParams()
    n = source.n if n is None else n
    if n != source.n:
        raise ValueError(f"source has {source.n} processes, expected {n}")
    proj = Projector(source, params.lag_depth)
    exhaustive = exhaustive or params.witness == "min"
    undirected, double = set(), set()
    records: list[SeparationRecord] = []
    diagnostics: list[str] = []
    for i, j in combinations(range(1, n + 1), 2):
        try:
            sc, scores = _search(proj, j, i, CONTEMPORANEOUS, params, exhaustive)
            records.append(SeparationRecord((i, j), FEEDTHROUGH, sc, scores))
            if sc is None:
                undirected.add((i, j))
                continue
            # step 2a: y_j against the past of y_i; step 2b: the reverse
            for src, tgt in ((i, j), (j, i)):
                sd, scores = _search(proj, tgt, src, DELAYED, params, exhaustive)
                records.append(SeparationRecord((src, tgt), DELAYED_KIND, sd, scores))
                if sd is None:
                    double.add((src, tgt))
        except (np.linalg.LinAlgError, ValueError) as exc:
            msg = f"pair {(i, j)} skipped: {exc}"
            log.warning(msg)
            diagnostics.append(msg)
    config = params.to_dict() | {"source": source.kind, "nobs": source.nobs}
    return ReconstructionResult(PartialGraph(n, undirected, (), double), records, config,
                                diagnostics)


def gemd_from_data(data: np.ndarray, params: GemdParams | None = None,
                   **kw) -> ReconstructionResult:
    """GEMD on an ``n x T`` array through the biased sample autocovariance."""
    params = params or GemdParams()
    source = empirical_autocovariance(data, params.lag_depth)
    return gemd(source, source.n, params, **kw)


@dataclass
class PairwiseScores:
    """Exhaustive f-score tables.

    ``feedthrough[(i, j)]`` (``i < j``) and ``delayed[(source, target)]``
    map each tested conditioning set to its f-score, in search order.
    """

    n: int
    feedthrough: dict[tuple[int, int], dict[frozenset[int], float]]
    delayed: dict[tuple[int, int], dict[frozenset[int], float]]
    config: dict = field(default_factory=dict)

    def min_feedthrough(self, i: int, j: int) -> tuple[float, frozenset[int]]:
        t = self.feedthrough[(min(i, j), max(i, j))]
        s = min(t, key=t.get)
        return t[s], s

    def min_delayed(self, source: int, target: int) -> tuple[float, frozenset[int]]:
        t = self.delayed[(source, target)]
        s = min(t, key=t.get)
        return t[s], s

    def to_rows(self) -> list[dict]:
        rows = []
        for (i, j) in sorted(self.feedthrough):
            f, s = self.min_feedthrough(i, j)
            rows.append({"kind": FEEDTHROUGH, "source": i, "target": j, "fscore": f,
                         "set": sorted(s)})
        for (i, j) in sorted(self.delayed):
            f, s = self.min_delayed(i, j)
            rows.append({"kind": DELAYED_KIND, "source": i, "target": j, "fscore": f,
                         "set": sorted(s)})
        return rows


def pairwise_scores(source: CovarianceSource, n: int | None = None,
                    params: GemdParams | None = None) -> PairwiseScores:
    params = params or GemdParams()
    n = source.n if n is None else n
    proj = Projector(source, params.lag_depth)
    ft, dl = {}, {}
    for i, j in combinations(range(1, n + 1), 2):
        ft[(i, j)] = {s: proj.fscore(j, i, CONTEMPORANEOUS, s)
                      for s in conditioning_sets(n, (i, j), params.max_cond_size)}
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                dl[(i, j)] = {s: proj.fscore(j, i, DELAYED, s)
                              for s in conditioning_sets(n, (i, j), params.max_cond_size)}
    return PairwiseScores(n, ft, dl, params.to_dict())


def gemd_from_scores(scores: PairwiseScores, threshold: float,
                     witness: str = "min") -> ReconstructionResult:
    """Replay GEMD's decisions on a precomputed score table at ``threshold``."""

    def pick(table):
        if witness == "first":
            return next((s for s, f in table.items() if f <= threshold), None)
        s = min(table, key=table.get)
        return s if table[s] <= threshold else None

    undirected, double, records = set(), set(), []
    for (i, j), table in sorted(scores.feedthrough.items()):
        sc = pick(table)
        records.append(SeparationRecord((i, j), FEEDTHROUGH, sc, dict(table)))
        if sc is None:
            undirected.add((i, j))
            continue
        for src, tgt in ((i, j), (j, i)):
            t = scores.delayed[(src, tgt)]
            sd = pick(t)
            records.append(SeparationRecord((src, tgt), DELAYED_KIND, sd, dict(t)))
            if sd is None:
                double.add((src, tgt))
    config = dict(scores.config) | {"edge_threshold": threshold, "witness": witness}
    return ReconstructionResult(PartialGraph(scores.n, undirected, (), double), records, config)
