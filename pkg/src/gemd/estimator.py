"""scikit-learn style wrapper around GEMD reconstruction and orientation."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .graphs import skeleton
from .orientation import orient_all
from .reconstruct import GemdParams, gemd_from_data
from .wiener import DEFAULT_LAGS, DEFAULT_TOL


class GEMD(BaseEstimator):
    """Reconstruct a mixed-delay causal graph from a multivariate time series.

    Parameters
    ----------
    edge_threshold : float
        f-score at or below which a pair counts as separated.
    lag_depth : int
        Number of past samples per process in every regressor block.
    max_cond_size : int or None
        Largest conditioning set tried; ``None`` searches all subsets.
    witness : {"first", "min"}
        Which separating set to keep when several pass the threshold.
    orient : bool
        Run collider detection and propagation after the search.

    Attributes
    ----------
    result_ : ReconstructionResult
    graph_ : PartialGraph
        Unoriented GEMD output.
    oriented_graph_ : PartialGraph or None
    trace_ : OrientationTrace or None
    adjacency_ : ndarray of shape (n, n)
        ``1`` for undirected or feedthrough edges (both ways when undirected),
        ``2`` for double-headed ones, indexed ``[source, target]``.
    """

    def __init__(self, edge_threshold: float = DEFAULT_TOL, lag_depth: int = DEFAULT_LAGS,
                 max_cond_size: int | None = None, witness: str = "first",
                 orient: bool = True):
        self.edge_threshold = edge_threshold
        self.lag_depth = lag_depth
        self.max_cond_size = max_cond_size
        self.witness = witness
        self.orient = orient

    def fit(self, X, y=None):
        """Fit on ``X`` of shape ``(n_samples, n_processes)``, rows ordered in time."""
        X = check_array(X, dtype=np.float64, ensure_min_samples=2, ensure_min_features=2)
        params = GemdParams(self.edge_threshold, self.lag_depth, self.max_cond_size,
                            self.witness)
        self.n_features_in_ = X.shape[1]
        self.result_ = gemd_from_data(X.T, params)
        self.graph_ = self.result_.graph
        self.records_ = self.result_.records
        if self.orient:
            self.oriented_graph_, self.trace_ = orient_all(self.result_)
        else:
            self.oriented_graph_, self.trace_ = None, None
        self.adjacency_ = self._adjacency(self.oriented_graph_ or self.graph_)
        return self

    @staticmethod
    def _adjacency(g) -> np.ndarray:
        a = np.zeros((g.n, g.n), dtype=int)
        for i, j in g.undirected:
            a[i - 1, j - 1] = a[j - 1, i - 1] = 1
        for i, j in g.directed:
            a[i - 1, j - 1] = 1
        for i, j in g.double_headed:
            a[i - 1, j - 1] = 2
        return a

    def skeleton(self) -> set[tuple[int, int]]:
        check_is_fitted(self, "result_")
        return set(skeleton(self.graph_))
