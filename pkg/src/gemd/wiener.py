"""Finite-lag least-squares surrogates of causal Wiener filters.

Every projection predicts ``y_j(t)`` from a set of lagged process values
``y_p(t - l)``, solving the normal equations built from the block-Toeplitz
autocovariance of a :class:`~gemd.ldim.CovarianceSource`.  The f-score of a
candidate is the relative drop in residual variance obtained by adding it to
the remaining regressors; for a single contemporaneous candidate this is the
squared partial correlation, hence symmetric in the two processes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .ldim import CovarianceSource

log = logging.getLogger(__name__)

DEFAULT_LAGS = 10
DEFAULT_TOL = 1e-6
RIDGE = 1e-10

CONTEMPORANEOUS = "contemporaneous"
DELAYED = "delayed"

Regressor = tuple[int, int]  # (process, lag)


@dataclass(frozen=True)
class RegressorSpec:
    target: int
    candidate: int
    candidate_mode: str = CONTEMPORANEOUS
    conditioning: frozenset[int] = frozenset()
    lag_depth: int = DEFAULT_LAGS
    include_all_delayed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "conditioning", frozenset(self.conditioning))
        if self.candidate_mode not in (CONTEMPORANEOUS, DELAYED):
            raise ValueError(f"unknown candidate_mode {self.candidate_mode!r}")
        if self.target == self.candidate:
            raise ValueError("target and candidate must differ")
        if self.target in self.conditioning or self.candidate in self.conditioning:
            raise ValueError("conditioning set may not contain target or candidate")
        if self.lag_depth < 1:
            raise ValueError("lag_depth must be >= 1")

    def candidate_block(self) -> list[Regressor]:
        if self.candidate_mode == CONTEMPORANEOUS:
            return [(self.candidate, 0)]
        return [(self.candidate, lag) for lag in range(1, self.lag_depth + 1)]

    def base_block(self, n: int) -> list[Regressor]:
        """Regressors other than the candidate block."""
        regs = [(s, 0) for s in sorted(self.conditioning)]
        if self.include_all_delayed:
            skip = set(self.candidate_block())
            regs += [(p, lag) for lag in range(1, self.lag_depth + 1)
                     for p in range(1, n + 1) if (p, lag) not in skip]
        return regs


@dataclass
class FilterResult:
    coefficients: dict[Regressor, float]
    residual_variance: float
    reduced_residual_variance: float
    target_variance: float
    fscore: float
    regularized: bool = False
    orthogonality_error: float = 0.0
    spec: RegressorSpec | None = field(default=None, repr=False)

    @property
    def candidate_lag0_coeff(self) -> float:
        if self.spec is None:
            return 0.0
        return self.coefficients.get((self.spec.candidate, 0), 0.0)

    @property
    def candidate_delayed_coeffs(self) -> list[float]:
        if self.spec is None:
            return []
        return [self.coefficients.get((self.spec.candidate, lag), 0.0)
                for lag in range(1, self.spec.lag_depth + 1)]


def relative_reduction(full: float, reduced: float) -> float:
    if reduced <= 0.0:
        return 0.0
    return float(min(1.0, max(0.0, 1.0 - full / reduced)))


class Projector:
    """Least-squares projections against one covariance source.

    Residual variances are memoised on (target, regressor set), so sweeping
    many conditioning sets reuses the shared sub-problems.
    """

    def __init__(self, source: CovarianceSource, lag_depth: int = DEFAULT_LAGS):
        if lag_depth > source.max_lag:
            raise ValueError(f"source provides lags up to {source.max_lag}, need {lag_depth}")
        self.source = source
        self.n = source.n
        self.lag_depth = lag_depth
        self._cache: dict = {}

    def _index(self, reg: Regressor, lo: int) -> int:
        p, lag = reg
        return (lag - lo) * self.n + (p - 1)

    def solve(self, target: Regressor, regressors: Sequence[Regressor]):
        """Return ``(beta, residual_variance, regularized, orthogonality_error)``."""
        regressors = list(regressors)
        lags = [lag for _, lag in regressors] + [target[1]]
        lo, hi = min(lags), max(lags)
        if hi - lo > self.source.max_lag:
            raise ValueError("regressor lags span beyond the source's max_lag")
        S = self.source.stacked(lo, hi)
        t = self._index(target, lo)
        var_y = float(S[t, t])
        if not regressors:
            return np.zeros(0), var_y, False, 0.0
        idx = [self._index(r, lo) for r in regressors]
        G = S[np.ix_(idx, idx)]
        c = S[idx, t]
        regularized = False
        try:
            cf = scipy.linalg.cho_factor(G, check_finite=False)
            beta = scipy.linalg.cho_solve(cf, c, check_finite=False)
            rcond = np.min(np.diag(cf[0])) ** 2 / np.max(np.diag(G))
            if not np.all(np.isfinite(beta)) or rcond < 1e-15:
                raise np.linalg.LinAlgError
        except (np.linalg.LinAlgError, ValueError):
            regularized = True
            eps = RIDGE * max(float(np.mean(np.diag(G))), 1.0)
            beta = np.linalg.solve(G + eps * np.eye(len(idx)), c)
            log.debug("ridge-regularised solve for target %s", target)
        resid = var_y - float(c @ beta)
        orth = float(np.max(np.abs(c - G @ beta)))
        return beta, max(resid, 0.0), regularized, orth

    def residual_variance(self, target: Regressor, regressors: Iterable[Regressor]) -> float:
        key = (target, frozenset(regressors))
        if key not in self._cache:
            self._cache[key] = self.solve(target, sorted(key[1]))[1]
        return self._cache[key]

    def project(self, spec: RegressorSpec) -> FilterResult:
        if spec.lag_depth > self.source.max_lag:
            raise ValueError("spec lag_depth exceeds the source's max_lag")
        target = (spec.target, 0)
        cand = spec.candidate_block()
        base = spec.base_block(self.n)
        regs = cand + base
        beta, full, regularized, orth = self.solve(target, regs)
        reduced = self.residual_variance(target, base)
        var_y = float(self.source.R(0)[spec.target - 1, spec.target - 1])
        return FilterResult(
            coefficients=dict(zip(regs, map(float, beta))),
            residual_variance=full,
            reduced_residual_variance=reduced,
            target_variance=var_y,
            fscore=relative_reduction(full, reduced),
            regularized=regularized,
            orthogonality_error=orth,
            spec=spec,
        )

    def fscore(self, j: int, i: int, mode: str, s: Iterable[int]) -> float:
        """f-score only, using memoised residual variances."""
        spec = RegressorSpec(j, i, mode, frozenset(s), self.lag_depth)
        base = spec.base_block(self.n)
        target = (j, 0)
        full = self.residual_variance(target, base + spec.candidate_block())
        reduced = self.residual_variance(target, base)
        return relative_reduction(full, reduced)


def project(source: CovarianceSource, spec: RegressorSpec) -> FilterResult:
    return Projector(source, spec.lag_depth).project(spec)


def feedthrough_separated(source: CovarianceSource, j: int, i: int, s: Iterable[int] = (),
                          L: int = DEFAULT_LAGS, tol: float = DEFAULT_TOL):
    """Is the filter entry of ``y_i`` strictly causal when predicting ``y_j``?

    Decided by the f-score of contemporaneous ``y_i`` given ``s`` and the
    whole delayed block.
    """
    res = project(source, RegressorSpec(j, i, CONTEMPORANEOUS, frozenset(s), L))
    return res.fscore <= tol, res


def delayed_separated(source: CovarianceSource, j: int, i: int, s: Iterable[int] = (),
                      L: int = DEFAULT_LAGS, tol: float = DEFAULT_TOL):
    """Is ``y_j`` Wiener separated from the past of ``y_i`` given ``s`` and all other pasts?"""
    res = project(source, RegressorSpec(j, i, DELAYED, frozenset(s), L))
    return res.fscore <= tol, res


def fscore_min_over_sets(source: CovarianceSource | Projector, j: int, i: int, mode: str,
                         candidate_sets: Iterable[Iterable[int]], L: int = DEFAULT_LAGS):
    """Minimum f-score over ``candidate_sets`` and the first set attaining it."""
    proj = source if isinstance(source, Projector) else Projector(source, L)
    best, best_set = np.inf, None
    for s in candidate_sets:
        s = frozenset(s)
        f = proj.fscore(j, i, mode, s)
        if f < best:
            best, best_set = f, s
    if best_set is None:
        raise ValueError("candidate_sets is empty")
    return float(best), best_set
