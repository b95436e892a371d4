"""Linear dynamic influence models ``y = H(z) y + F(z) u``.

The model is realised as one closed-loop state-space system, which gives
population autocovariances (through a discrete Lyapunov equation), power
spectral densities and sample paths.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.linalg

from .graphs import DiGraph, MultiArrowGraph
from .lti import (TransferFunction, evaluate, feedthrough_gain, has_delayed_part,
                  is_strictly_causal, strictly_proper_realization)

log = logging.getLogger(__name__)

Pair = tuple[int, int]

GRID = 512


class ModelError(ValueError):
    """Raised when a model fails validation or cannot be realised."""


class InstabilityError(ModelError):
    pass


@dataclass(frozen=True)
class LdimModel:
    """LDIM on processes ``1..n``.

    ``dynamics`` maps ``(source, target)`` to the transfer function
    ``H_{target,source}``; absent pairs are zero.  ``noise_shaping`` holds
    the diagonal ``F_j`` (default 1) and ``noise_variances`` the variances of
    the white inputs ``u_j`` (default 1).
    """

    n: int
    dynamics: Mapping[Pair, TransferFunction] = field(default_factory=dict)
    noise_shaping: tuple[TransferFunction, ...] | None = None
    noise_variances: tuple[float, ...] | None = None

    def __post_init__(self):
        dyn = {(int(a), int(b)): tf for (a, b), tf in dict(self.dynamics).items()
               if not tf.is_zero()}
        for a, b in dyn:
            if not (1 <= a <= self.n and 1 <= b <= self.n):
                raise ModelError(f"dynamics entry {(a, b)} outside 1..{self.n}")
        object.__setattr__(self, "dynamics", dyn)
        F = self.noise_shaping
        if F is None:
            F = tuple(TransferFunction.gain(1.0) for _ in range(self.n))
        F = tuple(F)
        sig = self.noise_variances
        sig = tuple(float(v) for v in (sig if sig is not None else [1.0] * self.n))
        if len(F) != self.n or len(sig) != self.n:
            raise ModelError("noise_shaping and noise_variances need n entries")
        object.__setattr__(self, "noise_shaping", F)
        object.__setattr__(self, "noise_variances", sig)

    def H(self, source: int, target: int) -> TransferFunction:
        return self.dynamics.get((source, target), TransferFunction.gain(0.0))

    def feedthrough_matrix(self) -> np.ndarray:
        """``D[target-1, source-1]`` = lag-0 gain of ``H_{target,source}``."""
        D = np.zeros((self.n, self.n))
        for (a, b), tf in self.dynamics.items():
            D[b - 1, a - 1] = feedthrough_gain(tf)
        return D

    def delayed_pairs(self) -> set[Pair]:
        """Pairs whose transfer function has a nonzero strictly causal part."""
        return {p for p, tf in self.dynamics.items() if has_delayed_part(tf)}

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "H": [{"from": a, "to": b, **tf.to_dict()}
                  for (a, b), tf in sorted(self.dynamics.items())],
            "F": [tf.to_dict() for tf in self.noise_shaping],
            "sigma_u": list(self.noise_variances),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LdimModel":
        n = int(d["n"])
        dyn = {(int(e["from"]), int(e["to"])): TransferFunction(e["num"], e.get("den", [1.0]))
               for e in d.get("H", [])}
        F = d.get("F")
        if F is not None:
            F = tuple(TransferFunction.from_dict(f) if isinstance(f, dict)
                      else TransferFunction.gain(float(f)) for f in F)
        return cls(n, dyn, F, d.get("sigma_u"))


@dataclass
class ValidationReport:
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def raise_if_failed(self):
        if self.failures:
            raise ModelError("; ".join(self.failures))


def validate(m: LdimModel) -> ValidationReport:
    rep = ValidationReport()
    for (a, b), tf in sorted(m.dynamics.items()):
        if a == b and not is_strictly_causal(tf):
            rep.failures.append(f"H_{b}{a} is a self-loop with feedthrough {feedthrough_gain(tf)}")
    gains = {(a, b) for (a, b), tf in m.dynamics.items()
             if a != b and not is_strictly_causal(tf)}
    if not DiGraph(m.n, gains).is_acyclic():
        rep.failures.append(f"algebraic loop among feedthrough gains {sorted(gains)}")
    grid = np.linspace(-np.pi, np.pi, GRID, endpoint=False)
    for j, (f, s2) in enumerate(zip(m.noise_shaping, m.noise_variances), start=1):
        if not s2 > 0:
            rep.failures.append(f"sigma_u[{j}] = {s2} is not positive")
        if f.num.coeffs[0] == 0.0:
            rep.failures.append(f"F_{j} is not biproper")
            continue
        zeros = f.num.roots_in_z()
        if zeros.size and np.max(np.abs(zeros)) >= 1.0:
            rep.failures.append(f"F_{j} is not minimum phase")
        if not f.is_stable():
            rep.failures.append(f"F_{j} is unstable")
        if np.min(np.abs(evaluate(f, grid))) ** 2 * s2 <= 0:
            rep.failures.append(f"noise PSD of e_{j} vanishes on the unit circle")
    if not gains or DiGraph(m.n, gains).is_acyclic():
        if abs(np.linalg.det(np.eye(m.n) - m.feedthrough_matrix())) < 1e-12:
            rep.failures.append("I - D_H is singular")
    return rep


def perfect_representation(m: LdimModel) -> MultiArrowGraph:
    e1, e2 = set(), set()
    for (a, b), tf in m.dynamics.items():
        if a == b:
            continue
        (e2 if is_strictly_causal(tf) else e1).add((a, b))
    return MultiArrowGraph(m.n, e1, e2)


@dataclass(frozen=True)
class StateSpaceRealization:
    """``x(t+1) = A x(t) + B u(t)``, ``y(t) = C x(t) + D u(t)``, ``cov u = Q``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    Q: np.ndarray

    @property
    def spectral_radius(self) -> float:
        if self.A.size == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.eigvals(self.A))))

    def state_covariance(self) -> np.ndarray:
        if self.A.size == 0:
            return self.A.copy()
        P = scipy.linalg.solve_discrete_lyapunov(self.A, self.B @ self.Q @ self.B.T)
        if not np.all(np.isfinite(P)):
            raise InstabilityError("Lyapunov solve failed")
        return (P + P.T) / 2


def to_state_space(m: LdimModel) -> StateSpaceRealization:
    """Closed-loop realization of ``y = (I - H)^-1 F u``.

    Each nonzero entry of ``H`` and each ``F_j`` gets a controllable
    canonical realization; the loop is closed algebraically through the
    feedthrough matrix, which is invertible because the gains are acyclic.
    """
    validate(m).raise_if_failed()
    n = m.n
    # open-loop state: x(t+1) = Ah x + By y + Bu u ;  y = Cx x + D0 y + Du u
    offset = 0
    pieces = []
    for (a, b), tf in sorted(m.dynamics.items()):
        A, B, C, _ = strictly_proper_realization(tf)
        pieces.append(("y", a, b, A, B, C))
    for j, f in enumerate(m.noise_shaping, start=1):
        A, B, C, _ = strictly_proper_realization(f)
        pieces.append(("u", j, j, A, B, C))
    dim = sum(p[3].shape[0] for p in pieces)
    Ah = np.zeros((dim, dim))
    By = np.zeros((dim, n))
    Bu = np.zeros((dim, n))
    Cx = np.zeros((n, dim))
    for kind, src, tgt, A, B, C in pieces:
        k = A.shape[0]
        if k == 0:
            continue
        sl = slice(offset, offset + k)
        Ah[sl, sl] = A
        (By if kind == "y" else Bu)[sl, src - 1] = B[:, 0]
        Cx[tgt - 1, sl] = C[0]
        offset += k
    D0 = m.feedthrough_matrix()
    Du = np.diag([f.num.coeffs[0] for f in m.noise_shaping])
    M = np.linalg.inv(np.eye(n) - D0)
    A = Ah + By @ M @ Cx
    B = By @ M @ Du + Bu
    C = M @ Cx
    D = M @ Du
    ss = StateSpaceRealization(A, B, C, D, np.diag(m.noise_variances))
    rho = ss.spectral_radius
    if rho >= 1.0 - 1e-9:
        raise InstabilityError(f"closed loop is unstable (spectral radius {rho:.6g})")
    return ss


class CovarianceSource:
    """Autocovariances ``R(k) = E[y(t) y(t-k)^T]`` for ``0 <= k <= max_lag``.

    ``kind`` is ``"population"`` or ``"empirical"``.  Negative lags are
    served through ``R(-k) = R(k)^T``.
    """

    def __init__(self, lags: np.ndarray, kind: str, nobs: int | None = None):
        lags = np.asarray(lags, dtype=float)
        if lags.ndim != 3 or lags.shape[1] != lags.shape[2]:
            raise ValueError("lags must have shape (max_lag + 1, n, n)")
        self._lags = lags
        self._lags.setflags(write=False)
        self.kind = kind
        self.nobs = nobs
        self._stack_cache: dict[int, np.ndarray] = {}

    @property
    def n(self) -> int:
        return self._lags.shape[1]

    @property
    def max_lag(self) -> int:
        return self._lags.shape[0] - 1

    def R(self, k: int) -> np.ndarray:
        if abs(k) > self.max_lag:
            raise ValueError(f"lag {k} beyond max_lag={self.max_lag}")
        return self._lags[k] if k >= 0 else self._lags[-k].T

    query = R

    def stacked(self, lo: int, hi: int) -> np.ndarray:
        """Covariance of ``[y(t-lo); y(t-lo-1); ...; y(t-hi)]`` (block Toeplitz).

        ``lo`` may be negative to include leads.  Block ``(a, b)`` is
        ``E[y(t-lo-a) y(t-lo-b)^T] = R(b - a)``.
        """
        key = (lo, hi)
        if key in self._stack_cache:
            return self._stack_cache[key]
        m = hi - lo + 1
        n = self.n
        S = np.empty((m * n, m * n))
        for a in range(m):
            for b in range(m):
                S[a * n:(a + 1) * n, b * n:(b + 1) * n] = self.R(b - a)
        S.setflags(write=False)
        self._stack_cache[key] = S
        return S


def population_autocovariance(m: LdimModel | StateSpaceRealization,
                              max_lag: int) -> CovarianceSource:
    ss = m if isinstance(m, StateSpaceRealization) else to_state_space(m)
    n = ss.C.shape[0]
    out = np.zeros((max_lag + 1, n, n))
    DQD = ss.D @ ss.Q @ ss.D.T
    if ss.A.size == 0:
        out[0] = DQD
    else:
        P = ss.state_covariance()
        out[0] = ss.C @ P @ ss.C.T + DQD
        G = ss.A @ P @ ss.C.T + ss.B @ ss.Q @ ss.D.T
        for k in range(1, max_lag + 1):
            out[k] = ss.C @ G
            G = ss.A @ G
    out[0] = (out[0] + out[0].T) / 2
    return CovarianceSource(out, "population")


def empirical_autocovariance(data: np.ndarray, max_lag: int) -> CovarianceSource:
    """Biased estimator ``R(k) = (1/T) sum_t y(t) y(t-k)^T`` from an ``n x T`` array.

    The series is demeaned first.  The biased normalisation keeps the stacked
    block-Toeplitz matrix positive semidefinite.
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValueError("data must be a 2-d n x T array")
    n, T = data.shape
    if T <= 10 * max_lag:
        raise ValueError(f"series of length {T} too short for max_lag={max_lag}")
    y = data - data.mean(axis=1, keepdims=True)
    out = np.empty((max_lag + 1, n, n))
    for k in range(max_lag + 1):
        out[k] = y[:, k:] @ y[:, :T - k].T / T
    return CovarianceSource(out, "empirical", nobs=T)


def transfer_matrix(m: LdimModel, omega) -> np.ndarray:
    """``H(e^{i w})``; shape ``(n, n)`` for scalar ``omega``, else ``(len(omega), n, n)``."""
    scalar = np.ndim(omega) == 0
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    Hw = np.zeros((omega.size, m.n, m.n), dtype=complex)
    for (a, b), tf in m.dynamics.items():
        Hw[:, b - 1, a - 1] = evaluate(tf, omega)
    return Hw[0] if scalar else Hw


def psd(m: LdimModel, omega) -> np.ndarray:
    """``Phi_y(e^{i w}) = (I-H)^-1 F Sigma_u F^* (I-H)^-*``; vectorised over ``omega``."""
    scalar = np.ndim(omega) == 0
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    L = np.eye(m.n) - transfer_matrix(m, omega)
    det = np.abs(np.linalg.det(L))
    if np.any(det < 1e-12):
        raise ModelError(f"I - H(e^iw) is singular at omega={omega[np.argmin(det)]}")
    Fw = np.stack([evaluate(f, omega) for f in m.noise_shaping], axis=-1)
    scale = Fw * np.sqrt(np.asarray(m.noise_variances))
    T = np.linalg.solve(L, scale[:, :, None] * np.eye(m.n))
    out = T @ T.conj().transpose(0, 2, 1)
    return out[0] if scalar else out


def burn_in_length(ss: StateSpaceRealization) -> int:
    rho = ss.spectral_radius
    if rho <= 0:
        return 500
    tau = -1.0 / np.log(rho)
    return int(max(500, np.ceil(20 * tau)))


def simulate(m: LdimModel | StateSpaceRealization, horizon: int,
             seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Stationary Gaussian sample path, returned as an ``n x horizon`` array."""
    ss = m if isinstance(m, StateSpaceRealization) else to_state_space(m)
    rng = np.random.default_rng(seed)
    n = ss.C.shape[0]
    burn = burn_in_length(ss)
    total = horizon + burn
    u = rng.standard_normal((total, n)) * np.sqrt(np.diag(ss.Q))
    y = u @ ss.D.T
    if ss.A.size:
        k = ss.A.shape[0]
        x = np.zeros(k)
        xs = np.empty((total, k))
        Bu = u @ ss.B.T
        A = ss.A
        for t in range(total):
            xs[t] = x
            x = A @ x + Bu[t]
        y += xs @ ss.C.T
    return np.ascontiguousarray(y[burn:].T)
