"""Polynomials and real-rational transfer functions in the unit delay z^-1.

A polynomial ``c_0 + c_1 z^-1 + ... + c_m z^-m`` is stored by its coefficient
vector.  Transfer functions are ratios of two such polynomials with the
denominator normalised so that its constant term is 1, which makes every
transfer function proper and gives it a power series in z^-1.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

UNIT_CIRCLE_GRID = 512
UNIT_CIRCLE_TOL = 1e-9
SINGULAR_TOL = 1e-12
STABILITY_MARGIN = 1e-9


class SingularityError(ValueError):
    """Raised when a denominator vanishes at the requested frequency."""


def _trim(coeffs: Sequence[float]) -> tuple[float, ...]:
    c = [float(v) for v in coeffs]
    while len(c) > 1 and c[-1] == 0.0:
        c.pop()
    if not c:
        c = [0.0]
    return tuple(c)


@dataclass(frozen=True)
class PolynomialInDelay:
    """Finite sum ``sum_k coeffs[k] * z^-k`` in canonical (trimmed) form."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Sequence[float] | float = (0.0,)):
        if np.isscalar(coeffs):
            coeffs = (coeffs,)
        c = _trim(coeffs)
        if not all(np.isfinite(c)):
            raise ValueError(f"non-finite polynomial coefficients {c}")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    def __call__(self, omega):
        """Evaluate at ``z = exp(i*omega)``; broadcasts over ``omega``."""
        omega = np.asarray(omega, dtype=float)
        k = np.arange(len(self.coeffs))
        phase = np.exp(-1j * np.multiply.outer(omega, k))
        return phase @ np.asarray(self.coeffs)

    def roots_in_z(self) -> np.ndarray:
        """Roots of ``z^m * p(z^-1)``, i.e. the poles/zeros in the z-plane."""
        if self.degree == 0:
            return np.array([], dtype=complex)
        return np.roots(self.coeffs)


@dataclass(frozen=True)
class TransferFunction:
    """Real-rational ``num(z^-1) / den(z^-1)`` with ``den`` monic in z^0."""

    num: PolynomialInDelay
    den: PolynomialInDelay

    def __init__(self, num: Sequence[float] | float | PolynomialInDelay = 0.0,
                 den: Sequence[float] | float | PolynomialInDelay = 1.0):
        num = num if isinstance(num, PolynomialInDelay) else PolynomialInDelay(num)
        den = den if isinstance(den, PolynomialInDelay) else PolynomialInDelay(den)
        d0 = den.coeffs[0]
        if d0 == 0.0:
            raise ValueError(
                "denominator constant term is zero: the transfer function is "
                "not proper in z^-1")
        if d0 != 1.0:
            num = PolynomialInDelay(np.asarray(num.coeffs) / d0)
            den = PolynomialInDelay(np.asarray(den.coeffs) / d0)
        grid = np.linspace(-np.pi, np.pi, UNIT_CIRCLE_GRID, endpoint=False)
        if den.degree > 0 and np.min(np.abs(den(grid))) < UNIT_CIRCLE_TOL:
            raise SingularityError("denominator has a zero on the unit circle")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def gain(cls, k: float) -> "TransferFunction":
        return cls([k])

    @classmethod
    def delay(cls, k: float = 1.0, lag: int = 1) -> "TransferFunction":
        """``k * z^-lag``."""
        return cls([0.0] * lag + [k])

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def poles(self) -> np.ndarray:
        return self.den.roots_in_z()

    def is_stable(self) -> bool:
        p = self.poles()
        return p.size == 0 or float(np.max(np.abs(p))) < 1.0 - STABILITY_MARGIN

    def to_dict(self) -> dict:
        return {"num": list(self.num.coeffs), "den": list(self.den.coeffs)}

    @classmethod
    def from_dict(cls, d: dict) -> "TransferFunction":
        return cls(d["num"], d.get("den", [1.0]))

    def __repr__(self) -> str:
        return f"TransferFunction(num={list(self.num.coeffs)}, den={list(self.den.coeffs)})"


def evaluate(tf: TransferFunction, omega):
    """Value of ``tf`` at ``z = exp(i*omega)``.

    Raises
    ------
    SingularityError
        If the denominator magnitude drops below ``SINGULAR_TOL`` at any of the
        requested frequencies.
    """
    if not np.all(np.isfinite(omega)):
        raise ValueError("omega must be finite")
    den = tf.den(omega)
    if np.any(np.abs(den) < SINGULAR_TOL):
        raise SingularityError(f"transfer function singular at omega={omega}")
    return tf.num(omega) / den


def feedthrough_gain(tf: TransferFunction) -> float:
    return tf.num.coeffs[0]


def is_strictly_causal(tf: TransferFunction) -> bool:
    return feedthrough_gain(tf) == 0.0


def has_delayed_part(tf: TransferFunction) -> bool:
    """True when the impulse response is nonzero at some lag >= 1."""
    if tf.is_zero():
        return False
    return tf.num.degree > 0 or tf.den.degree > 0


def impulse_response(tf: TransferFunction, nlags: int) -> np.ndarray:
    """First ``nlags`` coefficients of the power series of ``tf`` in z^-1."""
    if nlags < 1:
        raise ValueError("nlags must be >= 1")
    if not tf.is_stable():
        warnings.warn(f"unstable transfer function {tf!r}; impulse response diverges",
                      RuntimeWarning, stacklevel=2)
    b = np.zeros(nlags)
    nb = min(nlags, len(tf.num.coeffs))
    b[:nb] = tf.num.coeffs[:nb]
    a = np.asarray(tf.den.coeffs)
    h = np.zeros(nlags)
    for t in range(nlags):
        acc = b[t]
        for k in range(1, min(t, len(a) - 1) + 1):
            acc -= a[k] * h[t - k]
        h[t] = acc
    return h


def strictly_proper_realization(tf: TransferFunction):
    """Controllable canonical form ``(A, B, C, D)`` of ``tf``.

    The state dimension equals ``max(deg num, deg den)``; pure gains return
    empty matrices and put everything in ``D``.
    """
    b = np.asarray(tf.num.coeffs)
    a = np.asarray(tf.den.coeffs)
    p = max(len(b), len(a)) - 1
    d = b[0]
    if p == 0:
        return np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), d
    bb = np.zeros(p + 1)
    aa = np.zeros(p + 1)
    bb[:len(b)] = b
    aa[:len(a)] = a
    c = bb[1:] - d * aa[1:]
    A = np.zeros((p, p))
    A[0, :] = -aa[1:]
    if p > 1:
        A[1:, :-1] = np.eye(p - 1)
    B = np.zeros((p, 1))
    B[0, 0] = 1.0
    return A, B, c.reshape(1, p), d
