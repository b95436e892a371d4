"""Builtin LDIMs and random parameterizations."""
from __future__ import annotations

import numpy as np

from .graphs import MultiArrowGraph
from .ldim import InstabilityError, LdimModel, to_state_space, validate
from .lti import TransferFunction

EXAMPLE2_PARAMS = ("a21", "a32", "a42", "a43", "a54", "a64", "b32", "b25")


def sec3_triangle(a: float, b: float, c: float) -> LdimModel:
    """Lower-triangular gain model: ``y2 = a y1 + e2``, ``y3 = c y1 + b y2 + e3``."""
    g = TransferFunction.gain
    return LdimModel(3, {(1, 2): g(a), (1, 3): g(c), (2, 3): g(b)})


def sec3_sparse(a: float, b: float) -> LdimModel:
    """Sparser model with the same PSD as ``sec3_triangle(a, b, -a*b)``.

    ``y2 = a y1 + b/(b^2+1) y3 + e2`` with ``Var e2 = 1/(b^2+1)`` and
    ``Var e3 = b^2 + 1``.
    """
    g = TransferFunction.gain
    return LdimModel(3, {(1, 2): g(a), (3, 2): g(b / (b * b + 1))},
                     noise_variances=(1.0, 1.0 / (b * b + 1), b * b + 1))


def sec3_closed_form_psd(a: float, b: float) -> np.ndarray:
    return np.array([[1.0, a, 0.0],
                     [a, a * a + 1, b],
                     [0.0, b, b * b + 1]])


def example1_diamond(gain: float = 1.0) -> LdimModel:
    """``yi = ei; yl = yi + el; yj = yl + ej; yk = yi + yj + ek; ym = yk + em``.

    Vertex order: i=1, l=2, j=3, k=4, m=5.
    """
    g = TransferFunction.gain(gain)
    return LdimModel(5, {(1, 2): g, (2, 3): g, (1, 4): g, (3, 4): g, (4, 5): g})


def example2_network(params: dict | float = 0.4, *, b32_placement: str = "combined") -> LdimModel:
    """Six-node recursive network with a feedback loop closed by ``5 => 2``.

    Feedthrough gains sit on ``1->2, 2->3, 2->4, 3->4, 4->5, 6->4``;
    ``b25 z^-1`` is the strictly causal feedback into ``y2``.  With
    ``b32_placement="combined"`` the delayed term ``b32 z^-1`` joins the
    gain in ``H_32``; ``"self"`` puts it on a strictly causal self-loop of
    ``y3`` instead.
    """
    if np.isscalar(params):
        params = dict.fromkeys(EXAMPLE2_PARAMS, float(params))
    p = {k: float(params[k]) for k in EXAMPLE2_PARAMS}
    g = TransferFunction.gain
    dyn = {
        (1, 2): g(p["a21"]),
        (2, 4): g(p["a42"]),
        (3, 4): g(p["a43"]),
        (4, 5): g(p["a54"]),
        (6, 4): g(p["a64"]),
        (5, 2): TransferFunction.delay(p["b25"]),
    }
    if b32_placement == "combined":
        dyn[(2, 3)] = TransferFunction([p["a32"], p["b32"]])
    elif b32_placement == "self":
        dyn[(2, 3)] = g(p["a32"])
        dyn[(3, 3)] = TransferFunction.delay(p["b32"])
    else:
        raise ValueError(f"unknown b32 placement {b32_placement!r}")
    return LdimModel(6, dyn)


def example2_graph() -> MultiArrowGraph:
    return MultiArrowGraph(6, {(1, 2), (2, 3), (2, 4), (3, 4), (4, 5), (6, 4)}, {(5, 2)})


def random_example2(rng: np.random.Generator, low: float = 0.3, high: float = 0.6,
                    **kw) -> LdimModel:
    return example2_network({k: rng.uniform(low, high) for k in EXAMPLE2_PARAMS}, **kw)


BUILTINS = {
    "sec3_triangle": lambda: sec3_triangle(0.5, 0.5, -0.25),
    "example1_diamond": example1_diamond,
    "example2_network": example2_network,
}


def builtin_models() -> dict:
    """Name to zero-argument builder of the default-parameter builtin models."""
    return dict(BUILTINS)


def parameterize(graph: MultiArrowGraph, rng: np.random.Generator,
                 low: float = 0.3, high: float = 0.6,
                 delayed_on_e1: float = 0.0) -> LdimModel:
    """Draw coefficients for every edge of ``graph``.

    Single-headed edges get a gain; with probability ``delayed_on_e1`` they
    also get a ``z^-1`` term.  Double-headed edges get ``b z^-1``.
    """
    dyn = {}
    for a, b in sorted(graph.e1):
        if rng.random() < delayed_on_e1:
            dyn[(a, b)] = TransferFunction([rng.uniform(low, high), rng.uniform(low, high)])
        else:
            dyn[(a, b)] = TransferFunction.gain(rng.uniform(low, high))
    for a, b in sorted(graph.e2):
        dyn[(a, b)] = TransferFunction.delay(rng.uniform(low, high))
    return LdimModel(graph.n, dyn)


def is_stable(m: LdimModel) -> bool:
    if not validate(m).ok:
        return False
    try:
        to_state_space(m)
    except InstabilityError:
        return False
    return True


def random_recursive_graph(n: int, rng: np.random.Generator, p_e1: float = 0.4,
                           p_e2: float = 0.15) -> MultiArrowGraph:
    """Random recursive multi-arrowed graph.

    Single-headed edges follow a random topological order; double-headed
    edges may point anywhere (feedback included) on pairs without a
    single-headed edge in the same direction.
    """
    order = rng.permutation(np.arange(1, n + 1))
    e1, e2 = set(), set()
    for x in range(n):
        for y in range(x + 1, n):
            if rng.random() < p_e1:
                e1.add((int(order[x]), int(order[y])))
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            if a != b and (a, b) not in e1 and rng.random() < p_e2:
                e2.add((a, b))
    return MultiArrowGraph(n, e1, e2)


def random_recursive_model(n: int, rng: np.random.Generator, max_tries: int = 200,
                           **kw) -> LdimModel:
    low = kw.pop("low", 0.3)
    high = kw.pop("high", 0.6)
    delayed_on_e1 = kw.pop("delayed_on_e1", 0.3)
    for _ in range(max_tries):
        g = random_recursive_graph(n, rng, **kw)
        m = parameterize(g, rng, low, high, delayed_on_e1)
        if is_stable(m):
            return m
    raise InstabilityError(f"no stable draw in {max_tries} tries")
