"""Multi-arrowed graphs of LDIMs and the d-connection oracles.

Vertices are the integers ``1..n`` so that vertex ``k`` is process ``y_k``.
Single-headed edges (``e1``) may carry a direct feedthrough; double-headed
edges (``e2``) are strictly causal.  The graph of instantaneous propagations
keeps only ``e1``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import permutations
from typing import Iterable

Pair = tuple[int, int]


class StructureError(ValueError):
    """Raised for graphs that violate a structural requirement."""


def _pairs(edges: Iterable[Iterable[int]]) -> frozenset[Pair]:
    return frozenset((int(a), int(b)) for a, b in edges)


def _upair(a: int, b: int) -> Pair:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class DiGraph:
    """Plain directed graph on ``1..n`` (cycles allowed)."""

    n: int
    edges: frozenset[Pair] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "edges", _pairs(self.edges))
        for a, b in self.edges:
            if not (1 <= a <= self.n and 1 <= b <= self.n):
                raise StructureError(f"edge {(a, b)} outside vertex range 1..{self.n}")

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def parents(self, v: int) -> set[int]:
        return {a for a, b in self.edges if b == v}

    def children(self, v: int) -> set[int]:
        return {b for a, b in self.edges if a == v}

    def descendants(self, v: int) -> set[int]:
        """Vertices reachable from ``v`` by directed paths, ``v`` included."""
        out = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            for c in self.children(u):
                if c not in out:
                    out.add(c)
                    stack.append(c)
        return out

    def ancestors_of_set(self, s: Iterable[int]) -> set[int]:
        out = set(s)
        stack = list(out)
        while stack:
            u = stack.pop()
            for p in self.parents(u):
                if p not in out:
                    out.add(p)
                    stack.append(p)
        return out

    def is_acyclic(self) -> bool:
        indeg = {v: 0 for v in self.vertices}
        for _, b in self.edges:
            indeg[b] += 1
        queue = deque(v for v, d in indeg.items() if d == 0)
        seen = 0
        while queue:
            u = queue.popleft()
            seen += 1
            for c in self.children(u):
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        return seen == self.n


@dataclass(frozen=True)
class MultiArrowGraph:
    """``G = (V, E1, E2)`` with single-headed ``e1`` and double-headed ``e2``."""

    n: int
    e1: frozenset[Pair] = field(default_factory=frozenset)
    e2: frozenset[Pair] = field(default_factory=frozenset)

    def __post_init__(self):
        e1, e2 = _pairs(self.e1), _pairs(self.e2)
        object.__setattr__(self, "e1", e1)
        object.__setattr__(self, "e2", e2)
        if e1 & e2:
            raise StructureError(f"E1 and E2 overlap on {sorted(e1 & e2)}")
        for a, b in e1 | e2:
            if not (1 <= a <= self.n and 1 <= b <= self.n):
                raise StructureError(f"edge {(a, b)} outside vertex range 1..{self.n}")
            if a == b:
                raise StructureError(f"self-loop {(a, b)} is not a graph edge")

    @property
    def single_headed(self) -> frozenset[Pair]:
        return self.e1

    @property
    def double_headed(self) -> frozenset[Pair]:
        return self.e2

    def to_dict(self) -> dict:
        return {"n": self.n, "e1": sorted(map(list, self.e1)),
                "e2": sorted(map(list, self.e2))}

    @classmethod
    def from_dict(cls, d: dict) -> "MultiArrowGraph":
        return cls(d["n"], d.get("e1", ()), d.get("e2", ()))


@dataclass(frozen=True)
class PartialGraph:
    """Partially oriented multi-arrowed graph produced by reconstruction.

    ``undirected`` holds pairs ``(i, j)`` with ``i < j``; ``directed`` holds
    oriented feedthrough edges; ``double_headed`` holds strictly causal
    edges oriented from the lagged source to the target.
    """

    n: int
    undirected: frozenset[Pair] = field(default_factory=frozenset)
    directed: frozenset[Pair] = field(default_factory=frozenset)
    double_headed: frozenset[Pair] = field(default_factory=frozenset)

    def __post_init__(self):
        und = frozenset(_upair(a, b) for a, b in _pairs(self.undirected))
        object.__setattr__(self, "undirected", und)
        object.__setattr__(self, "directed", _pairs(self.directed))
        object.__setattr__(self, "double_headed", _pairs(self.double_headed))
        seen: dict[Pair, str] = {}
        for name, edges in (("undirected", self.undirected),
                            ("directed", self.directed),
                            ("double_headed", self.double_headed)):
            for a, b in edges:
                if a == b or not (1 <= a <= self.n and 1 <= b <= self.n):
                    raise StructureError(f"bad {name} edge {(a, b)}")
                key = _upair(a, b)
                if key in seen and seen[key] != name:
                    raise StructureError(
                        f"pair {key} appears as both {seen[key]} and {name}")
                seen[key] = name

    def adjacent(self, a: int, b: int) -> bool:
        return (_upair(a, b) in self.undirected or (a, b) in self.directed
                or (b, a) in self.directed or (a, b) in self.double_headed
                or (b, a) in self.double_headed)

    def to_dict(self) -> dict:
        return {"n": self.n,
                "undirected": sorted(map(list, self.undirected)),
                "directed": sorted(map(list, self.directed)),
                "e2": sorted(map(list, self.double_headed))}

    @classmethod
    def from_dict(cls, d: dict) -> "PartialGraph":
        return cls(d["n"], d.get("undirected", ()), d.get("directed", ()),
                   d.get("e2", ()))


def causal_graph(g: MultiArrowGraph) -> DiGraph:
    return DiGraph(g.n, g.e1 | g.e2)


def skeleton(g) -> frozenset[Pair]:
    """Unordered adjacencies of a ``DiGraph``, ``MultiArrowGraph`` or ``PartialGraph``."""
    if isinstance(g, DiGraph):
        edges = g.edges
    elif isinstance(g, MultiArrowGraph):
        edges = g.e1 | g.e2
    elif isinstance(g, PartialGraph):
        edges = g.undirected | g.directed | g.double_headed
    else:
        raise TypeError(f"cannot take the skeleton of {type(g).__name__}")
    return frozenset(_upair(a, b) for a, b in edges)


def check_recursive(g: MultiArrowGraph) -> bool:
    return DiGraph(g.n, g.e1).is_acyclic()


def instantaneous_graph(g: MultiArrowGraph) -> DiGraph:
    dag = DiGraph(g.n, g.e1)
    if not dag.is_acyclic():
        raise StructureError("single-headed edges contain a cycle (algebraic loop)")
    return dag


def colliders(g: DiGraph) -> set[tuple[int, int, int]]:
    out = set()
    for k in g.vertices:
        for i, j in permutations(sorted(g.parents(k)), 2):
            out.add((i, k, j))
    return out


def _check_query(g, i, j, s):
    s = frozenset(s)
    if i == j:
        raise ValueError("d-connection needs two distinct vertices")
    if i in s or j in s:
        raise ValueError("endpoints may not belong to the conditioning set")
    for v in (i, j, *s):
        if not 1 <= v <= g.n:
            raise ValueError(f"vertex {v} outside 1..{g.n}")
    return s


def d_connected(g: DiGraph, i: int, j: int, s: Iterable[int] = ()) -> bool:
    """Reachability ("Bayes ball") test for d-connection of ``i`` and ``j`` given ``s``.

    Linear in the size of the graph.  States are (vertex, direction of
    arrival); a trail may pass a conditioned vertex only as a collider and
    an unconditioned one only as a non-collider unless it is an ancestor of
    ``s``.
    """
    s = _check_query(g, i, j, s)
    parents = {v: g.parents(v) for v in g.vertices}
    children = {v: g.children(v) for v in g.vertices}
    anc = g.ancestors_of_set(s)
    # "up": arrived from a child (or start); "down": arrived from a parent
    start = (i, "up")
    seen = {start}
    queue = deque([start])
    while queue:
        v, d = queue.popleft()
        if v == j and v not in s:
            return True
        nxt = []
        if d == "up" and v not in s:
            nxt += [(p, "up") for p in parents[v]]
            nxt += [(c, "down") for c in children[v]]
        elif d == "down":
            if v not in s:
                nxt += [(c, "down") for c in children[v]]
            if v in anc:
                nxt += [(p, "up") for p in parents[v]]
        for state in nxt:
            if state not in seen:
                seen.add(state)
                queue.append(state)
    return False


def d_connected_by_paths(g: DiGraph, i: int, j: int, s: Iterable[int] = ()) -> bool:
    """Exhaustive simple-path enumeration; exponential, used as an oracle."""
    s = _check_query(g, i, j, s)
    desc = {v: g.descendants(v) for v in g.vertices}
    nbrs: dict[int, list[tuple[int, bool]]] = {v: [] for v in g.vertices}
    for a, b in g.edges:
        nbrs[a].append((b, True))   # traversed a -> b along the edge direction
        nbrs[b].append((a, False))  # traversed b -> a against it

    def active(v, into_from_prev, into_from_next):
        if into_from_prev and into_from_next:
            return bool(desc[v] & s)
        return v not in s

    def walk(v, visited, arrived_into_v):
        for w, forward in nbrs[v]:
            if w in visited:
                continue
            # is the edge between v and w pointing into v?
            into_v_from_w = not forward
            if v != i and not active(v, arrived_into_v, into_v_from_w):
                continue
            if w == j:
                return True
            if walk(w, visited | {w}, forward):
                return True
        return False

    return walk(i, {i}, False)


def feedthrough_d_connected(g: MultiArrowGraph, i: int, j: int,
                            s: Iterable[int] = ()) -> bool:
    return d_connected(instantaneous_graph(g), i, j, s)


def lagged_copy_graph(g: MultiArrowGraph, i: int,
                      delayed_edges: Iterable[Pair] | None = None) -> DiGraph:
    """Instantaneous graph plus a root ``n + 1`` standing for the past of ``y_i``.

    The root points at every vertex that ``y_i`` influences with a strictly
    causal term.  By default those are the double-headed children of ``i``;
    ``delayed_edges`` overrides this (e.g. single-headed edges whose
    transfer function also has delayed terms, or strictly causal self-loops).
    """
    if delayed_edges is None:
        delayed_edges = g.e2
    targets = sorted({b for a, b in _pairs(delayed_edges) if a == i})
    lag = g.n + 1
    return DiGraph(g.n + 1, g.e1 | {(lag, c) for c in targets})


def delayed_d_connected(g: MultiArrowGraph, i: int, j: int, s: Iterable[int] = (),
                        *, delayed_edges: Iterable[Pair] | None = None,
                        mode: str = "lagged") -> bool:
    """Is ``y_j`` delay d-connected with the past of ``y_i`` given ``s``?

    ``mode="lagged"`` (default) represents the past of ``y_i`` by a separate
    root vertex attached to the strictly causal children of ``i``.
    ``mode="reclassify"`` follows the literal recipe: turn one double-headed
    out-edge ``(i, c)`` into a single-headed edge and test feedthrough
    d-connection of ``i`` and ``j``; the disjunction over ``c`` is returned.
    The two can differ because the literal recipe lets the trail leave
    ``y_i`` through its present-time neighbours.
    """
    s = frozenset(s)
    if mode == "lagged":
        _check_query(g, i, j, s)
        dag = lagged_copy_graph(g, i, delayed_edges)
        if not dag.children(g.n + 1):
            return False
        return d_connected(dag, g.n + 1, j, s)
    if mode != "reclassify":
        raise ValueError(f"unknown mode {mode!r}")
    _check_query(g, i, j, s)
    pool = g.e2 if delayed_edges is None else _pairs(delayed_edges)
    for a, c in sorted(pool):
        if a != i or a == c:
            continue
        e1 = g.e1 | {(i, c)}
        # the modified graph may contain a feedback cycle; the reachability
        # test still applies to cyclic graphs
        if d_connected(DiGraph(g.n, e1), i, j, s):
            return True
    return False
